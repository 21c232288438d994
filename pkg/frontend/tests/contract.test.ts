// Criterion: against a fixture server, rendered summary counts equal the
// report payload's counts; an ignore click followed by regenerate moves the
// row to the collapsed section; unignore restores it.
import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { AppStore } from "../src/store.js";
import { FixtureServer } from "./fixture.js";

describe("UI contract against a fixture server", () => {
  let server: FixtureServer;
  let store: AppStore;

  beforeEach(async () => {
    server = new FixtureServer();
    await server.start();
    store = new AppStore(new ApiClient(server.url));
    await store.load();
  });

  afterEach(async () => {
    await server.stop();
  });

  it("summary counts equal the report payload counts", async () => {
    const payload = await new ApiClient(server.url).getReport();
    const sections = store.summarySections();
    expect(sections.map((s) => [s.category, s.count])).toEqual(
      Object.entries(payload.summary.app.by_category),
    );
    for (const section of sections) {
      for (const check of section.checks) {
        expect(check.count).toBe(payload.summary.app.by_check[section.category][check.check_name]);
      }
    }
  });

  it("ignore click + regenerate moves the row to the collapsed section; unignore restores it", async () => {
    const issue = store.activeIssues()[0];
    const totalBefore = store.doc!.summary.app.total;

    expect(await store.ignoreIssue(issue)).toBe(true);

    // after the round trip the server document is authoritative
    expect(store.doc!.summary.app.total).toBe(totalBefore - 1);
    expect(store.activeIssues().map((i) => i.unique_id)).not.toContain(issue.unique_id);
    expect(store.ignoredIssues().map((i) => i.unique_id)).toContain(issue.unique_id);

    const record = store.ignores.find((r) => r.active);
    expect(record).toBeDefined();
    expect(await store.unignore(record!.ignore_id)).toBe(true);

    expect(store.doc!.summary.app.total).toBe(totalBefore);
    expect(store.activeIssues().map((i) => i.unique_id)).toContain(issue.unique_id);
    expect(store.ignoredIssues().map((i) => i.unique_id)).not.toContain(issue.unique_id);
  });

  it("check-scope ignore collapses every matching row", async () => {
    const target = store.activeIssues().find((i) => i.category === "Contrast")!;
    expect(await store.ignoreCheck(target.category, target.check_name)).toBe(true);
    expect(store.activeIssues().every((i) => i.check_name !== target.check_name)).toBe(true);
    expect(
      store.ignoredIssues().filter((i) => i.check_name === target.check_name).length,
    ).toBe(2);
  });

  it("screen-scope ignore empties the group", async () => {
    expect(await store.ignoreScreenGroup(0)).toBe(true);
    expect(store.activeIssues().every((i) => i.group_id !== 0)).toBe(true);
  });

  it("server failure reverts the optimistic move and surfaces the error", async () => {
    const issue = store.activeIssues()[0];
    server.failNextIgnore = true;
    expect(await store.ignoreIssue(issue)).toBe(false);
    expect(store.view.error).toContain("synthetic ignore failure");
    expect(store.activeIssues().map((i) => i.unique_id)).toContain(issue.unique_id);
    expect(store.ignoredIssues()).toHaveLength(0);
  });

  it("file-bug posts a stub referencing the issue", async () => {
    const issue = store.activeIssues()[0];
    expect(await store.fileBug(issue, "broken contrast")).toBe(true);
    expect(server.bugs).toEqual([{ unique_id: issue.unique_id, title: "broken contrast" }]);
  });

  it("unignoring an unknown record surfaces a 404 error", async () => {
    expect(await store.unignore("ghost")).toBe(false);
    expect(store.view.error).toContain("404");
  });
});
