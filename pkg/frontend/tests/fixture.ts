import { createServer, type Server } from "node:http";
import type { CountBlock, ReportDoc, UniqueIssue } from "../src/types.js";

let issueCounter = 0;

export function makeIssue(partial: Partial<UniqueIssue> = {}): UniqueIssue {
  issueCounter += 1;
  const uniqueId = partial.unique_id ?? `u${issueCounter.toString().padStart(3, "0")}`;
  return {
    unique_id: uniqueId,
    group_id: 0,
    category: "Contrast",
    check_name: "Text contrast below required ratio",
    message: `issue ${uniqueId}`,
    status: "active",
    anchor: {
      capture_id: "c000",
      detection_id: `d-${uniqueId}`,
      bbox: { x: 10, y: 20, w: 80, h: 20 },
    },
    occurrences: [{ capture_id: "c000", issue_id: `i-${uniqueId}`, bbox: { x: 10, y: 20, w: 80, h: 20 } }],
    ...partial,
  };
}

export function defaultIssues(): UniqueIssue[] {
  return [
    makeIssue({ unique_id: "u-contrast-1", category: "Contrast", group_id: 0 }),
    makeIssue({ unique_id: "u-contrast-2", category: "Contrast", group_id: 0 }),
    makeIssue({
      unique_id: "u-hit-1",
      category: "HitRegion",
      check_name: "Hit area is too small",
      group_id: 1,
      anchor: { capture_id: "c001", detection_id: "d-hit", bbox: { x: 5, y: 5, w: 30, h: 30 } },
      occurrences: [{ capture_id: "c001", issue_id: "i-hit", bbox: { x: 5, y: 5, w: 30, h: 30 } }],
    }),
  ];
}

function countBlock(issues: UniqueIssue[]): CountBlock {
  const byCategory: Record<string, number> = {};
  const byCheck: Record<string, Record<string, number>> = {};
  for (const issue of issues) {
    byCategory[issue.category] = (byCategory[issue.category] ?? 0) + 1;
    byCheck[issue.category] = byCheck[issue.category] ?? {};
    byCheck[issue.category][issue.check_name] =
      (byCheck[issue.category][issue.check_name] ?? 0) + 1;
  }
  return { total: issues.length, by_category: byCategory, by_check: byCheck };
}

export function buildDoc(active: UniqueIssue[], ignored: UniqueIssue[],
                         hidden: UniqueIssue[] = []): ReportDoc {
  const groupIds = [0, 1];
  const groups = groupIds.map((gid) => {
    const issues: Record<string, Record<string, UniqueIssue[]>> = {};
    for (const issue of active.filter((i) => i.group_id === gid)) {
      issues[issue.category] = issues[issue.category] ?? {};
      issues[issue.category][issue.check_name] =
        issues[issue.category][issue.check_name] ?? [];
      issues[issue.category][issue.check_name].push(issue);
    }
    return { group_id: gid, issues };
  });
  const perGroup: Record<string, CountBlock> = {};
  for (const gid of groupIds) {
    perGroup[String(gid)] = countBlock(active.filter((i) => i.group_id === gid));
  }
  return {
    app_id: "fixture-app",
    run_id: "run-0",
    generated_at: new Date().toISOString(),
    similarity: { mode: "structural", threshold: 0.5 },
    bundle_dir: null,
    storyboard: {
      groups: [
        { group_id: 0, member_ids: ["c000"], representative_id: "c000" },
        { group_id: 1, member_ids: ["c001", "c002"], representative_id: "c001" },
      ],
      edges: [[0, 1]],
    },
    screens: [
      { capture_id: "c000", ordinal: 0, width: 360, height: 720, group_id: 0, file: "screens/c000.png" },
      { capture_id: "c001", ordinal: 1, width: 360, height: 720, group_id: 1, file: "screens/c001.png" },
      { capture_id: "c002", ordinal: 2, width: 360, height: 720, group_id: 1, file: "screens/c002.png" },
    ],
    groups,
    summary: { app: countBlock(active), per_group: perGroup },
    ignored,
    hidden,
    fix_info: {
      "Text contrast below required ratio": "Raise the contrast.",
      "Hit area is too small": "Extend the tappable area.",
    },
  };
}

interface FixtureRecord {
  ignore_id: string;
  scope: string;
  unique_id?: string;
  check_name?: string;
  category?: string;
  group_id?: number;
  active: boolean;
}

/**
 * In-memory stand-in for the report server implementing the mutation
 * contract: ignores persist, regenerate re-partitions issues, bugs append.
 */
export class FixtureServer {
  issues: UniqueIssue[];
  records = new Map<string, FixtureRecord>();
  bugs: Array<{ unique_id: string; title: string }> = [];
  failNextIgnore = false;
  private ignoredIds = new Set<string>();
  private server: Server | null = null;
  private nextId = 1;
  url = "";

  constructor(issues: UniqueIssue[] = defaultIssues()) {
    this.issues = issues;
  }

  private doc(): ReportDoc {
    const active = this.issues.filter((i) => !this.ignoredIds.has(i.unique_id));
    const ignored = this.issues
      .filter((i) => this.ignoredIds.has(i.unique_id))
      .map((i) => ({ ...i, status: "ignored" }));
    return buildDoc(active, ignored);
  }

  private regenerate(): void {
    this.ignoredIds.clear();
    for (const record of this.records.values()) {
      if (!record.active) continue;
      for (const issue of this.issues) {
        const matches =
          (record.scope === "issue" && record.unique_id === issue.unique_id) ||
          (record.scope === "check_name" && record.check_name === issue.check_name) ||
          (record.scope === "category" && record.category === issue.category) ||
          (record.scope === "screen" && record.group_id === issue.group_id);
        if (matches) this.ignoredIds.add(issue.unique_id);
      }
    }
  }

  start(): Promise<void> {
    this.server = createServer((req, res) => {
      const chunks: Buffer[] = [];
      req.on("data", (c) => chunks.push(c));
      req.on("end", () => {
        const body = chunks.length ? JSON.parse(Buffer.concat(chunks).toString()) : {};
        this.route(req.method ?? "", req.url ?? "", body, (status, payload) => {
          res.writeHead(status, { "Content-Type": "application/json" });
          res.end(JSON.stringify(payload));
        });
      });
    });
    return new Promise((resolve) => {
      this.server!.listen(0, "127.0.0.1", () => {
        const address = this.server!.address();
        if (address && typeof address === "object") {
          this.url = `http://127.0.0.1:${address.port}`;
        }
        resolve();
      });
    });
  }

  private route(
    method: string,
    url: string,
    body: Record<string, unknown>,
    send: (status: number, payload: unknown) => void,
  ): void {
    if (method === "GET" && url === "/api/report") {
      send(200, this.doc());
    } else if (method === "GET" && url === "/api/ignores") {
      send(200, [...this.records.values()].map((r) => ({
        ignore_id: r.ignore_id,
        app_id: "fixture-app",
        scope: r.scope,
        check_name: r.check_name ?? null,
        category: r.category ?? null,
        active: r.active,
        created_at: "",
        has_fingerprint: r.scope === "issue",
        snapshot_capture_id: null,
      })));
    } else if (method === "POST" && url === "/api/ignores") {
      if (this.failNextIgnore) {
        this.failNextIgnore = false;
        send(500, { detail: "synthetic ignore failure" });
        return;
      }
      const record: FixtureRecord = {
        ignore_id: `ig${this.nextId++}`,
        scope: String(body.scope),
        unique_id: body.unique_id as string | undefined,
        check_name: body.check_name as string | undefined,
        category: body.category as string | undefined,
        group_id: body.group_id as number | undefined,
        active: true,
      };
      this.records.set(record.ignore_id, record);
      send(201, { ignore_id: record.ignore_id, scope: record.scope });
    } else if (method === "DELETE" && url.startsWith("/api/ignores/")) {
      const id = url.split("/").pop()!;
      const record = this.records.get(id);
      if (!record) {
        send(404, { detail: `unknown ignore id '${id}'` });
        return;
      }
      record.active = false;
      send(200, { removed: id });
    } else if (method === "POST" && url === "/api/regenerate") {
      this.regenerate();
      send(200, { generated_at: new Date().toISOString() });
    } else if (method === "POST" && url === "/api/bugs") {
      this.bugs.push({ unique_id: String(body.unique_id), title: String(body.title ?? "") });
      send(201, { bug_id: `bug${this.bugs.length}` });
    } else {
      send(404, { detail: `no route ${method} ${url}` });
    }
  }

  stop(): Promise<void> {
    return new Promise((resolve) => {
      if (!this.server) return resolve();
      this.server.closeAllConnections();
      this.server.close(() => resolve());
    });
  }
}
