import type { AppStore, CategorySection } from "./store.js";
import type { UniqueIssue } from "./types.js";

type Child = Node | string | null | undefined;

function el(tag: string, attrs: Record<string, string> = {}, ...children: Child[]): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  for (const child of children) {
    if (child === null || child === undefined) continue;
    node.append(child);
  }
  return node;
}

function button(label: string, title: string, onClick: () => void, cls = "btn"): HTMLElement {
  const node = el("button", { class: cls, title }, label);
  node.addEventListener("click", (event) => {
    event.stopPropagation();
    onClick();
  });
  return node;
}

const THUMB_WIDTH = 120;

function screenThumb(store: AppStore, captureId: string, boxes: UniqueIssue["occurrences"]): HTMLElement {
  const meta = store.screenMeta(captureId);
  const wrap = el("div", { class: "thumb", "data-capture": captureId });
  const img = el("img", {
    src: store.screenUrl(captureId),
    alt: `screen ${captureId}`,
    width: String(THUMB_WIDTH),
  });
  wrap.append(img);
  if (meta) {
    const scale = THUMB_WIDTH / meta.width;
    wrap.style.width = `${THUMB_WIDTH}px`;
    wrap.style.height = `${Math.round(meta.height * scale)}px`;
    for (const occ of boxes.filter((b) => b.capture_id === captureId)) {
      const box = el("div", { class: "highlight" });
      box.style.left = `${occ.bbox.x * scale}px`;
      box.style.top = `${occ.bbox.y * scale}px`;
      box.style.width = `${Math.max(2, occ.bbox.w * scale)}px`;
      box.style.height = `${Math.max(2, occ.bbox.h * scale)}px`;
      wrap.append(box);
    }
  }
  return wrap;
}

function issueRow(store: AppStore, issue: UniqueIssue, fixInfo: string): HTMLElement {
  const selected = store.view.selectedIssue === issue.unique_id;
  const row = el("div", { class: "issue-row", "data-issue": issue.unique_id });
  const head = el(
    "div",
    { class: "issue-head" },
    el("span", { class: "issue-message" }, issue.message || issue.check_name),
    el("span", { class: "issue-meta" }, `${issue.occurrences.length} screen(s)`),
  );
  head.addEventListener("click", () =>
    store.selectIssue(selected ? null : issue.unique_id),
  );
  const actions = el(
    "span",
    { class: "issue-actions" },
    button("Bug", "File a bug for this issue", () => {
      void store.fileBug(issue, issue.check_name);
    }),
    button("?", fixInfo || "No fix information available", () => {
      window.alert(fixInfo || "No fix information available.");
    }),
    button("Ignore", "Ignore this specific issue in future reports", () => {
      void store.ignoreIssue(issue);
    }, "btn btn-ignore"),
  );
  head.append(actions);
  row.append(head);
  if (selected) {
    const strip = el("div", { class: "thumb-strip" });
    const captureIds = [...new Set(issue.occurrences.map((o) => o.capture_id))];
    for (const captureId of captureIds) {
      strip.append(screenThumb(store, captureId, issue.occurrences));
    }
    row.append(strip);
  }
  return row;
}

function categoryBlock(store: AppStore, section: CategorySection): HTMLElement {
  const block = el("section", { class: "category", "data-category": section.category });
  const header = el(
    "div",
    { class: "category-head" },
    el("strong", {}, section.category),
    el("span", { class: "count-badge", "data-role": "category-count" }, String(section.count)),
    button("Ignore category", `Ignore all ${section.category} issues`, () => {
      void store.ignoreCategory(section.category);
    }, "btn btn-ignore"),
  );
  header.addEventListener("click", () => store.toggleCategory(section.category));
  block.append(header);
  if (section.expanded) {
    for (const check of section.checks) {
      const checkBlock = el(
        "div",
        { class: "check", "data-check": check.check_name },
        el(
          "div",
          { class: "check-head" },
          el("span", {}, check.check_name),
          el("span", { class: "count-badge", "data-role": "check-count" }, String(check.count)),
          button("?", check.fix_info, () => window.alert(check.fix_info)),
          button("Ignore type", `Ignore every '${check.check_name}' issue`, () => {
            void store.ignoreCheck(section.category, check.check_name);
          }, "btn btn-ignore"),
        ),
      );
      for (const issue of check.issues) {
        checkBlock.append(issueRow(store, issue, check.fix_info));
      }
      block.append(checkBlock);
    }
  }
  return block;
}

function collapsedSections(store: AppStore): HTMLElement {
  const wrap = el("div", { class: "collapsed-sections" });

  const ignored = el("details", { class: "ignored-section" });
  ignored.append(el("summary", {}, `Ignored (${store.ignoredIssues().length})`));
  for (const issue of store.ignoredIssues()) {
    ignored.append(
      el(
        "div",
        { class: "issue-row ignored", "data-issue": issue.unique_id },
        el("span", {}, `${issue.category} / ${issue.check_name}: ${issue.message}`),
      ),
    );
  }
  const records = store.ignores.filter((r) => r.active);
  if (records.length > 0) {
    const list = el("div", { class: "ignore-records" }, el("em", {}, "Active ignore rules"));
    for (const record of records) {
      list.append(
        el(
          "div",
          { class: "ignore-record", "data-ignore": record.ignore_id },
          el("span", {}, `${record.scope}: ${record.check_name ?? record.category ?? record.snapshot_capture_id ?? record.ignore_id}`),
          button("Unignore", "Remove this ignore rule", () => {
            void store.unignore(record.ignore_id);
          }),
        ),
      );
    }
    ignored.append(list);
  }
  wrap.append(ignored);

  const hidden = el("details", { class: "hidden-section" });
  hidden.append(el("summary", {}, `Hidden as likely false positives (${store.hiddenIssues().length})`));
  for (const issue of store.hiddenIssues()) {
    hidden.append(
      el("div", { class: "issue-row hidden" },
         el("span", {}, `${issue.category} / ${issue.check_name}: ${issue.message}`)),
    );
  }
  wrap.append(hidden);
  return wrap;
}

function storyboardTab(store: AppStore): HTMLElement {
  const doc = store.doc!;
  const wrap = el("div", { class: "storyboard" });
  const cards = el("div", { class: "storyboard-cards" });
  for (const group of doc.storyboard.groups) {
    cards.append(
      el(
        "div",
        { class: "storyboard-card" },
        screenThumb(store, group.representative_id, []),
        el("div", {}, `g${group.group_id} · ${group.member_ids.length} capture(s)`),
      ),
    );
  }
  wrap.append(cards);
  const edges = el("div", { class: "storyboard-edges" }, el("strong", {}, "Transitions: "));
  edges.append(
    doc.storyboard.edges.map(([a, b]) => `g${a} → g${b}`).join(", ") || "none observed",
  );
  wrap.append(edges);
  return wrap;
}

function tabList(store: AppStore): HTMLElement {
  const doc = store.doc!;
  const nav = el("nav", { class: "tabs" });
  const entries: Array<[string, "summary" | "storyboard" | number]> = [
    ["Summary", "summary"],
    ["Storyboard", "storyboard"],
  ];
  for (const group of doc.storyboard.groups) {
    entries.push([`g${group.group_id} (${group.member_ids.length})`, group.group_id]);
  }
  for (const [label, tab] of entries) {
    const active = store.view.activeTab === tab;
    const item = el("button", { class: active ? "tab active" : "tab" }, label);
    item.addEventListener("click", () => store.setTab(tab));
    nav.append(item);
  }
  return nav;
}

export function render(root: HTMLElement, store: AppStore): void {
  root.textContent = "";
  if (!store.doc) {
    root.append(el("p", { class: "loading" }, "Loading report…"));
    return;
  }
  const doc = store.doc;

  if (store.view.error) {
    const banner = el("div", { class: "error-banner", role: "alert" }, store.view.error);
    banner.append(button("Dismiss", "Dismiss", () => store.dismissError()));
    root.append(banner);
  }

  root.append(
    el(
      "header",
      { class: "app-header" },
      el("h1", {}, `${doc.app_id} accessibility report`),
      el("span", { class: "subtitle" },
         `run ${doc.run_id} · generated ${doc.generated_at} · ` +
         `${doc.summary.app.total} active unique issues`),
    ),
  );

  const layout = el("div", { class: "layout" });
  layout.append(tabList(store));
  const main = el("main", { class: "panel" });

  const tab = store.view.activeTab;
  if (tab === "summary") {
    for (const section of store.summarySections()) {
      main.append(categoryBlock(store, section));
    }
    if (store.summarySections().length === 0) {
      main.append(el("p", { class: "empty" }, "No active issues. Nice."));
    }
    main.append(collapsedSections(store));
  } else if (tab === "storyboard") {
    main.append(storyboardTab(store));
  } else {
    const group = doc.storyboard.groups.find((g) => g.group_id === tab);
    if (group) {
      main.append(
        el(
          "div",
          { class: "group-head" },
          screenThumb(store, group.representative_id, []),
          button("Ignore screen", "Ignore this whole screen in future reports", () => {
            void store.ignoreScreenGroup(group.group_id);
          }, "btn btn-ignore"),
        ),
      );
      const sections = store.groupSections(group.group_id);
      for (const section of sections) {
        main.append(categoryBlock(store, section));
      }
      if (sections.length === 0) {
        main.append(el("p", { class: "empty" }, "No active issues on this screen group."));
      }
    }
  }
  layout.append(main);
  root.append(layout);
}
