// Shapes of the report server's JSON documents.

export interface BBox {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface Occurrence {
  capture_id: string;
  issue_id: string;
  bbox: BBox;
}

export interface UniqueIssue {
  unique_id: string;
  group_id: number;
  category: string;
  check_name: string;
  message: string;
  status: string;
  anchor: { capture_id: string; detection_id: string | null; bbox: BBox };
  occurrences: Occurrence[];
}

export interface CountBlock {
  total: number;
  by_category: Record<string, number>;
  by_check: Record<string, Record<string, number>>;
}

export interface ScreenMeta {
  capture_id: string;
  ordinal: number;
  width: number;
  height: number;
  group_id: number | null;
  file: string;
}

export interface StoryboardGroup {
  group_id: number;
  member_ids: string[];
  representative_id: string;
}

export interface GroupIssues {
  group_id: number;
  issues: Record<string, Record<string, UniqueIssue[]>>;
}

export interface ReportDoc {
  app_id: string;
  run_id: string;
  generated_at: string;
  similarity: { mode: string; threshold: number };
  bundle_dir: string | null;
  storyboard: { groups: StoryboardGroup[]; edges: [number, number][] };
  screens: ScreenMeta[];
  groups: GroupIssues[];
  summary: { app: CountBlock; per_group: Record<string, CountBlock> };
  ignored: UniqueIssue[];
  hidden: UniqueIssue[];
  fix_info: Record<string, string>;
}

export type IgnoreScope = "issue" | "check_name" | "category" | "screen";

export interface IgnorePayload {
  scope: IgnoreScope;
  unique_id?: string;
  check_name?: string;
  category?: string;
  capture_id?: string;
  group_id?: number;
}

export interface IgnoreRecordSummary {
  ignore_id: string;
  app_id: string;
  scope: IgnoreScope;
  check_name: string | null;
  category: string | null;
  active: boolean;
  created_at: string;
  has_fingerprint: boolean;
  snapshot_capture_id: string | null;
}
