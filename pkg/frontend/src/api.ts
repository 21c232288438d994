import type { IgnorePayload, IgnoreRecordSummary, ReportDoc } from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    detail: string,
  ) {
    super(`API error ${status}: ${detail}`);
  }
}

async function parseError(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: string };
    return body.detail ?? response.statusText;
  } catch {
    return response.statusText;
  }
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      throw new ApiError(response.status, await parseError(response));
    }
    return (await response.json()) as T;
  }

  getReport(): Promise<ReportDoc> {
    return this.request<ReportDoc>("/api/report");
  }

  listIgnores(): Promise<IgnoreRecordSummary[]> {
    return this.request<IgnoreRecordSummary[]>("/api/ignores");
  }

  addIgnore(payload: IgnorePayload): Promise<{ ignore_id: string }> {
    return this.request("/api/ignores", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  removeIgnore(ignoreId: string): Promise<{ removed: string }> {
    return this.request(`/api/ignores/${ignoreId}`, { method: "DELETE" });
  }

  regenerate(full = false): Promise<{ generated_at: string }> {
    return this.request("/api/regenerate", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ full }),
    });
  }

  fileBug(uniqueId: string, title = "", notes = ""): Promise<{ bug_id: string }> {
    return this.request("/api/bugs", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ unique_id: uniqueId, title, notes }),
    });
  }

  screenUrl(captureId: string): string {
    return `${this.baseUrl}/api/screens/${captureId}.png`;
  }
}
