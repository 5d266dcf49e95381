import type {
  CandidatePair,
  Census,
  ClusterPage,
  ClusterSummary,
  JudgmentAck,
  PatchDetail,
  Verdict,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = (await response.json()) as { error?: string };
    if (body.error) message = body.error;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(response.status, message);
}

/** Typed client for the review service; every view reads through this. */
export class ApiClient {
  constructor(private readonly base: string = "") {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(this.base + path);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  clusters(page: number, pageSize = 50): Promise<ClusterPage> {
    return this.getJson(`/api/clusters?page=${page}&page_size=${pageSize}`);
  }

  census(): Promise<Census> {
    return this.getJson(`/api/census`);
  }

  cluster(id: string): Promise<ClusterSummary> {
    return this.getJson(`/api/cluster/${encodeURIComponent(id)}`);
  }

  patch(id: string): Promise<PatchDetail> {
    return this.getJson(`/api/patch/${encodeURIComponent(id)}`);
  }

  candidates(limit = 25): Promise<CandidatePair[]> {
    return this.getJson(`/api/candidates?limit=${limit}`);
  }

  async judge(a: string, b: string, verdict: Verdict): Promise<JudgmentAck> {
    const response = await fetch(`${this.base}/api/judgment`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ a, b, verdict }),
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as JudgmentAck;
  }

  groundtruthUrl(): string {
    return `${this.base}/api/export/groundtruth`;
  }
}
