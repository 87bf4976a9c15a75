/** Typed fetch client for the service's JSON routes. The console talks to
 * the API through this module and nothing else. */

import type {
  DecisionResult,
  DisplayStatus,
  EngagementDetail,
  EngagementPage,
  Mode,
  PollResult,
  QueueItem,
  Report,
  SeedRequest,
  SeedResult,
  Survival,
} from "./types.js";

/** Server-reported failure: carries the {code, message} envelope the
 * service attaches to every error status. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface DecisionPayload {
  action: "approve" | "edit" | "discard";
  final_body?: string;
  reviewer?: string;
}

export interface ListQuery {
  mode?: Mode;
  status?: DisplayStatus;
  page?: number;
  page_size?: number;
}

export class ApiClient {
  constructor(readonly base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let res: Response;
    try {
      res = await fetch(this.base + path, init);
    } catch (exc) {
      throw new ApiError(0, "unreachable", String(exc));
    }
    if (!res.ok) {
      let code = "error";
      let message = `${res.status} ${res.statusText}`;
      try {
        const body: unknown = await res.json();
        if (body && typeof body === "object") {
          const env = body as { code?: unknown; message?: unknown };
          if (typeof env.code === "string") {
            code = env.code;
          }
          if (typeof env.message === "string") {
            message = env.message;
          }
        }
      } catch {
        // non-JSON error body; the status line is all we have
      }
      throw new ApiError(res.status, code, message);
    }
    return (await res.json()) as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  listEngagements(query: ListQuery = {}): Promise<EngagementPage> {
    const params = new URLSearchParams();
    if (query.mode) params.set("mode", query.mode);
    if (query.status) params.set("status", query.status);
    if (query.page) params.set("page", String(query.page));
    if (query.page_size) params.set("page_size", String(query.page_size));
    const qs = params.toString();
    return this.request(`/engagements${qs ? `?${qs}` : ""}`);
  }

  engagement(id: number): Promise<EngagementDetail> {
    return this.request(`/engagements/${id}`);
  }

  seed(req: SeedRequest): Promise<SeedResult> {
    return this.post("/engagements", req);
  }

  pendingReviews(): Promise<{ items: QueueItem[] }> {
    return this.request("/review/pending");
  }

  decide(suggestionId: number, payload: DecisionPayload): Promise<DecisionResult> {
    return this.post(`/review/${suggestionId}/decision`, payload);
  }

  poll(): Promise<PollResult> {
    return this.post("/poll", {});
  }

  report(query: { mode?: Mode; since?: string } = {}): Promise<Report> {
    const params = new URLSearchParams();
    if (query.mode) params.set("mode", query.mode);
    if (query.since) params.set("since", query.since);
    const qs = params.toString();
    return this.request(`/metrics/report${qs ? `?${qs}` : ""}`);
  }

  survival(mode?: Mode): Promise<Survival> {
    return this.request(`/metrics/survival${mode ? `?mode=${mode}` : ""}`);
  }
}
