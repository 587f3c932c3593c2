/** Thin typed client over the rating service HTTP JSON API. */

import type {
  ApiErrorBody,
  CueName,
  NextResponse,
  Progress,
  SessionInfo,
  SubmitAck,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Server-reported rejection (4xx with an {error:{cue,reason}} body). */
export class ApiError extends Error {
  readonly cue: string | null;
  readonly status: number;

  constructor(status: number, cue: string | null, reason: string) {
    super(reason);
    this.status = status;
    this.cue = cue;
  }
}

/** Transport failure: nothing reached the server (safe to retry as-is). */
export class NetworkError extends Error {}

export class RatingApi {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn: FetchLike = (...args) => fetch(...args)) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  imageUrl(path: string): string {
    return path.startsWith("http") ? path : this.baseUrl + path;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, {
        method,
        headers: body === undefined ? {} : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new NetworkError(err instanceof Error ? err.message : String(err));
    }
    if (!response.ok) {
      let cue: string | null = null;
      let reason = `HTTP ${response.status}`;
      try {
        const parsed = (await response.json()) as Partial<ApiErrorBody> & {
          detail?: string;
        };
        if (parsed.error) {
          cue = parsed.error.cue;
          reason = parsed.error.reason;
        } else if (parsed.detail) {
          reason = parsed.detail;
        }
      } catch {
        // keep the HTTP status as the reason
      }
      throw new ApiError(response.status, cue, reason);
    }
    return (await response.json()) as T;
  }

  openSession(raterId: string, seed: number): Promise<SessionInfo> {
    return this.request<SessionInfo>("POST", "/sessions", {
      rater_id: raterId,
      seed,
    });
  }

  next(sessionId: string): Promise<NextResponse> {
    return this.request<NextResponse>("GET", `/sessions/${sessionId}/next`);
  }

  progress(sessionId: string): Promise<Progress> {
    return this.request<Progress>("GET", `/sessions/${sessionId}/progress`);
  }

  submitRating(
    sessionId: string,
    faceId: string,
    cues: Record<CueName, number>,
  ): Promise<SubmitAck> {
    return this.request<SubmitAck>("POST", `/sessions/${sessionId}/ratings`, {
      face_id: faceId,
      cues,
    });
  }
}
