/** Session flow: open/resume, fetch bundles in server order, submit, retry.
 *
 * The controller never reorders or revisits faces; the server's cursor is
 * the only source of display order. The session id persists in storage so a
 * page refresh resumes exactly where the server says, without duplicate
 * submissions (the server additionally acks identical re-submits).
 */

import { ApiError, NetworkError, RatingApi } from "./api.js";
import {
  cuePayload,
  initialState,
  showBundle,
  showComplete,
  submitEnabled,
  type RatingFormState,
} from "./state.js";
import type { CueName } from "./types.js";

export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

const SESSION_KEY = "fatiguescope.session_id";

export class SessionController {
  readonly state: RatingFormState = initialState();
  sessionId: string | null = null;
  private pending: { faceId: string; cues: Record<CueName, number> } | null = null;

  constructor(
    private readonly api: RatingApi,
    private readonly storage: KeyValueStore,
    private readonly onChange: (state: RatingFormState) => void = () => {},
  ) {}

  private notify(): void {
    this.onChange(this.state);
  }

  /** Resume the stored session if the server still knows it, else open anew. */
  async start(raterId: string, seed: number): Promise<void> {
    const stored = this.storage.getItem(SESSION_KEY);
    if (stored !== null) {
      try {
        await this.api.progress(stored);
        this.sessionId = stored;
        await this.loadNext();
        return;
      } catch (err) {
        if (err instanceof NetworkError) {
          throw err;
        }
        this.storage.removeItem(SESSION_KEY); // stale id: open a fresh session
      }
    }
    const info = await this.api.openSession(raterId, seed);
    this.sessionId = info.session_id;
    this.storage.setItem(SESSION_KEY, info.session_id);
    await this.loadNext();
  }

  async loadNext(): Promise<void> {
    if (this.sessionId === null) {
      throw new Error("session not started");
    }
    const next = await this.api.next(this.sessionId);
    if (next.complete) {
      showComplete(this.state, next.cursor, next.total);
    } else {
      showBundle(this.state, next);
    }
    this.notify();
  }

  /** Submit the current form; on ack advance, on errors keep every input. */
  async submit(): Promise<void> {
    if (!submitEnabled(this.state) || this.sessionId === null || !this.state.bundle) {
      return;
    }
    this.pending = {
      faceId: this.state.bundle.face_id,
      cues: cuePayload(this.state),
    };
    await this.send();
  }

  /** Re-send the exact pending payload (idempotent server-side). */
  async retry(): Promise<void> {
    if (this.pending === null) {
      return;
    }
    await this.send();
  }

  private async send(): Promise<void> {
    if (this.pending === null || this.sessionId === null) {
      return;
    }
    this.state.status = { kind: "submitting" };
    this.notify();
    try {
      await this.api.submitRating(this.sessionId, this.pending.faceId, this.pending.cues);
    } catch (err) {
      if (err instanceof NetworkError) {
        // Inputs and pending payload are retained; the user retries.
        this.state.status = { kind: "network-error", reason: err.message };
      } else if (err instanceof ApiError && err.cue !== null) {
        this.state.status = { kind: "cue-error", cue: err.cue, reason: err.message };
        this.pending = null;
      } else {
        const reason = err instanceof Error ? err.message : String(err);
        this.state.status = { kind: "session-error", reason };
        this.pending = null;
      }
      this.notify();
      return;
    }
    this.pending = null;
    await this.loadNext();
  }
}

export { SESSION_KEY };
