/** Rating form state: eight cue inputs that can only ever hold integers 0-4. */

import {
  CUE_NAMES,
  RATING_MAX,
  RATING_MIN,
  type CueName,
  type FaceBundle,
} from "./types.js";

export type SubmissionStatus =
  | { kind: "idle" }
  | { kind: "submitting" }
  | { kind: "cue-error"; cue: string; reason: string }
  | { kind: "network-error"; reason: string }
  | { kind: "session-error"; reason: string };

export interface RatingFormState {
  bundle: FaceBundle | null;
  complete: boolean;
  cues: Partial<Record<CueName, number>>;
  status: SubmissionStatus;
  progress: { cursor: number; total: number };
}

export function initialState(): RatingFormState {
  return {
    bundle: null,
    complete: false,
    cues: {},
    status: { kind: "idle" },
    progress: { cursor: 0, total: 0 },
  };
}

/**
 * Coerce any input to the legal rating range: non-finite values are ignored,
 * everything else is rounded to the nearest integer and clamped into 0..4.
 * This is the single write path for cue values, so no UI interaction can
 * produce an out-of-range rating.
 */
export function clampRating(raw: number): number | null {
  if (!Number.isFinite(raw)) {
    return null;
  }
  const rounded = Math.round(raw);
  return Math.min(RATING_MAX, Math.max(RATING_MIN, rounded));
}

export function setCue(state: RatingFormState, cue: CueName, raw: number): void {
  const value = clampRating(raw);
  if (value === null) {
    return;
  }
  state.cues[cue] = value;
  if (state.status.kind === "cue-error" && state.status.cue === cue) {
    state.status = { kind: "idle" };
  }
}

export function stepCue(state: RatingFormState, cue: CueName, delta: number): void {
  const current = state.cues[cue];
  setCue(state, cue, (current ?? RATING_MIN) + delta);
}

export function allCuesSet(state: RatingFormState): boolean {
  return CUE_NAMES.every((cue) => state.cues[cue] !== undefined);
}

/** Submit is enabled only with a face on screen and all eight cues set. */
export function submitEnabled(state: RatingFormState): boolean {
  return (
    state.bundle !== null &&
    !state.complete &&
    allCuesSet(state) &&
    state.status.kind !== "submitting"
  );
}

export function cuePayload(state: RatingFormState): Record<CueName, number> {
  if (!allCuesSet(state)) {
    throw new Error("not all cues are set");
  }
  const payload = {} as Record<CueName, number>;
  for (const cue of CUE_NAMES) {
    payload[cue] = state.cues[cue]!;
  }
  return payload;
}

export function showBundle(state: RatingFormState, bundle: FaceBundle): void {
  state.bundle = bundle;
  state.complete = false;
  state.cues = {};
  state.status = { kind: "idle" };
  state.progress = { cursor: bundle.cursor, total: bundle.total };
}

export function showComplete(state: RatingFormState, cursor: number, total: number): void {
  state.bundle = null;
  state.complete = true;
  state.cues = {};
  state.status = { kind: "idle" };
  state.progress = { cursor, total };
}
