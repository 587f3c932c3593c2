/** Wire types for the rating service API and the eight cue names. */

export const CUE_NAMES = [
  "hanging_eyelids",
  "red_eyes",
  "dark_circles",
  "pale_skin",
  "droopy_corner_mouth",
  "swollen_eyes",
  "glazed_eyes",
  "wrinkles",
] as const;

export type CueName = (typeof CUE_NAMES)[number];

export const CUE_LABELS: Record<CueName, string> = {
  hanging_eyelids: "Hanging eyelids",
  red_eyes: "Red eyes",
  dark_circles: "Dark circles",
  pale_skin: "Pale skin",
  droopy_corner_mouth: "Droopy corner mouth",
  swollen_eyes: "Swollen eyes",
  glazed_eyes: "Glazed eyes",
  wrinkles: "Wrinkles around eyes",
};

export const RATING_MIN = 0;
export const RATING_MAX = 4;

export interface SessionInfo {
  session_id: string;
  total: number;
}

export interface FaceBundle {
  complete: false;
  face_id: string;
  primary: string;
  references: string[];
  cues: string[];
  insufficient_references: boolean;
  cursor: number;
  total: number;
}

export interface SessionComplete {
  complete: true;
  cursor: number;
  total: number;
}

export type NextResponse = FaceBundle | SessionComplete;

export interface Progress {
  cursor: number;
  total: number;
}

export interface SubmitAck {
  status: "ok";
  duplicate: boolean;
  cursor: number;
  total: number;
}

export interface ApiErrorBody {
  error: { cue: string | null; reason: string };
}
