/**
 * Message types spoken by the session bridge, verbatim.
 *
 * The client renders what the server says and nothing more: every digit
 * tint, evidence dot and strike-through in the UI originates from a
 * `state` message.
 */

export interface PinProgress {
  committed: number;
  length: number;
}

export interface DashboardRow {
  digit: number;
  /** Per button: "", "Y", "G" or "YG" (both colors seen = eliminated). */
  dots: string[];
  consistent: boolean;
}

export interface StateMessage {
  type: "state";
  pin: PinProgress;
  digit_colors: string;
  buttons: (string | null)[];
  dashboard: DashboardRow[];
  status: "in_progress" | "all_inconsistent" | "capped" | "complete";
}

export interface HelloMessage {
  type: "hello";
  version: number;
}

export interface CommittedMessage {
  type: "committed";
  index: number;
}

export interface CompleteMessage {
  type: "complete";
  pin: string;
  mapping: (string | null)[];
}

export interface ErrorMessage {
  type: "error";
  code: string;
  text: string;
}

export interface TranscriptMessage {
  type: "transcript";
  document: unknown;
}

export type ServerMessage =
  | HelloMessage
  | StateMessage
  | CommittedMessage
  | CompleteMessage
  | ErrorMessage
  | TranscriptMessage;

export interface ConfigureMessage {
  type: "configure";
  mode?: "selfcal" | "classic";
  n_buttons?: number;
  pin_length?: number;
  seed?: number;
  policy?: "random_balanced" | "bisect";
  carryover?: boolean;
}

export type ClientMessage =
  | ConfigureMessage
  | { type: "click"; button: number }
  | { type: "reset" }
  | { type: "export" };

const SERVER_TYPES = new Set([
  "hello",
  "state",
  "committed",
  "complete",
  "error",
  "transcript",
]);

/** Narrow a decoded JSON value to a ServerMessage, or null if alien. */
export function asServerMessage(value: unknown): ServerMessage | null {
  if (typeof value !== "object" || value === null) {
    return null;
  }
  const type = (value as { type?: unknown }).type;
  if (typeof type !== "string" || !SERVER_TYPES.has(type)) {
    return null;
  }
  return value as ServerMessage;
}
