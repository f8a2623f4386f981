/**
 * UI state: the latest server view plus purely local concerns.
 *
 * `apply` is a pure reducer over server messages; `localEvent` covers
 * things the server never sees (dashboard toggle, pad disabling while a
 * click is in flight, connection status).
 */

import type {
  CompleteMessage,
  ErrorMessage,
  ServerMessage,
  StateMessage,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "open" | "closed";

export interface UiState {
  connection: ConnectionStatus;
  serverVersion: number | null;
  view: StateMessage | null;
  complete: CompleteMessage | null;
  lastError: ErrorMessage | null;
  committedCount: number;
  dashboardVisible: boolean;
  /** False between sending a click and receiving the next state. */
  padEnabled: boolean;
  transcript: unknown | null;
}

export function initialState(): UiState {
  return {
    connection: "connecting",
    serverVersion: null,
    view: null,
    complete: null,
    lastError: null,
    committedCount: 0,
    dashboardVisible: false,
    padEnabled: true,
    transcript: null,
  };
}

export function apply(state: UiState, msg: ServerMessage): UiState {
  switch (msg.type) {
    case "hello":
      return { ...state, serverVersion: msg.version };
    case "state":
      return {
        ...state,
        view: msg,
        committedCount: msg.pin.committed,
        padEnabled: true,
        lastError: null,
        // a fresh configure wipes any previous session's reveal
        complete: msg.pin.committed === 0 && msg.status === "in_progress"
          ? null
          : state.complete,
      };
    case "committed":
      return { ...state, committedCount: msg.index + 1 };
    case "complete":
      return { ...state, complete: msg };
    case "error":
      return { ...state, lastError: msg, padEnabled: true };
    case "transcript":
      return { ...state, transcript: msg.document };
  }
}

export type LocalEvent =
  | { kind: "click-sent" }
  | { kind: "toggle-dashboard" }
  | { kind: "connection"; status: ConnectionStatus };

export function localEvent(state: UiState, event: LocalEvent): UiState {
  switch (event.kind) {
    case "click-sent":
      return { ...state, padEnabled: false };
    case "toggle-dashboard":
      return { ...state, dashboardVisible: !state.dashboardVisible };
    case "connection":
      return { ...state, connection: event.status };
  }
}

export function applyAll(state: UiState, messages: ServerMessage[]): UiState {
  return messages.reduce(apply, state);
}
