/**
 * Browser entry point: wires the WebSocket channel, the entry form, the
 * keyboard and the challenge file picker to the pure reducers/renderers.
 */

import {
  asServerMessage,
  type ClientMessage,
  type ConfigureMessage,
} from "./protocol.js";
import { apply, initialState, localEvent, type UiState } from "./state.js";
import { renderMain } from "./render.js";
import {
  frameAt,
  parseTranscript,
  renderChallenge,
  type ChallengeTranscript,
  type CrackOutcome,
} from "./challenge.js";

let state: UiState = initialState();
let socket: WebSocket | null = null;
let challenge: ChallengeTranscript | null = null;
let challengeCursor = 0;
let challengeOutcome: CrackOutcome | null = null;
let challengeError: string | null = null;

const app = document.getElementById("app") as HTMLElement;
const challengeHost = document.getElementById("challenge") as HTMLElement;

function send(message: ClientMessage): void {
  if (socket && socket.readyState === WebSocket.OPEN) {
    socket.send(JSON.stringify(message));
  }
}

function redraw(): void {
  app.innerHTML = renderMain(state);
  challengeHost.innerHTML = challenge
    ? renderChallenge(challenge, frameAt(challenge, challengeCursor), challengeOutcome)
    : challengeError
      ? `<div class="error-banner">${challengeError}</div>`
      : "";
}

function connect(): void {
  state = localEvent(state, { kind: "connection", status: "connecting" });
  redraw();
  const url = `ws://${location.host}/ws`;
  socket = new WebSocket(url);
  socket.addEventListener("open", () => {
    state = localEvent(state, { kind: "connection", status: "open" });
    configureFromForm();
    redraw();
  });
  socket.addEventListener("message", (event) => {
    const message = asServerMessage(JSON.parse(String(event.data)));
    if (message) {
      state = apply(state, message);
      redraw();
    }
  });
  socket.addEventListener("close", () => {
    state = localEvent(state, { kind: "connection", status: "closed" });
    redraw();
  });
}

function configureFromForm(): void {
  const form = document.getElementById("config-form") as HTMLFormElement;
  const data = new FormData(form);
  const mode = data.get("mode") === "classic" ? "classic" : "selfcal";
  const message: ConfigureMessage = {
    type: "configure",
    mode,
    n_buttons: mode === "classic" ? 2 : Number(data.get("buttons") ?? 9),
    pin_length: Number(data.get("pin_length") ?? 4),
    carryover: data.get("carryover") === "on",
  };
  const seedRaw = String(data.get("seed") ?? "").trim();
  if (seedRaw !== "") {
    message.seed = Number(seedRaw);
  }
  send(message);
}

function pressButton(button: number): void {
  if (!state.padEnabled || !state.view || state.view.status !== "in_progress") {
    return;
  }
  state = localEvent(state, { kind: "click-sent" });
  redraw();
  send({ type: "click", button });
}

app.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  const button = target.closest<HTMLElement>("[data-button]");
  if (button) {
    pressButton(Number(button.dataset.button));
    return;
  }
  if (target.closest("[data-action='reconnect']")) {
    connect();
  }
});

document.addEventListener("keydown", (event) => {
  if (event.key >= "1" && event.key <= "9") {
    const button = Number(event.key) - 1;
    if (state.view && button < state.view.buttons.length) {
      pressButton(button);
    }
  }
});

document.getElementById("toggle-dashboard")?.addEventListener("click", () => {
  state = localEvent(state, { kind: "toggle-dashboard" });
  redraw();
});

document.getElementById("reset")?.addEventListener("click", () => {
  send({ type: "reset" });
});

document.getElementById("config-form")?.addEventListener("submit", (event) => {
  event.preventDefault();
  configureFromForm();
});

document.getElementById("export")?.addEventListener("click", () => {
  send({ type: "export" });
  // the transcript lands in state on the next message; download shortly after
  setTimeout(() => {
    if (!state.transcript) return;
    const blob = new Blob([JSON.stringify(state.transcript, null, 2) + "\n"], {
      type: "application/json",
    });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = "transcript.json";
    link.click();
    URL.revokeObjectURL(link.href);
  }, 150);
});

// --- challenge mode ---------------------------------------------------------

challengeHost.addEventListener("click", async (event) => {
  const target = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
  if (!target || !challenge) return;
  const action = target.dataset.action;
  if (action === "step-back") {
    challengeCursor = Math.max(0, challengeCursor - 1);
  } else if (action === "step-forward") {
    challengeCursor = Math.min(challenge.clicks.length, challengeCursor + 1);
  } else if (action === "reveal") {
    challengeOutcome = await fetchCrack(challenge.raw);
  }
  redraw();
});

async function fetchCrack(document_: unknown): Promise<CrackOutcome | null> {
  try {
    const response = await fetch("/crack", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(document_),
    });
    if (!response.ok) return null;
    const report = (await response.json()) as {
      unique: boolean;
      pin_candidates: string[];
    };
    return { unique: report.unique, pins: report.pin_candidates };
  } catch {
    return null;
  }
}

document.getElementById("transcript-file")?.addEventListener("change", (event) => {
  const input = event.target as HTMLInputElement;
  const file = input.files?.[0];
  if (!file) return;
  const reader = new FileReader();
  reader.onload = () => {
    challengeError = null;
    challengeOutcome = null;
    try {
      const parsed = parseTranscript(JSON.parse(String(reader.result)));
      if (parsed.ok) {
        challenge = parsed.transcript;
        challengeCursor = 0;
      } else {
        challenge = null;
        challengeError = parsed.error;
      }
    } catch {
      challenge = null;
      challengeError = "not valid JSON";
    }
    redraw();
  };
  reader.readAsText(file);
});

connect();
