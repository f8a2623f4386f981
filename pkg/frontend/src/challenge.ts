/**
 * Challenge mode: step through somebody else's recorded session the way
 * a shoulder surfer saw it — colorings and button presses only, no
 * dashboard — then reveal the crack result fetched from the server.
 */

import { escapeHtml } from "./render.js";

export interface TranscriptClick {
  coloring: string;
  button: number;
}

export interface ChallengeTranscript {
  nButtons: number;
  pinLength: number;
  clicks: TranscriptClick[];
  raw: unknown;
}

export type ParseResult =
  | { ok: true; transcript: ChallengeTranscript }
  | { ok: false; error: string };

/** Structural check of a loaded transcript; schema errors become banners. */
export function parseTranscript(value: unknown): ParseResult {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    return { ok: false, error: "transcript must be a JSON object" };
  }
  const doc = value as Record<string, unknown>;
  if (doc.version !== 1) {
    return { ok: false, error: "unsupported transcript version" };
  }
  const nButtons = doc.n_buttons;
  const pinLength = doc.pin_length;
  if (typeof nButtons !== "number" || nButtons < 2) {
    return { ok: false, error: "bad field: n_buttons" };
  }
  if (typeof pinLength !== "number" || pinLength < 1) {
    return { ok: false, error: "bad field: pin_length" };
  }
  if (!Array.isArray(doc.phases)) {
    return { ok: false, error: "bad field: phases" };
  }
  const clicks: TranscriptClick[] = [];
  for (const [p, phase] of doc.phases.entries()) {
    if (typeof phase !== "object" || phase === null) {
      return { ok: false, error: `bad phase at index ${p}` };
    }
    const phaseClicks = (phase as Record<string, unknown>).clicks;
    if (!Array.isArray(phaseClicks)) {
      return { ok: false, error: `bad clicks in phase ${p}` };
    }
    for (const [c, click] of phaseClicks.entries()) {
      const rec = click as Record<string, unknown>;
      const coloring = rec?.coloring;
      const button = rec?.button;
      if (
        typeof coloring !== "string" ||
        coloring.length !== 10 ||
        [...coloring].some((ch) => ch !== "Y" && ch !== "G")
      ) {
        return { ok: false, error: `bad coloring in phase ${p}, click ${c}` };
      }
      if (typeof button !== "number" || button < 0 || button >= nButtons) {
        return { ok: false, error: `bad button in phase ${p}, click ${c}` };
      }
      clicks.push({ coloring, button });
    }
  }
  return {
    ok: true,
    transcript: { nButtons, pinLength, clicks, raw: value },
  };
}

export interface ChallengeFrame {
  cursor: number;
  totalClicks: number;
  coloring: string | null;
  pressedButton: number | null;
}

/** The observer's view at a cursor; a pure function of (transcript, cursor). */
export function frameAt(
  transcript: ChallengeTranscript,
  cursor: number,
): ChallengeFrame {
  const clamped = Math.max(0, Math.min(cursor, transcript.clicks.length));
  const click = clamped > 0 ? transcript.clicks[clamped - 1] ?? null : null;
  return {
    cursor: clamped,
    totalClicks: transcript.clicks.length,
    coloring: click ? click.coloring : null,
    pressedButton: click ? click.button : null,
  };
}

export interface CrackOutcome {
  unique: boolean;
  pins: string[];
}

export function renderChallenge(
  transcript: ChallengeTranscript,
  frame: ChallengeFrame,
  outcome: CrackOutcome | null,
): string {
  const tiles: string[] = [];
  for (let d = 0; d < 10; d += 1) {
    const symbol = frame.coloring ? frame.coloring[d] ?? "Y" : null;
    const cls = symbol === "Y" ? "yellow" : symbol === "G" ? "grey" : "neutral";
    tiles.push(`<div class="digit-tile ${cls}">${d}</div>`);
  }
  const buttons: string[] = [];
  for (let b = 0; b < transcript.nButtons; b += 1) {
    const pressed = frame.pressedButton === b ? " pressed" : "";
    buttons.push(
      `<button class="pad-button neutral${pressed}" data-observer-button="${b}">${b + 1}</button>`,
    );
  }
  const reveal = outcome
    ? `<p class="crack-result">${
        outcome.unique
          ? `PIN cracked: <strong class="revealed-pin">${escapeHtml(outcome.pins[0] ?? "")}</strong>`
          : `${outcome.pins.length} candidates remain`
      }</p>`
    : "";
  return (
    `<section class="panel challenge">` +
    `<p>click ${frame.cursor} / ${frame.totalClicks}</p>` +
    `<div class="digit-grid">${tiles.join("")}</div>` +
    `<div class="button-pad">${buttons.join("")}</div>` +
    `<div class="challenge-controls">` +
    `<button data-action="step-back">&#8592;</button>` +
    `<button data-action="step-forward">&#8594;</button>` +
    `<button data-action="reveal">reveal</button>` +
    `</div>${reveal}</section>`
  );
}
