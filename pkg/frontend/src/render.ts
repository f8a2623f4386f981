/**
 * Pure renderers: UI state in, HTML string out.
 *
 * Everything shown comes off the latest server state message; these
 * functions never recompute eliminations or mappings locally, which
 * keeps the client honest and the renderers trivially testable.
 */

import type { StateMessage } from "./protocol.js";
import type { UiState } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function colorClass(symbol: string | null): string {
  if (symbol === "Y") return "yellow";
  if (symbol === "G") return "grey";
  return "neutral";
}

export function renderPinPanel(state: UiState): string {
  const view = state.view;
  if (!view) return `<section class="panel pin-panel"></section>`;
  const cells: string[] = [];
  for (let i = 0; i < view.pin.length; i += 1) {
    if (state.complete && i < state.complete.pin.length) {
      cells.push(
        `<span class="pin-slot revealed">${escapeHtml(state.complete.pin[i] ?? "")}</span>`,
      );
    } else if (i < state.committedCount) {
      cells.push(`<span class="pin-slot filled">&#9679;</span>`);
    } else {
      cells.push(`<span class="pin-slot empty">&#9675;</span>`);
    }
  }
  const status = `<span class="status status-${view.status}">${view.status.replace("_", " ")}</span>`;
  return `<section class="panel pin-panel">${cells.join("")}${status}</section>`;
}

export function renderDigitGrid(state: UiState): string {
  const view = state.view;
  if (!view) return `<section class="panel digit-grid"></section>`;
  const tiles: string[] = [];
  for (let d = 0; d < 10; d += 1) {
    const symbol = view.digit_colors[d] ?? "Y";
    tiles.push(
      `<div class="digit-tile ${colorClass(symbol)}" data-digit="${d}">${d}</div>`,
    );
  }
  return `<section class="panel digit-grid">${tiles.join("")}</section>`;
}

export function renderButtonPad(state: UiState): string {
  const view = state.view;
  if (!view) return `<section class="panel button-pad"></section>`;
  const disabled = state.padEnabled && view.status === "in_progress" ? "" : " disabled";
  const buttons = view.buttons
    .map((assigned, index) => {
      const label = assigned ? "" : String(index + 1);
      return (
        `<button class="pad-button ${colorClass(assigned)}"` +
        ` data-button="${index}"${disabled}>${label}</button>`
      );
    })
    .join("");
  return `<section class="panel button-pad" data-buttons="${view.buttons.length}">${buttons}</section>`;
}

export function renderDashboard(view: StateMessage): string {
  const header = view.buttons
    .map((_, index) => `<th>b${index + 1}</th>`)
    .join("");
  const rows = view.dashboard
    .map((row) => {
      const cells = row.dots
        .map((dots) => {
          const marks = [...dots]
            .map((symbol) => `<span class="dot ${colorClass(symbol)}"></span>`)
            .join("");
          return `<td>${marks}</td>`;
        })
        .join("");
      const cls = row.consistent ? "alive" : "eliminated";
      return `<tr class="${cls}"><th>${row.digit}</th>${cells}</tr>`;
    })
    .join("");
  return (
    `<section class="panel dashboard"><table>` +
    `<thead><tr><th></th>${header}</tr></thead>` +
    `<tbody>${rows}</tbody></table></section>`
  );
}

export function renderReveal(state: UiState): string {
  if (!state.complete) return "";
  const mapping = state.complete.mapping
    .map((symbol, index) => {
      return `<span class="pad-button small ${colorClass(symbol)}">${index + 1}</span>`;
    })
    .join("");
  return (
    `<section class="panel reveal">` +
    `<p>PIN <strong class="revealed-pin">${escapeHtml(state.complete.pin)}</strong></p>` +
    `<p>your button colors</p><div class="mapping">${mapping}</div></section>`
  );
}

export function renderErrorBanner(state: UiState): string {
  if (!state.lastError) return "";
  const { code, text } = state.lastError;
  return `<div class="error-banner" data-code="${escapeHtml(code)}">${escapeHtml(text)}</div>`;
}

export function renderConnectionOverlay(state: UiState): string {
  if (state.connection === "open") return "";
  const label = state.connection === "connecting" ? "connecting…" : "disconnected";
  return (
    `<div class="overlay"><p>${label}</p>` +
    `<button data-action="reconnect">reconnect</button></div>`
  );
}

/** The three-panel layout: PIN on top, digit grid, then the button pad. */
export function renderMain(state: UiState): string {
  const dashboard =
    state.dashboardVisible && state.view ? renderDashboard(state.view) : "";
  return (
    renderConnectionOverlay(state) +
    renderErrorBanner(state) +
    renderPinPanel(state) +
    renderDigitGrid(state) +
    renderButtonPad(state) +
    renderReveal(state) +
    dashboard
  );
}
