/** HTML string builders for the panel's regions. */

import { DocumentTab, HuntResultView, PanelState } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderResultsGrid(results: HuntResultView[], selected: number | null): string {
  if (results.length === 0) {
    return '<div class="no-results">No results yet. Hit refresh to hunt.</div>';
  }
  const cells = results
    .map((result, index) => {
      const cls = index === selected ? "result-cell selected" : "result-cell";
      return `
        <figure class="${cls}" data-index="${index}" data-rank="${result.rank}">
          <img class="thumb" src="${escapeHtml(result.link)}" alt="result ${result.rank}">
          <figcaption>#${result.rank}</figcaption>
        </figure>`;
    })
    .join("");
  return `<div class="results-grid">${cells}</div>`;
}

export function renderCreditLines(creditLines: string[]): string {
  if (creditLines.length === 0) return "";
  const rows = creditLines
    .map((line) => `<li class="credit-line">${escapeHtml(line)}</li>`)
    .join("");
  return `<ul class="credits">${rows}</ul>`;
}

export function renderDocumentTabs(documents: DocumentTab[], active: number): string {
  return documents
    .map((doc, index) => {
      const cls = index === active ? "doc-tab active" : "doc-tab";
      return `<button class="${cls}" data-doc="${index}">${escapeHtml(doc.title)}</button>`;
    })
    .join("");
}

export function renderCanvas(state: PanelState): string {
  const doc = state.documents[state.activeDocument];
  if (!doc || !doc.pngB64) {
    return '<div class="canvas-empty">No document open.</div>';
  }
  return `<img class="canvas-image" width="${doc.width}" height="${doc.height}"
    src="data:image/png;base64,${doc.pngB64}" alt="${escapeHtml(doc.title)}">`;
}

export function renderNotice(notice: string | null): string {
  return notice ? `<div class="notice" role="alert">${escapeHtml(notice)}</div>` : "";
}
