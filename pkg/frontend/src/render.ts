/**
 * HTML rendering for the ranking view.
 *
 * Every number shown here is a field from the service response; the only
 * client-side transformation is display formatting (fixed decimals, and
 * the offload ratio shown as a percentage).
 */

import type { EvaluationDoc, RecommendDocument } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Offload ratio as a percentage string, e.g. 0.6 -> "60.00%". */
export function formatCOff(cOff: number): string {
  return (100 * cOff).toFixed(2) + "%";
}

export function formatUsd(value: number): string {
  return "$" + value.toFixed(3);
}

export function formatNumber(value: number, decimals = 2): string {
  return value.toFixed(decimals);
}

function rankingRow(entry: EvaluationDoc, winner: string | null): string {
  const isWinner = entry.instance === winner;
  const flags: string[] = [];
  if (entry.uncalibrated) flags.push("uncalibrated");
  if (entry.c_off_forced) flags.push("pinned ratio");
  const cost = entry.cost;
  return `
    <tr class="${isWinner ? "winner" : ""}" data-instance="${escapeHtml(entry.instance)}">
      <td>${isWinner ? "&#9733; " : ""}${escapeHtml(entry.instance)}</td>
      <td>${escapeHtml(entry.gpu_type)}</td>
      <td class="num">${formatUsd(entry.price_per_hour_usd)}/h</td>
      <td class="num">${entry.tps === null ? "&mdash;" : formatNumber(entry.tps)}</td>
      <td class="num">${formatCOff(entry.c_off)}</td>
      <td class="num">${cost ? formatNumber(cost.cost_efficiency_tokens_per_usd) : "&mdash;"}</td>
      <td class="num">${cost ? formatUsd(cost.billed_cost_usd) : "&mdash;"}</td>
      <td class="flags">${escapeHtml(flags.join(", "))}</td>
    </tr>`;
}

export function renderRanking(doc: RecommendDocument): string {
  const parts: string[] = [];

  if (doc.winner === null) {
    parts.push(
      `<div class="empty-state">No feasible instance: ` +
        `<strong>${escapeHtml(doc.no_feasible_cause ?? "unknown cause")}</strong></div>`,
    );
  } else {
    parts.push(`
      <table class="ranking">
        <thead>
          <tr>
            <th>instance</th><th>GPU</th><th>price</th><th>predicted TPS</th>
            <th>C_off (%)</th><th>CE (tokens/$)</th><th>billed</th><th></th>
          </tr>
        </thead>
        <tbody>
          ${doc.ranking.map((entry) => rankingRow(entry, doc.winner)).join("")}
        </tbody>
      </table>`);
  }

  if (doc.rejected.length > 0) {
    parts.push(`
      <div class="rejected">
        <h3>rejected</h3>
        <ul>
          ${doc.rejected
            .map(
              (r) =>
                `<li><code>${escapeHtml(r.instance)}</code> &mdash; ${escapeHtml(r.reason)}</li>`,
            )
            .join("")}
        </ul>
      </div>`);
  }

  return parts.join("\n");
}

export function renderErrors(errors: Record<string, string>): string {
  const items = Object.entries(errors)
    .map(([field, message]) => `<li data-field="${escapeHtml(field)}">${escapeHtml(message)}</li>`)
    .join("");
  return items ? `<ul class="field-errors">${items}</ul>` : "";
}
