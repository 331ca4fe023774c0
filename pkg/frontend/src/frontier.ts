/**
 * Cost-efficiency frontier: re-run the current scenario across an SLO
 * sweep and chart each point's winner cost and throughput. Points where
 * the service reports no feasible instance render as gaps; points whose
 * request failed carry the error but never abort the rest of the sweep.
 */

import type { ApiClient } from "./api.js";
import type { ScenarioState } from "./scenario.js";
import { escapeHtml, formatUsd } from "./render.js";

export interface FrontierPoint {
  slo: number;
  winner: string | null;
  billed_cost_usd: number | null;
  tps: number | null;
  error: string | null;
}

export async function runFrontierSweep(
  client: ApiClient,
  state: ScenarioState,
  slos: number[],
): Promise<FrontierPoint[]> {
  const points: FrontierPoint[] = [];
  for (const slo of slos) {
    try {
      const doc = await client.recommendAt(state, slo);
      if (doc.winner === null) {
        points.push({ slo, winner: null, billed_cost_usd: null, tps: null, error: null });
      } else {
        const top = doc.ranking[0];
        points.push({
          slo,
          winner: doc.winner,
          billed_cost_usd: top.cost ? top.cost.billed_cost_usd : null,
          tps: top.tps,
          error: null,
        });
      }
    } catch (err) {
      points.push({
        slo,
        winner: null,
        billed_cost_usd: null,
        tps: null,
        error: err instanceof Error ? err.message : String(err),
      });
    }
  }
  return points;
}

const WIDTH = 640;
const HEIGHT = 240;
const PAD = 40;

/**
 * SVG chart of winner billed cost against the SLO sweep. Each feasible
 * point is clickable (data-slo) to load that scenario and carries a
 * <title> naming the winner for hover.
 */
export function renderFrontier(points: FrontierPoint[]): string {
  const feasible = points.filter((p) => p.winner !== null && p.billed_cost_usd !== null);
  const sloValues = points.map((p) => p.slo);
  const minSlo = Math.min(...sloValues);
  const maxSlo = Math.max(...sloValues);
  const maxCost = Math.max(1e-9, ...feasible.map((p) => p.billed_cost_usd ?? 0));

  const x = (slo: number) =>
    maxSlo === minSlo
      ? WIDTH / 2
      : PAD + ((slo - minSlo) / (maxSlo - minSlo)) * (WIDTH - 2 * PAD);
  const y = (cost: number) => HEIGHT - PAD - (cost / maxCost) * (HEIGHT - 2 * PAD);

  const line = feasible
    .map((p, i) => `${i === 0 ? "M" : "L"}${x(p.slo).toFixed(1)},${y(p.billed_cost_usd!).toFixed(1)}`)
    .join(" ");

  const markers = points
    .map((p) => {
      if (p.error !== null) {
        return `<text class="point-error" x="${x(p.slo).toFixed(1)}" y="${HEIGHT - PAD / 2}"
          text-anchor="middle">!<title>${escapeHtml(`SLO ${p.slo}: ${p.error}`)}</title></text>`;
      }
      if (p.winner === null) {
        return `<rect class="gap" x="${(x(p.slo) - 4).toFixed(1)}" y="${PAD}" width="8"
          height="${HEIGHT - 2 * PAD}"><title>${escapeHtml(
            `SLO ${p.slo}: no feasible instance`,
          )}</title></rect>`;
      }
      return `<circle class="point" data-slo="${p.slo}" data-winner="${escapeHtml(p.winner)}"
        cx="${x(p.slo).toFixed(1)}" cy="${y(p.billed_cost_usd!).toFixed(1)}" r="5">
        <title>${escapeHtml(
          `SLO ${p.slo}: ${p.winner} at ${formatUsd(p.billed_cost_usd!)}`,
        )}</title></circle>`;
    })
    .join("\n");

  return `
    <svg viewBox="0 0 ${WIDTH} ${HEIGHT}" class="frontier" role="img">
      <line class="axis" x1="${PAD}" y1="${HEIGHT - PAD}" x2="${WIDTH - PAD}" y2="${HEIGHT - PAD}"/>
      <line class="axis" x1="${PAD}" y1="${PAD}" x2="${PAD}" y2="${HEIGHT - PAD}"/>
      <path class="cost-line" d="${line}" fill="none"/>
      ${markers}
      <text x="${WIDTH / 2}" y="${HEIGHT - 6}" text-anchor="middle" class="axis-label">SLO (tokens/s)</text>
      <text x="12" y="${HEIGHT / 2}" text-anchor="middle" class="axis-label"
        transform="rotate(-90 12 ${HEIGHT / 2})">winner cost (USD)</text>
    </svg>`;
}
