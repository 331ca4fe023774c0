/**
 * DOM bootstrap: binds the control panel, ranking table, and frontier
 * chart together. All planning numbers come from the service; this file
 * only moves strings between the controller and the page.
 */

import { ApiClient } from "./api.js";
import { ExplorerController } from "./controller.js";
import { runFrontierSweep, renderFrontier } from "./frontier.js";
import { renderErrors, renderRanking } from "./render.js";
import {
  DEFAULT_SCENARIO,
  PolicyChoice,
  ScenarioState,
  decodeScenario,
  encodeScenario,
} from "./scenario.js";

const NUMERIC_FIELDS = [
  "batch_size",
  "input_tokens",
  "output_tokens",
  "total_requests",
  "slo_tps",
  "max_price_per_hour",
] as const;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const client = new ApiClient("", (url, init) => fetch(url, init));
  const initial: ScenarioState = window.location.search
    ? decodeScenario(window.location.search.slice(1))
    : DEFAULT_SCENARIO;
  const controller = new ExplorerController(client, 250, initial);

  const ranking = el<HTMLDivElement>("ranking");
  const errors = el<HTMLDivElement>("errors");
  const status = el<HTMLSpanElement>("status");
  const frontier = el<HTMLDivElement>("frontier");

  const modelSelect = el<HTMLSelectElement>("field-model");
  try {
    const models = await client.models();
    modelSelect.innerHTML = models.models
      .map((m) => `<option value="${m.name}">${m.name}</option>`)
      .join("");
  } catch {
    modelSelect.innerHTML = `<option value="${initial.model}">${initial.model}</option>`;
  }

  function syncControls(state: ScenarioState): void {
    modelSelect.value = state.model;
    for (const field of NUMERIC_FIELDS) {
      el<HTMLInputElement>(`field-${field}`).value = String(state[field]);
    }
    el<HTMLSelectElement>("field-policy").value = state.policy;
  }

  controller.onChange((view) => {
    errors.innerHTML = renderErrors(view.errors as Record<string, string>);
    status.textContent = view.pending
      ? "planning..."
      : view.requestError
        ? `request failed: ${view.requestError}`
        : "";
    if (view.document) {
      ranking.innerHTML = renderRanking(view.document);
    }
    window.history.replaceState(null, "", "?" + encodeScenario(view.state));
  });

  modelSelect.addEventListener("change", () =>
    controller.update({ model: modelSelect.value }),
  );
  for (const field of NUMERIC_FIELDS) {
    const input = el<HTMLInputElement>(`field-${field}`);
    input.addEventListener("input", () =>
      controller.update({ [field]: Number(input.value) } as Partial<ScenarioState>),
    );
  }
  const policy = el<HTMLSelectElement>("field-policy");
  policy.addEventListener("change", () =>
    controller.update({ policy: policy.value as PolicyChoice }),
  );

  el<HTMLButtonElement>("sweep-button").addEventListener("click", async () => {
    const from = Number(el<HTMLInputElement>("sweep-from").value);
    const to = Number(el<HTMLInputElement>("sweep-to").value);
    const step = Number(el<HTMLInputElement>("sweep-step").value);
    if (!(from > 0) || !(to >= from) || !(step > 0)) return;
    const slos: number[] = [];
    for (let s = from; s <= to + 1e-9; s += step) slos.push(s);
    frontier.innerHTML = `<p class="muted">sweeping ${slos.length} points...</p>`;
    const points = await runFrontierSweep(client, controller.currentState(), slos);
    frontier.innerHTML = renderFrontier(points);
    frontier.querySelectorAll<SVGCircleElement>("circle.point").forEach((node) => {
      node.addEventListener("click", () => {
        const slo = Number(node.dataset.slo);
        const next = { ...controller.currentState(), slo_tps: slo };
        syncControls(next);
        void controller.load(next);
      });
    });
  });

  syncControls(initial);
  await controller.load(initial);
}

void boot();
