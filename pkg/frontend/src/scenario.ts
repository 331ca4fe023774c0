/**
 * Scenario state: the control-panel values, their validation, their
 * translation to a /recommend request body, and URL query encoding so a
 * what-if can be shared as a link.
 */

import type { RecommendDocument } from "./types.js";

/** The policy toggle; "no-offload" is the baseline that forbids offloading. */
export type PolicyChoice = "infersave" | "no-offload" | "max-perf";

export interface ScenarioState {
  model: string;
  batch_size: number;
  input_tokens: number;
  output_tokens: number;
  total_requests: number;
  slo_tps: number;
  max_price_per_hour: number;
  policy: PolicyChoice;
}

export const DEFAULT_SCENARIO: ScenarioState = {
  model: "opt-2.7b",
  batch_size: 32,
  input_tokens: 128,
  output_tokens: 512,
  total_requests: 3000,
  slo_tps: 400,
  max_price_per_hour: 3.0,
  policy: "infersave",
};

export type FieldErrors = Partial<Record<keyof ScenarioState, string>>;

/** Mirror of the service-side invariants; failures block submission. */
export function validateScenario(state: ScenarioState): FieldErrors {
  const errors: FieldErrors = {};
  if (!state.model) errors.model = "choose a model";
  if (!Number.isInteger(state.batch_size) || state.batch_size < 1) {
    errors.batch_size = "batch size must be a positive integer";
  }
  if (!Number.isInteger(state.input_tokens) || state.input_tokens < 1) {
    errors.input_tokens = "input tokens must be a positive integer";
  }
  if (!Number.isInteger(state.output_tokens) || state.output_tokens < 1) {
    errors.output_tokens = "output tokens must be a positive integer";
  }
  if (!Number.isInteger(state.total_requests) || state.total_requests < 1) {
    errors.total_requests = "requests must be a positive integer";
  } else if (
    Number.isInteger(state.batch_size) &&
    state.batch_size >= 1 &&
    state.total_requests < state.batch_size
  ) {
    errors.total_requests = "requests must cover at least one batch";
  }
  if (!(state.slo_tps > 0)) errors.slo_tps = "SLO must be positive";
  if (!(state.max_price_per_hour > 0)) {
    errors.max_price_per_hour = "price cap must be positive";
  }
  return errors;
}

/** Request body for POST /api/v1/recommend. */
export function toRequestBody(state: ScenarioState): Record<string, unknown> {
  return {
    model: state.model,
    batch_size: state.batch_size,
    input_tokens: state.input_tokens,
    output_tokens: state.output_tokens,
    total_requests: state.total_requests,
    slo_tps: state.slo_tps,
    max_price_per_hour: state.max_price_per_hour,
    policy: state.policy === "max-perf" ? "max-perf" : "infersave",
    disable_offloading: state.policy === "no-offload",
  };
}

/**
 * True when a response's input echo corresponds to this control state.
 * Responses that fail the match are stale and must be discarded.
 */
export function echoMatches(state: ScenarioState, doc: RecommendDocument): boolean {
  const wl = doc.inputs.workload;
  return (
    doc.inputs.model.name === state.model &&
    wl.batch_size === state.batch_size &&
    wl.input_tokens === state.input_tokens &&
    wl.output_tokens === state.output_tokens &&
    wl.total_requests === state.total_requests &&
    wl.slo_tps === state.slo_tps &&
    wl.max_price_per_hour === state.max_price_per_hour &&
    doc.inputs.policy === (state.policy === "max-perf" ? "max-perf" : "infersave") &&
    doc.inputs.disable_offloading === (state.policy === "no-offload")
  );
}

const QUERY_KEYS: [keyof ScenarioState, string][] = [
  ["model", "model"],
  ["batch_size", "bs"],
  ["input_tokens", "in"],
  ["output_tokens", "out"],
  ["total_requests", "req"],
  ["slo_tps", "slo"],
  ["max_price_per_hour", "pmax"],
  ["policy", "policy"],
];

export function encodeScenario(state: ScenarioState): string {
  const params = new URLSearchParams();
  for (const [field, key] of QUERY_KEYS) {
    params.set(key, String(state[field]));
  }
  return params.toString();
}

export function decodeScenario(query: string): ScenarioState {
  const params = new URLSearchParams(query);
  const state: ScenarioState = { ...DEFAULT_SCENARIO };
  for (const [field, key] of QUERY_KEYS) {
    const raw = params.get(key);
    if (raw === null) continue;
    if (field === "model") {
      state.model = raw;
    } else if (field === "policy") {
      if (raw === "infersave" || raw === "no-offload" || raw === "max-perf") {
        state.policy = raw;
      }
    } else {
      const value = Number(raw);
      if (Number.isFinite(value)) {
        (state[field] as number) = value;
      }
    }
  }
  return state;
}
