/**
 * Stub planning service for end-to-end explorer tests.
 *
 * Implements the FetchLike surface and answers /api/v1/recommend with
 * wire-format documents for the reference scenarios, echoing the request
 * exactly as the real service does. Responses can be gated on deferred
 * promises to exercise stale-response handling.
 */

import type { FetchLike } from "../src/api.js";
import type {
  EvaluationDoc,
  ModelEntry,
  RecommendDocument,
  WorkloadEcho,
} from "../src/types.js";

const MODEL_ENTRY: ModelEntry = {
  name: "opt-2.7b",
  param_count: 2_700_000_000,
  hidden_size: 2560,
  intermediate_size: 10240,
  num_heads: 32,
  head_dim: 80,
  num_layers: 32,
  precision_bytes: 2,
};

interface Row {
  instance: string;
  gpu_type: string;
  price: number;
  tps: number;
  c_off: number;
  ce: number;
  billed: number;
  forced?: boolean;
}

/** Online chatbot scenario, measured in the 400-TPS run. */
const ONLINE_400: Row[] = [
  { instance: "g4dn.xlarge", gpu_type: "T4", price: 0.71, tps: 620.17, c_off: 0, ce: 1014084.51, billed: 0.71 },
  { instance: "g6.xlarge", gpu_type: "L4", price: 1.167, tps: 802.19, c_off: 0, ce: 616966.58, billed: 1.167 },
  { instance: "g5.xlarge", gpu_type: "A10G", price: 1.466, tps: 1206.12, c_off: 0, ce: 491132.33, billed: 1.466 },
  { instance: "g6e.xlarge", gpu_type: "L40s", price: 2.699, tps: 1506.54, c_off: 0, ce: 266765.47, billed: 2.699 },
];

/** Same workload, 600-TPS run; the cheapest card was screened out. */
const ONLINE_600: Row[] = [
  { instance: "g6.xlarge", gpu_type: "L4", price: 1.167, tps: 800.15, c_off: 0, ce: 1850899.74, billed: 1.167 },
  { instance: "g5.xlarge", gpu_type: "A10G", price: 1.466, tps: 1206.12, c_off: 0, ce: 1473397.0, billed: 1.466 },
  { instance: "g6e.xlarge", gpu_type: "L40s", price: 2.699, tps: 1505.37, c_off: 0, ce: 800296.41, billed: 2.699 },
];

/** Offline batch scenario with the published pinned offload ratios. */
const OFFLINE_100: Row[] = [
  { instance: "g4dn.xlarge", gpu_type: "T4", price: 0.71, tps: 169.17, c_off: 1.0, ce: 126760.56, billed: 2.13, forced: true },
  { instance: "g6.xlarge", gpu_type: "L4", price: 1.167, tps: 415.04, c_off: 0.6, ce: 77120.82, billed: 2.344, forced: true },
  { instance: "g5.xlarge", gpu_type: "A10G", price: 1.466, tps: 414.01, c_off: 0.6, ce: 61391.54, billed: 2.932, forced: true },
  { instance: "g6e.xlarge", gpu_type: "L40s", price: 2.699, tps: 1506.54, c_off: 0, ce: 33345.68, billed: 2.699 },
];

function evaluation(row: Row): EvaluationDoc {
  return {
    instance: row.instance,
    gpu_type: row.gpu_type,
    price_per_hour_usd: row.price,
    status: "ranked",
    verdict: row.c_off > 0 ? "partial-offload" : "no-offload",
    reason: null,
    c_off: row.c_off,
    c_off_forced: row.forced ?? false,
    uncalibrated: false,
    memory: {
      model_bytes: 5_400_000_000,
      activation_bytes: 188_743_680,
      kv_cache_bytes: 12_079_595_520,
      kv_cache_per_layer_bytes: 377_487_360,
      total_bytes: 17_668_339_200,
      base_bytes: 5_588_743_680,
      available_bytes: 10_411_256_320,
      gpu_memory_bytes: 16_000_000_000,
    },
    timing: {
      prefill: { compute_s: 0.08, compute_calibrated_s: 0.08, transfer_s: 0, layer_time_s: 0.08 },
      decode: { compute_s: 0.001, compute_calibrated_s: 0.001, transfer_s: 0, layer_time_s: 0.001 },
      t_task_s: 33.0,
    },
    tps: row.tps,
    cost: {
      tps_effective: row.tps,
      job_tokens: 1_920_000,
      job_duration_s: 3104.0,
      billed_hours: Math.max(1, Math.round(row.billed / row.price)),
      billed_cost_usd: row.billed,
      ce_hours: 1.333,
      cost_efficiency_tokens_per_usd: row.ce,
    },
    warnings: [],
  };
}

function document(
  workload: WorkloadEcho,
  policy: "infersave" | "max-perf",
  disableOffloading: boolean,
  rows: Row[],
  rejected: { instance: string; reason: string }[],
): RecommendDocument {
  const ranking =
    policy === "max-perf" ? [...rows].sort((a, b) => b.tps - a.tps) : rows;
  return {
    schema_version: 1,
    inputs: {
      model: MODEL_ENTRY,
      workload,
      catalog: "aws-table3",
      calibration: "stub",
      policy,
      disable_offloading: disableOffloading,
      only_calibrated: false,
      c_off_overrides: {},
    },
    winner: ranking.length > 0 ? ranking[0].instance : null,
    no_feasible_cause: ranking.length > 0 ? null : "all below SLO",
    ranking: ranking.map(evaluation),
    rejected,
  };
}

export interface StubOptions {
  /** SLO values whose requests should fail with a network-style error. */
  failSlos?: number[];
  /** Gate responses on externally resolved promises, in request order. */
  gates?: Promise<void>[];
}

export class StubService {
  readonly requests: Record<string, unknown>[] = [];
  private gateIndex = 0;

  constructor(private readonly options: StubOptions = {}) {}

  /** Pick the scenario table for a request body. */
  private rows(body: Record<string, unknown>): {
    rows: Row[];
    rejected: { instance: string; reason: string }[];
  } {
    const slo = body.slo_tps as number;
    const offline = (body.input_tokens as number) > (body.output_tokens as number);
    if (offline) {
      if (slo <= 100) return { rows: OFFLINE_100, rejected: [] };
      return {
        rows: OFFLINE_100.filter((r) => r.tps >= slo),
        rejected: OFFLINE_100.filter((r) => r.tps < slo).map((r) => ({
          instance: r.instance,
          reason: "below SLO",
        })),
      };
    }
    if (slo <= 400) return { rows: ONLINE_400, rejected: [] };
    if (slo <= 600) {
      return {
        rows: ONLINE_600,
        rejected: [{ instance: "g4dn.xlarge", reason: "no calibration data" }],
      };
    }
    return {
      rows: [],
      rejected: ONLINE_400.map((r) => ({ instance: r.instance, reason: "below SLO" })),
    };
  }

  fetch: FetchLike = async (url, init) => {
    if (!url.endsWith("/api/v1/recommend") || !init?.body) {
      return { ok: false, status: 404, json: async () => ({ detail: "not found" }) };
    }
    const body = JSON.parse(init.body) as Record<string, unknown>;
    this.requests.push(body);

    const gate = this.options.gates?.[this.gateIndex];
    this.gateIndex += 1;
    if (gate) await gate;

    if (this.options.failSlos?.includes(body.slo_tps as number)) {
      throw new Error(`stub refused SLO ${body.slo_tps}`);
    }

    const workload: WorkloadEcho = {
      batch_size: body.batch_size as number,
      input_tokens: body.input_tokens as number,
      output_tokens: body.output_tokens as number,
      total_requests: body.total_requests as number,
      slo_tps: body.slo_tps as number,
      max_price_per_hour: body.max_price_per_hour as number,
    };
    const policy = body.policy as "infersave" | "max-perf";
    const { rows, rejected } = this.rows(body);
    const doc = document(
      workload,
      policy,
      body.disable_offloading as boolean,
      rows,
      rejected,
    );
    return { ok: true, status: 200, json: async () => doc };
  };
}
