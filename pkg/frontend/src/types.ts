/**
 * Wire-format types for the planning service under /api/v1.
 *
 * These mirror the service's JSON documents exactly; the explorer never
 * computes planning numbers itself, it only displays fields from here.
 */

export interface ModelEntry {
  name: string;
  param_count: number;
  hidden_size: number;
  intermediate_size: number;
  num_heads: number;
  head_dim: number;
  num_layers: number;
  precision_bytes: number;
}

export interface WorkloadEcho {
  batch_size: number;
  input_tokens: number;
  output_tokens: number;
  total_requests: number;
  slo_tps: number;
  max_price_per_hour: number;
}

export interface MemoryDoc {
  model_bytes: number;
  activation_bytes: number;
  kv_cache_bytes: number;
  kv_cache_per_layer_bytes: number;
  total_bytes: number;
  base_bytes: number;
  available_bytes: number;
  gpu_memory_bytes: number;
}

export interface PhaseDoc {
  compute_s: number;
  compute_calibrated_s: number;
  transfer_s: number;
  layer_time_s: number;
}

export interface TimingDoc {
  prefill: PhaseDoc;
  decode: PhaseDoc;
  t_task_s: number;
}

export interface CostDoc {
  tps_effective: number;
  job_tokens: number;
  job_duration_s: number;
  billed_hours: number;
  billed_cost_usd: number;
  ce_hours: number;
  cost_efficiency_tokens_per_usd: number;
}

export interface EvaluationDoc {
  instance: string;
  gpu_type: string;
  price_per_hour_usd: number;
  status: string;
  verdict: string;
  reason: string | null;
  c_off: number;
  c_off_forced: boolean;
  uncalibrated: boolean;
  memory: MemoryDoc;
  timing: TimingDoc | null;
  tps: number | null;
  cost: CostDoc | null;
  warnings: string[];
}

export interface RecommendDocument {
  schema_version: number;
  inputs: {
    model: ModelEntry;
    workload: WorkloadEcho;
    catalog: string;
    calibration: string;
    policy: "infersave" | "max-perf";
    disable_offloading: boolean;
    only_calibrated: boolean;
    c_off_overrides: Record<string, number>;
  };
  winner: string | null;
  no_feasible_cause: string | null;
  ranking: EvaluationDoc[];
  rejected: { instance: string; reason: string }[];
}

export interface CatalogResponse {
  source: string;
  instances: {
    name: string;
    gpu_type: string;
    price_per_hour_usd: number;
    gpu_memory_gb: number;
    fp16_tflops: number;
  }[];
}

export interface ModelsResponse {
  models: ModelEntry[];
}
