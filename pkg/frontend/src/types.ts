// Payload shapes for the sam-prior HTTP API. These mirror the server's
// JSON schemas and report builders field for field; the UI renders them
// verbatim and never derives statistics of its own.

export interface MixtureComponent {
  w: number;
  a?: number;
  b?: number;
  m?: number;
  v?: number;
}

export interface MixtureConfig {
  family: "beta" | "normal";
  components: MixtureComponent[];
}

export interface ScenarioConfig {
  endpoint: "binary" | "normal";
  theta: number;
  n: number;
  theta_t: number;
  n_t: number;
  delta: number;
  theta_h?: number;
  n_h?: number;
  informative?: MixtureConfig;
  sigma?: number;
  vague?: MixtureConfig;
  sigma_mode?: "pooled" | "current";
  label?: string;
}

export interface MethodConfig {
  kind: string;
  w_tilde?: number;
  gamma_grid?: number;
}

export interface SimulateConfig {
  scenarios: ScenarioConfig[];
  methods: MethodConfig[];
  alpha?: number;
  replicates?: number;
  calibration_replicates?: number;
  seed?: number;
  calibration_seed?: number;
  threads?: number;
}

export interface CalibrateConfig {
  scenario: ScenarioConfig;
  methods: MethodConfig[];
  alpha?: number;
  replicates?: number;
  seed?: number;
  threads?: number;
}

export type ThetaGrid = number[] | { from: number; to: number; points: number };

export interface CurveConfig {
  scenario: ScenarioConfig;
  theta_grid: ThetaGrid;
  replicates?: number;
  seed?: number;
}

export interface BinarySummaryConfig {
  x: number;
  n: number;
}

export interface NormalSummaryConfig {
  n: number;
  mean: number;
  sd?: number;
}

export interface AnalyzeConfig {
  endpoint: "binary" | "normal";
  method: MethodConfig;
  control: BinarySummaryConfig | NormalSummaryConfig;
  treatment: BinarySummaryConfig | NormalSummaryConfig;
  historical?: BinarySummaryConfig | NormalSummaryConfig;
  informative?: MixtureConfig;
  vague?: MixtureConfig;
  delta?: number;
  cutoff?: number;
  sigma_mode?: "pooled" | "current";
}

export interface SamWeightRecord {
  log_r: number;
  w: number;
  theta_h_hat: number;
  delta: number;
  side_used: string;
}

export interface AnalyzeReport {
  endpoint: string;
  method: MethodConfig;
  posterior_control: MixtureConfig;
  posterior_treatment: MixtureConfig;
  sam_weight: SamWeightRecord | null;
  prob_superiority: number;
  cutoff: number;
  reject: boolean;
  control_mean: number;
  treatment_mean: number;
  seed: null;
  replicates: null;
  software_version: string;
}

export interface OcRow {
  scenario_label: string;
  method: string;
  cutoff: number;
  rejection_rate: number;
  bias: number;
  mse: number;
  relative_bias: number | null;
  relative_mse: number | null;
  mean_weight: number | null;
  replicates: number;
  seed: number;
}

export interface SimulateResult {
  rows: OcRow[];
  alpha: number;
  seed: number;
  replicates: number;
  calibration_replicates: number;
  software_version: string;
}

export interface CutoffEntry {
  method: string;
  cutoff: number;
  alpha_target: number;
  replicates: number;
  seed: number;
}

export interface CalibrateResult {
  scenario_label: string;
  null_label: string;
  cutoffs: CutoffEntry[];
  seed: number;
  replicates: number;
  software_version: string;
}

export interface CurveResult {
  scenario_label: string;
  theta: number[];
  mean_w: number[];
  seed: number;
  replicates: number;
  software_version: string;
}

export type JobStatus = "queued" | "running" | "done" | "failed";

export interface JobRecord {
  id: string;
  kind: string;
  status: JobStatus;
  progress: number;
  result_ref: string | null;
  submitted_at: string;
  finished_at: string | null;
  error: string | null;
  seed?: number;
  replicates?: number;
  software_version?: string;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  field_path: string;
}
