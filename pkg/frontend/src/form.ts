import type {
  CalibrateConfig,
  CurveConfig,
  MethodConfig,
  MixtureConfig,
  ScenarioConfig,
  SimulateConfig,
  ThetaGrid,
} from "./types.js";

// Editable mirror of one scenario plus the run settings. Numeric fields
// are null while blank so validation can distinguish "missing" from 0.

export interface UiScenarioForm {
  endpoint: "binary" | "normal";
  label: string;
  theta: number | null;
  n: number | null;
  theta_t: number | null;
  n_t: number | null;
  delta: number | null;
  historicalSource: "summary" | "mixture";
  theta_h: number | null;
  n_h: number | null;
  informative: MixtureConfig | null;
  sigma: number | null;
  sigmaMode: "pooled" | "current";
  methods: MethodConfig[];
  alpha: number | null;
  replicates: number | null;
  calibrationReplicates: number | null;
  seed: number | null;
}

export type FieldErrors = Partial<Record<string, string>>;

const MAX_SEED = Number.MAX_SAFE_INTEGER;

function isInt(value: number): boolean {
  return Number.isInteger(value);
}

function checkMixture(mix: MixtureConfig, errors: FieldErrors, field: string): void {
  if (mix.components.length === 0) {
    errors[field] = "at least one component";
    return;
  }
  let total = 0;
  for (const comp of mix.components) {
    total += comp.w;
    if (mix.family === "beta") {
      if (!(comp.a !== undefined && comp.a > 0) || !(comp.b !== undefined && comp.b > 0)) {
        errors[field] = "beta components need a > 0 and b > 0";
        return;
      }
    } else if (comp.m === undefined || !(comp.v !== undefined && comp.v > 0)) {
      errors[field] = "normal components need m and v > 0";
      return;
    }
  }
  if (Math.abs(total - 1) > 1e-9) {
    errors[field] = `weights must sum to 1, got ${total}`;
  }
}

// Mirrors the server-side schema and scenario rules so invalid fields are
// flagged inline before any request is made.
export function validateForm(form: UiScenarioForm): FieldErrors {
  const errors: FieldErrors = {};
  const binary = form.endpoint === "binary";

  const rate = (name: string, value: number | null, required = true) => {
    if (value === null) {
      if (required) errors[name] = "required";
      return;
    }
    if (!Number.isFinite(value)) errors[name] = "must be a number";
    else if (binary && (value < 0 || value > 1)) errors[name] = "must be in [0, 1]";
  };
  const count = (name: string, value: number | null, minimum: number) => {
    if (value === null) errors[name] = "required";
    else if (!isInt(value) || value < minimum) errors[name] = `integer >= ${minimum}`;
  };

  rate("theta", form.theta);
  rate("theta_t", form.theta_t);
  count("n", form.n, 1);
  count("n_t", form.n_t, 1);

  if (form.delta === null) errors.delta = "required";
  else if (!(form.delta > 0)) errors.delta = "must be > 0";

  if (form.historicalSource === "summary") {
    if (form.theta_h === null) errors.theta_h = "required";
    else if (binary && !(form.theta_h > 0 && form.theta_h < 1)) {
      errors.theta_h = "must be inside (0, 1)";
    }
    count("n_h", form.n_h, 1);
  } else if (form.informative === null) {
    errors.informative = "required";
  } else {
    checkMixture(form.informative, errors, "informative");
  }

  if (!binary) {
    if (form.sigma === null) errors.sigma = "required";
    else if (!(form.sigma > 0)) errors.sigma = "must be > 0";
  }

  if (form.methods.length === 0) errors.methods = "pick at least one method";
  form.methods.forEach((m, i) => {
    const field = `methods[${i}]`;
    if (!m.kind) {
      errors[field] = "method kind required";
    } else if (m.kind === "mix") {
      if (m.w_tilde === undefined || !(m.w_tilde >= 0 && m.w_tilde <= 1)) {
        errors[field] = "mix needs w_tilde in [0, 1]";
      }
    } else if (m.w_tilde !== undefined) {
      errors[field] = "w_tilde only applies to mix";
    } else if (m.kind !== "pp" && m.gamma_grid !== undefined) {
      errors[field] = "gamma_grid only applies to pp";
    } else if (m.kind === "pp" && m.gamma_grid !== undefined && (!isInt(m.gamma_grid) || m.gamma_grid < 2)) {
      errors[field] = "gamma_grid must be an integer >= 2";
    }
  });

  if (form.alpha === null) errors.alpha = "required";
  else if (!(form.alpha > 0 && form.alpha < 1)) errors.alpha = "must be inside (0, 1)";
  count("replicates", form.replicates, 1);
  count("calibrationReplicates", form.calibrationReplicates, 1000);
  if (form.seed === null) errors.seed = "required";
  else if (!isInt(form.seed) || form.seed < 0 || form.seed > MAX_SEED) {
    errors.seed = `integer in [0, ${MAX_SEED}]`;
  }

  return errors;
}

export function toScenarioConfig(form: UiScenarioForm): ScenarioConfig {
  const scenario: ScenarioConfig = {
    endpoint: form.endpoint,
    theta: form.theta ?? NaN,
    n: form.n ?? NaN,
    theta_t: form.theta_t ?? NaN,
    n_t: form.n_t ?? NaN,
    delta: form.delta ?? NaN,
  };
  if (form.historicalSource === "summary") {
    scenario.theta_h = form.theta_h ?? NaN;
    scenario.n_h = form.n_h ?? NaN;
  } else if (form.informative !== null) {
    scenario.informative = structuredClone(form.informative);
  }
  if (form.endpoint === "normal") scenario.sigma = form.sigma ?? NaN;
  if (form.sigmaMode !== "pooled") scenario.sigma_mode = form.sigmaMode;
  if (form.label) scenario.label = form.label;
  return scenario;
}

export function toSimulateConfig(form: UiScenarioForm): SimulateConfig {
  return {
    scenarios: [toScenarioConfig(form)],
    methods: form.methods.map((m) => ({ ...m })),
    alpha: form.alpha ?? NaN,
    replicates: form.replicates ?? NaN,
    calibration_replicates: form.calibrationReplicates ?? NaN,
    seed: form.seed ?? NaN,
  };
}

export function toCalibrateConfig(form: UiScenarioForm): CalibrateConfig {
  return {
    scenario: toScenarioConfig(form),
    methods: form.methods.map((m) => ({ ...m })),
    alpha: form.alpha ?? NaN,
    replicates: form.calibrationReplicates ?? NaN,
    seed: form.seed ?? NaN,
  };
}

export function toCurveConfig(
  form: UiScenarioForm,
  grid: ThetaGrid,
  delta?: number,
): CurveConfig {
  const scenario = toScenarioConfig(form);
  if (delta !== undefined) scenario.delta = delta;
  return {
    scenario,
    theta_grid: grid,
    replicates: Math.min(form.replicates ?? 2000, 2000),
    seed: form.seed ?? 0,
  };
}

export function fromSimulateConfig(config: SimulateConfig): UiScenarioForm {
  const scenario = config.scenarios[0];
  return {
    endpoint: scenario.endpoint,
    label: scenario.label ?? "",
    theta: scenario.theta,
    n: scenario.n,
    theta_t: scenario.theta_t,
    n_t: scenario.n_t,
    delta: scenario.delta,
    historicalSource: scenario.informative ? "mixture" : "summary",
    theta_h: scenario.theta_h ?? null,
    n_h: scenario.n_h ?? null,
    informative: scenario.informative ? structuredClone(scenario.informative) : null,
    sigma: scenario.sigma ?? null,
    sigmaMode: scenario.sigma_mode ?? "pooled",
    methods: config.methods.map((m) => ({ ...m })),
    alpha: config.alpha ?? 0.05,
    replicates: config.replicates ?? 2000,
    calibrationReplicates: config.calibration_replicates ?? 10_000,
    seed: config.seed ?? 0,
  };
}

export function exportConfigJson(form: UiScenarioForm): string {
  return JSON.stringify(toSimulateConfig(form), null, 2);
}

// --- Presets -------------------------------------------------------------

export interface Preset {
  id: string;
  title: string;
  form: UiScenarioForm;
}

const GRID_METHODS: MethodConfig[] = [
  { kind: "np" },
  { kind: "sam" },
  { kind: "mix", w_tilde: 0.5 },
  { kind: "pp" },
];

const APPLICATION_METHODS: MethodConfig[] = [
  { kind: "np" },
  { kind: "sam" },
  { kind: "mix", w_tilde: 0.5 },
  { kind: "mix", w_tilde: 0.9 },
];

export const APPLICATION_INFORMATIVE: MixtureConfig = {
  family: "beta",
  components: [
    { w: 0.63, a: 42.5, b: 77.2 },
    { w: 0.37, a: 7.2, b: 12.4 },
  ],
};

function base(form: Partial<UiScenarioForm>): UiScenarioForm {
  return {
    endpoint: "binary",
    label: "",
    theta: null,
    n: null,
    theta_t: null,
    n_t: null,
    delta: null,
    historicalSource: "summary",
    theta_h: null,
    n_h: null,
    informative: null,
    sigma: null,
    sigmaMode: "pooled",
    methods: GRID_METHODS.map((m) => ({ ...m })),
    alpha: 0.05,
    replicates: 2000,
    calibrationReplicates: 10_000,
    seed: 0,
    ...form,
  };
}

function binaryRow(row: string, theta: number, thetaT: number): Preset {
  return {
    id: `Table1/${row}`,
    title: `Binary grid ${row}: control ${theta}, treatment ${thetaT}`,
    form: base({
      label: row,
      theta,
      theta_t: thetaT,
      n: 150,
      n_t: 300,
      delta: 0.1,
      theta_h: 0.4,
      n_h: 300,
    }),
  };
}

function normalRow(row: string, theta: number, thetaT: number): Preset {
  return {
    id: `Table2/${row}`,
    title: `Normal grid ${row}: control ${theta}, treatment ${thetaT}`,
    form: base({
      endpoint: "normal",
      label: row,
      theta,
      theta_t: thetaT,
      n: 30,
      n_t: 60,
      delta: 1.5,
      theta_h: 0,
      n_h: 60,
      sigma: 3,
    }),
  };
}

function applicationRow(row: string, theta: number, thetaT: number): Preset {
  return {
    id: `Application/${row}`,
    title: `Application ${row}: control ${theta}, treatment ${thetaT}`,
    form: base({
      label: `app-${row}`,
      theta,
      theta_t: thetaT,
      n: 35,
      n_t: 70,
      delta: 0.2,
      historicalSource: "mixture",
      informative: structuredClone(APPLICATION_INFORMATIVE),
      methods: APPLICATION_METHODS.map((m) => ({ ...m })),
    }),
  };
}

export const PRESETS: Preset[] = [
  binaryRow("1.1", 0.4, 0.4),
  binaryRow("1.2", 0.4, 0.5),
  binaryRow("1.3", 0.41, 0.51),
  binaryRow("1.4", 0.38, 0.48),
  binaryRow("1.5", 0.5, 0.5),
  binaryRow("1.6", 0.55, 0.55),
  binaryRow("1.7", 0.3, 0.4),
  binaryRow("1.8", 0.25, 0.35),
  normalRow("2.1", 0, 0),
  normalRow("2.2", 0, 1.5),
  normalRow("2.3", -0.2, 1.3),
  normalRow("2.4", 0.1, 1.6),
  normalRow("2.5", 1.5, 1.5),
  normalRow("2.6", 1.8, 1.8),
  normalRow("2.7", -1.5, 0),
  normalRow("2.8", -1.8, -0.3),
  applicationRow("1", 0.36, 0.36),
  applicationRow("2", 0.36, 0.56),
  applicationRow("3", 0.37, 0.57),
  applicationRow("4", 0.34, 0.54),
  applicationRow("5", 0.56, 0.56),
  applicationRow("6", 0.61, 0.61),
  applicationRow("7", 0.16, 0.36),
  applicationRow("8", 0.11, 0.31),
];

export function findPreset(id: string): Preset | undefined {
  const preset = PRESETS.find((p) => p.id === id);
  return preset && { ...preset, form: structuredClone(preset.form) };
}
