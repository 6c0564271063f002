import { ApiClient, ApiError, isJobRecord } from "./api.js";
import {
  exportConfigJson,
  FieldErrors,
  findPreset,
  PRESETS,
  toCalibrateConfig,
  toCurveConfig,
  toSimulateConfig,
  UiScenarioForm,
  validateForm,
} from "./form.js";
import { runPipeline } from "./pipeline.js";
import {
  renderCurveOverlay,
  renderCutoffTable,
  renderOcTable,
  renderProgress,
  renderWeightPreview,
  PreviewPoint,
} from "./render.js";
import type { CurveResult } from "./types.js";

// Same-origin by default; a <meta name="api-base"> tag points the console
// at a service running elsewhere (the API allows cross-origin requests).
function apiBase(): string {
  const meta = document.querySelector<HTMLMetaElement>('meta[name="api-base"]');
  return meta?.content ?? "";
}

const client = new ApiClient({ baseUrl: apiBase() });

// --- top-level banner ------------------------------------------------------

function banner(message: string | null): void {
  const el = document.getElementById("banner")!;
  if (message === null) {
    el.hidden = true;
  } else {
    el.hidden = false;
    el.textContent = message;
  }
}

async function checkHealth(): Promise<void> {
  try {
    await client.health();
    banner(null);
  } catch {
    banner("API unreachable — the form is preserved; retrying on the next action.");
  }
}

// --- one design panel ------------------------------------------------------

interface FieldSpec {
  name: keyof UiScenarioForm | string;
  label: string;
  kind: "number" | "text" | "select" | "json";
  options?: string[];
}

const FIELDS: FieldSpec[] = [
  { name: "endpoint", label: "endpoint", kind: "select", options: ["binary", "normal"] },
  { name: "label", label: "label", kind: "text" },
  { name: "theta", label: "control θ", kind: "number" },
  { name: "n", label: "control n", kind: "number" },
  { name: "theta_t", label: "treatment θ", kind: "number" },
  { name: "n_t", label: "treatment n", kind: "number" },
  { name: "delta", label: "δ (significant difference)", kind: "number" },
  { name: "historicalSource", label: "historical source", kind: "select", options: ["summary", "mixture"] },
  { name: "theta_h", label: "historical θ", kind: "number" },
  { name: "n_h", label: "historical n", kind: "number" },
  { name: "informative", label: "informative mixture (JSON)", kind: "json" },
  { name: "sigma", label: "σ (normal endpoint)", kind: "number" },
  { name: "sigmaMode", label: "σ pooling", kind: "select", options: ["pooled", "current"] },
  { name: "methods", label: "methods (JSON)", kind: "json" },
  { name: "alpha", label: "α", kind: "number" },
  { name: "replicates", label: "replicates", kind: "number" },
  { name: "calibrationReplicates", label: "calibration replicates", kind: "number" },
  { name: "seed", label: "seed", kind: "number" },
];

class Panel {
  private readonly root: HTMLElement;
  private form: UiScenarioForm;
  private running = false;
  private previewTimer: number | undefined;

  constructor(root: HTMLElement, preset: string) {
    this.root = root;
    this.form = findPreset(preset)!.form;
    this.build();
    this.writeInputs();
  }

  private el<T extends HTMLElement>(selector: string): T {
    return this.root.querySelector(selector) as T;
  }

  private build(): void {
    const presetOptions = PRESETS.map(
      (p) => `<option value="${p.id}">${p.id} — ${p.title}</option>`,
    ).join("");
    const fields = FIELDS.map((f) => {
      const control =
        f.kind === "select"
          ? `<select name="${f.name}">${f.options!
              .map((o) => `<option value="${o}">${o}</option>`)
              .join("")}</select>`
          : f.kind === "json"
            ? `<textarea name="${f.name}" rows="3" spellcheck="false"></textarea>`
            : `<input name="${f.name}" type="${f.kind === "number" ? "text" : "text"}" />`;
      return (
        `<label class="field"><span>${f.label}</span>${control}` +
        `<em class="error" data-error-for="${f.name}"></em></label>`
      );
    }).join("");

    this.root.innerHTML = `
      <div class="panel-head">
        <select class="preset">${presetOptions}</select>
        <button class="run">calibrate + simulate</button>
        <button class="export">export JSON</button>
      </div>
      <form class="editor">${fields}</form>
      <div class="preview-box">
        <span class="preview-caption">adaptive weight vs observed control mean (from analyze)</span>
        <div class="preview"></div>
      </div>
      <div class="status"></div>
      <div class="cutoffs"></div>
      <div class="results"></div>
      <div class="sweep">
        <label>second δ for sweep <input class="sweep-delta" type="text" /></label>
        <button class="run-sweep">overlay weight curves</button>
        <div class="sweep-chart"></div>
      </div>`;

    this.el<HTMLSelectElement>(".preset").addEventListener("change", (ev) => {
      const id = (ev.target as HTMLSelectElement).value;
      const preset = findPreset(id);
      if (preset) {
        this.form = preset.form;
        this.writeInputs();
        this.schedulePreview();
      }
    });
    this.el<HTMLElement>(".editor").addEventListener("input", () => {
      this.readInputs();
      this.showErrors(validateForm(this.form));
      this.schedulePreview();
    });
    this.el<HTMLButtonElement>(".run").addEventListener("click", () => void this.run());
    this.el<HTMLButtonElement>(".export").addEventListener("click", () => this.export());
    this.el<HTMLButtonElement>(".run-sweep").addEventListener("click", () => void this.sweep());
  }

  private input(name: string): HTMLInputElement | HTMLSelectElement | HTMLTextAreaElement {
    return this.root.querySelector(`[name="${name}"]`) as HTMLInputElement;
  }

  private writeInputs(): void {
    for (const f of FIELDS) {
      const el = this.input(f.name as string);
      const value = this.form[f.name as keyof UiScenarioForm];
      if (f.kind === "json") {
        el.value = value === null ? "" : JSON.stringify(value, null, 1);
      } else {
        el.value = value === null || value === undefined ? "" : String(value);
      }
    }
    this.el<HTMLSelectElement>(".preset").value = this.presetId() ?? "Table1/1.2";
    this.showErrors(validateForm(this.form));
  }

  private presetId(): string | null {
    const id = PRESETS.find((p) => p.form.label === this.form.label)?.id;
    return id ?? null;
  }

  private readInputs(): void {
    const num = (name: string): number | null => {
      const raw = this.input(name).value.trim();
      if (raw === "") return null;
      const value = Number(raw);
      return Number.isNaN(value) ? null : value;
    };
    const json = <T>(name: string): T | null => {
      const raw = this.input(name).value.trim();
      if (raw === "") return null;
      try {
        return JSON.parse(raw) as T;
      } catch {
        return null;
      }
    };
    this.form = {
      ...this.form,
      endpoint: this.input("endpoint").value as "binary" | "normal",
      label: this.input("label").value,
      theta: num("theta"),
      n: num("n"),
      theta_t: num("theta_t"),
      n_t: num("n_t"),
      delta: num("delta"),
      historicalSource: this.input("historicalSource").value as "summary" | "mixture",
      theta_h: num("theta_h"),
      n_h: num("n_h"),
      informative: json("informative"),
      sigma: num("sigma"),
      sigmaMode: this.input("sigmaMode").value as "pooled" | "current",
      methods: json("methods") ?? [],
      alpha: num("alpha"),
      replicates: num("replicates"),
      calibrationReplicates: num("calibrationReplicates"),
      seed: num("seed"),
    };
  }

  private showErrors(errors: FieldErrors): void {
    for (const el of Array.from(this.root.querySelectorAll<HTMLElement>("[data-error-for]"))) {
      const field = el.dataset.errorFor!;
      const message =
        errors[field] ??
        Object.entries(errors).find(([key]) => key.startsWith(`${field}[`))?.[1] ??
        "";
      el.textContent = message;
    }
  }

  private async run(): Promise<void> {
    const errors = validateForm(this.form);
    this.showErrors(errors);
    if (Object.keys(errors).length > 0 || this.running) return;
    this.running = true;
    const status = this.el<HTMLElement>(".status");
    const cutoffs = this.el<HTMLElement>(".cutoffs");
    const results = this.el<HTMLElement>(".results");
    cutoffs.innerHTML = "";
    results.innerHTML = "";
    const view = await runPipeline(
      client,
      toCalibrateConfig(this.form),
      toSimulateConfig(this.form),
      (v) => {
        status.innerHTML = renderProgress(v.phase, v.progress);
        if (v.cutoffs) cutoffs.innerHTML = renderCutoffTable(v.cutoffs);
        if (v.result) results.innerHTML = renderOcTable(v.result);
        if (v.phase === "failed") {
          status.innerHTML = `<div class="failed">failed: ${v.error ?? "unknown"}</div>`;
        }
      },
    );
    if (view.phase === "failed") void checkHealth();
    this.running = false;
  }

  private export(): void {
    const blob = new Blob([exportConfigJson(this.form)], { type: "application/json" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = `${this.form.label || "scenario"}.json`;
    a.click();
    URL.revokeObjectURL(a.href);
  }

  private async sweep(): Promise<void> {
    const errors = validateForm(this.form);
    this.showErrors(errors);
    if (Object.keys(errors).length > 0) return;
    const raw = this.el<HTMLInputElement>(".sweep-delta").value.trim();
    const second = Number(raw);
    if (raw === "" || Number.isNaN(second) || second <= 0) return;

    const center = this.form.theta_h ?? this.form.theta ?? 0.5;
    const spread = 2 * Math.max(this.form.delta ?? 0, second);
    const grid = { from: center - spread, to: center + spread, points: 17 };
    const chart = this.el<HTMLElement>(".sweep-chart");
    chart.innerHTML = `<span class="muted">fetching curves…</span>`;
    try {
      const [first, secondCurve] = await Promise.all([
        client.weightCurve(toCurveConfig(this.form, grid)),
        client.weightCurve(toCurveConfig(this.form, grid, second)),
      ]);
      if (isJobRecord(first) || isJobRecord(secondCurve)) {
        chart.innerHTML = `<span class="muted">curve queued as a job; shrink the grid for a live overlay</span>`;
        return;
      }
      chart.innerHTML = renderCurveOverlay([
        { label: `δ=${this.form.delta}`, curve: first as CurveResult },
        { label: `δ=${second}`, curve: secondCurve as CurveResult },
      ]);
    } catch (error) {
      chart.innerHTML = `<span class="failed">${
        error instanceof ApiError ? error.message : "API unreachable"
      }</span>`;
      void checkHealth();
    }
  }

  private schedulePreview(): void {
    window.clearTimeout(this.previewTimer);
    this.previewTimer = window.setTimeout(() => void this.preview(), 350);
  }

  // Live what-if: how the adaptive weight responds to the observed control
  // mean at the current delta. Weights come from analyze, point by point.
  private async preview(): Promise<void> {
    const { theta_h, delta, n } = this.form;
    if (theta_h === null || delta === null || n === null) return;
    const sigma = this.form.sigma ?? 1;
    const target = this.el<HTMLElement>(".preview");
    const ybars = Array.from({ length: 11 }, (_, i) => theta_h - 2 * delta + (i * 4 * delta) / 10);
    try {
      const reports = await Promise.all(
        ybars.map((ybar) =>
          client.analyze({
            endpoint: "normal",
            method: { kind: "sam" },
            delta,
            historical: { mean: theta_h, sd: sigma, n: this.form.n_h ?? n },
            control: { mean: ybar, sd: sigma, n },
            treatment: { mean: ybar, sd: sigma, n },
          }),
        ),
      );
      const points: PreviewPoint[] = reports.map((r, i) => ({
        ybar: ybars[i],
        w: r.sam_weight?.w ?? 0,
      }));
      target.innerHTML = renderWeightPreview(points);
      banner(null);
    } catch (error) {
      if (!(error instanceof ApiError)) void checkHealth();
    }
  }
}

function boot(): void {
  const panels = Array.from(document.querySelectorAll<HTMLElement>(".panel"));
  new Panel(panels[0], "Table1/1.2");
  new Panel(panels[1], "Table2/2.2");
  void checkHealth();
}

document.addEventListener("DOMContentLoaded", boot);
