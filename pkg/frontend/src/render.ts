import type { CalibrateResult, CurveResult, OcRow, SimulateResult } from "./types.js";

// Rendering is deliberately dumb: every number shown is the payload value
// passed through String(), so what the table displays is exactly what the
// API returned. The only arithmetic here maps data coordinates onto SVG
// pixels.

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function formatCell(value: number | string | null): string {
  return value === null ? "" : escapeHtml(String(value));
}

export const OC_COLUMNS: (keyof OcRow)[] = [
  "scenario_label",
  "method",
  "cutoff",
  "rejection_rate",
  "bias",
  "mse",
  "relative_bias",
  "relative_mse",
  "mean_weight",
  "replicates",
  "seed",
];

export function renderOcTable(result: SimulateResult): string {
  const head = OC_COLUMNS.map((c) => `<th>${c}</th>`).join("");
  const body = result.rows
    .map((row) => {
      const cells = OC_COLUMNS.map((c) => `<td>${formatCell(row[c])}</td>`).join("");
      return `<tr>${cells}</tr>`;
    })
    .join("");
  return (
    `<table class="oc-table"><thead><tr>${head}</tr></thead>` +
    `<tbody>${body}</tbody></table>`
  );
}

export function renderCutoffTable(result: CalibrateResult): string {
  const rows = result.cutoffs
    .map(
      (c) =>
        `<tr><td>${formatCell(c.method)}</td><td>${formatCell(c.cutoff)}</td>` +
        `<td>${formatCell(c.alpha_target)}</td><td>${formatCell(c.replicates)}</td></tr>`,
    )
    .join("");
  return (
    `<table class="cutoff-table"><caption>cutoffs on ${escapeHtml(result.null_label)}</caption>` +
    `<thead><tr><th>method</th><th>cutoff</th><th>alpha target</th><th>replicates</th></tr></thead>` +
    `<tbody>${rows}</tbody></table>`
  );
}

export interface CurveSeries {
  label: string;
  curve: CurveResult;
}

const CURVE_COLORS = ["#2563eb", "#dc2626", "#059669", "#d97706"];

interface Viewport {
  width: number;
  height: number;
  pad: number;
}

function scale(
  values: number[],
  lo: number,
  hi: number,
  pixelLo: number,
  pixelHi: number,
): number[] {
  const span = hi - lo || 1;
  return values.map((v) => pixelLo + ((v - lo) / span) * (pixelHi - pixelLo));
}

// Overlay of one mean-weight curve per series. The raw payload arrays ride
// along as data attributes so the DOM itself carries the verbatim data.
export function renderCurveOverlay(
  series: CurveSeries[],
  viewport: Viewport = { width: 480, height: 260, pad: 36 },
): string {
  const { width, height, pad } = viewport;
  const thetas = series.flatMap((s) => s.curve.theta);
  const lo = Math.min(...thetas);
  const hi = Math.max(...thetas);

  const lines = series.map((s, i) => {
    const xs = scale(s.curve.theta, lo, hi, pad, width - pad);
    const ys = scale(s.curve.mean_w, 0, 1, height - pad, pad);
    const points = xs.map((x, k) => `${x.toFixed(2)},${ys[k].toFixed(2)}`).join(" ");
    const color = CURVE_COLORS[i % CURVE_COLORS.length];
    return (
      `<polyline fill="none" stroke="${color}" stroke-width="2" points="${points}" ` +
      `data-label="${escapeHtml(s.label)}" ` +
      `data-theta='${JSON.stringify(s.curve.theta)}' ` +
      `data-mean-w='${JSON.stringify(s.curve.mean_w)}'></polyline>`
    );
  });

  const legend = series.map((s, i) => {
    const color = CURVE_COLORS[i % CURVE_COLORS.length];
    const y = 16 + 16 * i;
    return (
      `<circle cx="${width - pad - 90}" cy="${y}" r="4" fill="${color}"></circle>` +
      `<text x="${width - pad - 80}" y="${y + 4}" class="legend">${escapeHtml(s.label)}</text>`
    );
  });

  const axis =
    `<line x1="${pad}" y1="${height - pad}" x2="${width - pad}" y2="${height - pad}" class="axis"></line>` +
    `<line x1="${pad}" y1="${pad}" x2="${pad}" y2="${height - pad}" class="axis"></line>` +
    `<text x="${width / 2}" y="${height - 8}" class="axis-label">true control value</text>` +
    `<text x="12" y="${height / 2}" class="axis-label" transform="rotate(-90 12 ${height / 2})">mean weight</text>`;

  return (
    `<svg viewBox="0 0 ${width} ${height}" class="curve-overlay" role="img">` +
    axis +
    lines.join("") +
    legend.join("") +
    `</svg>`
  );
}

export interface PreviewPoint {
  ybar: number;
  w: number;
}

// Sparkline for the debounced delta preview; points arrive from analyze
// calls, one per ybar.
export function renderWeightPreview(
  points: PreviewPoint[],
  viewport: Viewport = { width: 320, height: 90, pad: 8 },
): string {
  if (points.length === 0) return `<svg class="weight-preview"></svg>`;
  const { width, height, pad } = viewport;
  const xs = scale(points.map((p) => p.ybar), points[0].ybar, points[points.length - 1].ybar, pad, width - pad);
  const ys = scale(points.map((p) => p.w), 0, 1, height - pad, pad);
  const path = xs.map((x, i) => `${x.toFixed(2)},${ys[i].toFixed(2)}`).join(" ");
  return (
    `<svg viewBox="0 0 ${width} ${height}" class="weight-preview" role="img">` +
    `<polyline fill="none" stroke="#2563eb" stroke-width="1.5" points="${path}" ` +
    `data-w='${JSON.stringify(points.map((p) => p.w))}'></polyline>` +
    `</svg>`
  );
}

export function renderProgress(phase: string, progress: number): string {
  const percent = Math.round(progress * 100);
  return (
    `<div class="progress" data-phase="${escapeHtml(phase)}">` +
    `<div class="progress-bar" style="width:${percent}%"></div>` +
    `<span class="progress-text">${escapeHtml(phase)} ${percent}%</span></div>`
  );
}
