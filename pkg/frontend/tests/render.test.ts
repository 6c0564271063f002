import { describe, expect, it } from "vitest";

import {
  escapeHtml,
  formatCell,
  OC_COLUMNS,
  renderCurveOverlay,
  renderCutoffTable,
  renderOcTable,
  renderProgress,
  renderWeightPreview,
} from "../src/render.js";
import type { CalibrateResult, CurveResult, OcRow, SimulateResult } from "../src/types.js";

// Values chosen to break any formatter that rounds: long mantissas, tiny
// magnitudes in exponent form, and a float that only survives String().
const ROWS: OcRow[] = [
  {
    scenario_label: "1.2",
    method: "sam",
    cutoff: 0.9781234567890123,
    rejection_rate: 0.8625,
    bias: 5.551115123125783e-17,
    mse: 1.2345678901234567e-4,
    relative_bias: -0.012345678901234567,
    relative_mse: 0.9999999999999999,
    mean_weight: 0.7071067811865476,
    replicates: 2000,
    seed: 20260815,
  },
  {
    scenario_label: "1.2",
    method: "np",
    cutoff: 0.975,
    rejection_rate: 0.636,
    bias: -0.0001,
    mse: 3.3333333333333335e-5,
    relative_bias: null,
    relative_mse: null,
    mean_weight: null,
    replicates: 2000,
    seed: 20260815,
  },
];

const RESULT: SimulateResult = {
  rows: ROWS,
  alpha: 0.05,
  seed: 20260815,
  replicates: 2000,
  calibration_replicates: 10_000,
  software_version: "1.0.0",
};

function cellsOf(html: string): string[][] {
  const bodies = [...html.matchAll(/<tr>((?:<td>.*?<\/td>)+)<\/tr>/g)];
  return bodies.map((m) => [...m[1].matchAll(/<td>(.*?)<\/td>/g)].map((c) => c[1]));
}

describe("renderOcTable", () => {
  const html = renderOcTable(RESULT);
  const cells = cellsOf(html);

  it("emits one column per result field in the CSV order", () => {
    const headers = [...html.matchAll(/<th>(.*?)<\/th>/g)].map((m) => m[1]);
    expect(headers).toEqual(OC_COLUMNS);
    expect(cells).toHaveLength(ROWS.length);
    for (const row of cells) expect(row).toHaveLength(OC_COLUMNS.length);
  });

  it("shows every numeric value exactly as the API returned it", () => {
    ROWS.forEach((row, r) => {
      OC_COLUMNS.forEach((column, c) => {
        const value = row[column];
        const cell = cells[r][c];
        if (value === null) {
          expect(cell).toBe("");
        } else {
          expect(cell).toBe(String(value));
          if (typeof value === "number") {
            expect(Object.is(Number(cell), value), `${column} round trip`).toBe(true);
          }
        }
      });
    });
  });

  it("escapes markup in labels", () => {
    const hostile: SimulateResult = {
      ...RESULT,
      rows: [{ ...ROWS[0], scenario_label: `<img src="x">` }],
    };
    const html = renderOcTable(hostile);
    expect(html).not.toContain("<img");
    expect(html).toContain("&lt;img src=&quot;x&quot;&gt;");
  });
});

describe("renderCutoffTable", () => {
  const result: CalibrateResult = {
    scenario_label: "1.2",
    null_label: "null@0.4",
    cutoffs: [
      { method: "sam", cutoff: 0.9823456789012345, alpha_target: 0.05, replicates: 10_000, seed: 7 },
      { method: "np", cutoff: 0.975, alpha_target: 0.05, replicates: 10_000, seed: 7 },
    ],
    seed: 7,
    replicates: 10_000,
    software_version: "1.0.0",
  };

  it("names the null scenario and passes cutoffs through String()", () => {
    const html = renderCutoffTable(result);
    expect(html).toContain("cutoffs on null@0.4");
    expect(html).toContain("<td>0.9823456789012345</td>");
    expect(html).toContain("<td>0.975</td>");
  });
});

describe("renderCurveOverlay", () => {
  const first: CurveResult = {
    scenario_label: "1.2",
    theta: [0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6],
    mean_w: [0.0312345678901234, 0.1, 1 / 3, 0.6, 0.9123456789012345, 0.61, 0.3333333333333333, 0.1, 0.03],
    seed: 11,
    replicates: 2000,
    software_version: "1.0.0",
  };
  const second: CurveResult = {
    ...first,
    mean_w: first.mean_w.map((w) => w * 0.5000000000000001),
  };

  const html = renderCurveOverlay([
    { label: "δ=0.1", curve: first },
    { label: "δ=0.2", curve: second },
  ]);

  it("draws one polyline per series with distinct colours", () => {
    const strokes = [...html.matchAll(/<polyline [^>]*stroke="([^"]+)"/g)].map((m) => m[1]);
    expect(strokes).toHaveLength(2);
    expect(new Set(strokes).size).toBe(2);
    expect(html).toContain(`data-label="δ=0.1"`);
    expect(html).toContain(`data-label="δ=0.2"`);
  });

  it("carries both payloads verbatim in its data attributes", () => {
    const thetas = [...html.matchAll(/data-theta='([^']+)'/g)].map((m) => JSON.parse(m[1]) as number[]);
    const means = [...html.matchAll(/data-mean-w='([^']+)'/g)].map((m) => JSON.parse(m[1]) as number[]);
    expect(thetas).toEqual([first.theta, second.theta]);
    expect(means).toEqual([first.mean_w, second.mean_w]);
  });

  it("labels both axes", () => {
    expect(html).toContain("true control value");
    expect(html).toContain("mean weight");
  });
});

describe("small renderers", () => {
  it("formatCell blanks nulls and stringifies everything else", () => {
    expect(formatCell(null)).toBe("");
    expect(formatCell(0.1 + 0.2)).toBe("0.30000000000000004");
    expect(formatCell("a<b")).toBe("a&lt;b");
  });

  it("escapeHtml covers the four risky characters", () => {
    expect(escapeHtml(`<a href="x">&</a>`)).toBe("&lt;a href=&quot;x&quot;&gt;&amp;&lt;/a&gt;");
  });

  it("weight preview embeds its points and survives an empty list", () => {
    const points = [
      { ybar: 0.3, w: 0.9123456789012345 },
      { ybar: 0.4, w: 0.5 },
      { ybar: 0.5, w: 0.0123456789012345 },
    ];
    const html = renderWeightPreview(points);
    const embedded = JSON.parse(/data-w='([^']+)'/.exec(html)![1]) as number[];
    expect(embedded).toEqual(points.map((p) => p.w));
    expect(renderWeightPreview([])).toContain("<svg");
  });

  it("progress bar reports phase and rounded percent", () => {
    const html = renderProgress("simulating", 0.666);
    expect(html).toContain(`data-phase="simulating"`);
    expect(html).toContain("width:67%");
    expect(html).toContain("simulating 67%");
  });
});
