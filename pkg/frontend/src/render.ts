/**
 * Deterministic SVG renderers for the four figure kinds.
 *
 * Everything is plain string assembly on top of two tiny helpers (a linear
 * scale and a polyline builder); no physics is recomputed here, the renderers
 * only rearrange numbers already present in the CSV.
 */

import { CsvTable, SchemaError, num } from "./csv.js";

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 36, right: 96, bottom: 48, left: 64 };

const POPULATION_SERIES: [string, string][] = [
  ["p_phi_minus", "#1f77b4"],
  ["p_phi_plus", "#d62728"],
  ["p_psi_plus", "#2ca02c"],
  ["p_psi_minus", "#9467bd"],
];

interface Scale {
  (v: number): number;
  domain: [number, number];
}

function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const f = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  return f;
}

function fmt(v: number): string {
  return Number(v.toPrecision(6)).toString();
}

function ticks(lo: number, hi: number, n = 6): number[] {
  const span = hi - lo || 1;
  const rawStep = span / n;
  const mag = 10 ** Math.floor(Math.log10(rawStep));
  const step = [1, 2, 2.5, 5, 10].map((m) => m * mag).find((s) => span / s <= n) ?? mag * 10;
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-9; v += step) {
    out.push(Number(v.toPrecision(10)));
  }
  return out;
}

function polyline(xs: number[], ys: number[], x: Scale, y: Scale, style: string): string {
  const pts = xs.map((v, i) => `${x(v).toFixed(2)},${y(ys[i]).toFixed(2)}`).join(" ");
  return `<polyline fill="none" ${style} points="${pts}"/>`;
}

function axes(x: Scale, y: Scale, xLabel: string, yLabel: string): string {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  const parts = [
    `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`,
    `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`,
  ];
  for (const t of ticks(x.domain[0], x.domain[1])) {
    const px = x(t);
    parts.push(`<line x1="${px.toFixed(2)}" y1="${y0}" x2="${px.toFixed(2)}" y2="${y0 + 5}" stroke="black"/>`);
    parts.push(`<text x="${px.toFixed(2)}" y="${y0 + 18}" font-size="11" text-anchor="middle">${fmt(t)}</text>`);
  }
  for (const t of ticks(y.domain[0], y.domain[1])) {
    const py = y(t);
    parts.push(`<line x1="${x0 - 5}" y1="${py.toFixed(2)}" x2="${x0}" y2="${py.toFixed(2)}" stroke="black"/>`);
    parts.push(`<text x="${x0 - 8}" y="${(py + 4).toFixed(2)}" font-size="11" text-anchor="end">${fmt(t)}</text>`);
  }
  parts.push(`<text x="${(x0 + x1) / 2}" y="${HEIGHT - 10}" font-size="13" text-anchor="middle">${xLabel}</text>`);
  parts.push(
    `<text x="16" y="${(y0 + y1) / 2}" font-size="13" text-anchor="middle" transform="rotate(-90 16 ${(y0 + y1) / 2})">${yLabel}</text>`,
  );
  return parts.join("\n");
}

function svgDocument(body: string, title: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    `<text x="${WIDTH / 2}" y="22" font-size="15" text-anchor="middle">${title}</text>`,
    body,
    `</svg>`,
  ].join("\n");
}

/** Blue-to-yellow ramp for trace distances in [0, max]. */
function heatColor(v: number, vmax: number): string {
  const t = vmax > 0 ? Math.min(Math.max(v / vmax, 0), 1) : 0;
  const anchors: [number, number, number][] = [
    [68, 1, 84],
    [59, 82, 139],
    [33, 145, 140],
    [94, 201, 98],
    [253, 231, 37],
  ];
  const pos = t * (anchors.length - 1);
  const i = Math.min(Math.floor(pos), anchors.length - 2);
  const f = pos - i;
  const c = anchors[i].map((a, k) => Math.round(a + f * (anchors[i + 1][k] - a)));
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}

function groupByTau(table: CsvTable): Map<number, { t: number[]; d: number[] }> {
  const groups = new Map<number, { t: number[]; d: number[] }>();
  for (const row of table.rows) {
    const tau = num(row, "tau");
    let g = groups.get(tau);
    if (!g) {
      g = { t: [], d: [] };
      groups.set(tau, g);
    }
    g.t.push(num(row, "t"));
    g.d.push(num(row, "trace_distance"));
  }
  return groups;
}

/** Trace distance over (t, tau), one row of cells per tau; tau* marked. */
export function renderHeatmap(table: CsvTable, tauStar: number | null = null): string {
  const groups = groupByTau(table);
  const taus = [...groups.keys()].sort((a, b) => a - b);
  const tMax = Math.max(...[...groups.values()].map((g) => Math.max(...g.t)));
  const dMax = Math.max(...[...groups.values()].map((g) => Math.max(...g.d)));
  const tauStep = taus.length > 1 ? taus[1] - taus[0] : 0.01;

  const x = linearScale([0, tMax], [MARGIN.left, WIDTH - MARGIN.right]);
  const y = linearScale(
    [taus[0] - tauStep / 2, taus[taus.length - 1] + tauStep / 2],
    [HEIGHT - MARGIN.bottom, MARGIN.top],
  );

  const cells: string[] = [];
  for (const tau of taus) {
    const g = groups.get(tau)!;
    const rowY = y(tau + tauStep / 2);
    const rowH = Math.abs(y(tau - tauStep / 2) - y(tau + tauStep / 2)) + 0.5;
    for (let i = 0; i < g.t.length; i++) {
      const cellEnd = i + 1 < g.t.length ? g.t[i + 1] : Math.min(g.t[i] + tau, tMax);
      const px = x(g.t[i]);
      const w = Math.max(x(cellEnd) - px, 0.5);
      cells.push(
        `<rect x="${px.toFixed(2)}" y="${rowY.toFixed(2)}" width="${w.toFixed(2)}" height="${rowH.toFixed(2)}" fill="${heatColor(g.d[i], dMax)}"/>`,
      );
    }
  }

  let marker = "";
  if (tauStar !== null) {
    const py = y(tauStar);
    marker =
      `<line x1="${MARGIN.left}" y1="${py.toFixed(2)}" x2="${WIDTH - MARGIN.right}" y2="${py.toFixed(2)}" stroke="white" stroke-width="1.5" stroke-dasharray="6 3"/>` +
      `<text x="${WIDTH - MARGIN.right + 6}" y="${(py + 4).toFixed(2)}" font-size="12">tau* = ${fmt(tauStar)}</text>`;
  }

  // color bar
  const barX = WIDTH - MARGIN.right + 48;
  const bar: string[] = [];
  for (let i = 0; i < 40; i++) {
    const v = dMax * (1 - i / 39);
    const by = MARGIN.top + (i * (HEIGHT - MARGIN.top - MARGIN.bottom)) / 40;
    bar.push(
      `<rect x="${barX}" y="${by.toFixed(2)}" width="12" height="${((HEIGHT - MARGIN.top - MARGIN.bottom) / 40 + 0.5).toFixed(2)}" fill="${heatColor(v, dMax)}"/>`,
    );
  }
  bar.push(`<text x="${barX + 16}" y="${MARGIN.top + 10}" font-size="10">${fmt(dMax)}</text>`);
  bar.push(`<text x="${barX + 16}" y="${HEIGHT - MARGIN.bottom}" font-size="10">0</text>`);

  const body = [
    cells.join("\n"),
    marker,
    bar.join("\n"),
    axes(x, y, "t", "tau"),
  ].join("\n");
  return svgDocument(body, "Trace distance to the asymptotic state");
}

/** Fixed-tau trace distance curves D(t); at most maxCurves taus, evenly picked. */
export function renderDistanceCurves(table: CsvTable, maxCurves = 6): string {
  const groups = groupByTau(table);
  const taus = [...groups.keys()].sort((a, b) => a - b);
  const picked =
    taus.length <= maxCurves
      ? taus
      : Array.from({ length: maxCurves }, (_, i) => taus[Math.round((i * (taus.length - 1)) / (maxCurves - 1))]);
  const tMax = Math.max(...picked.map((tau) => Math.max(...groups.get(tau)!.t)));
  const dMax = Math.max(...picked.map((tau) => Math.max(...groups.get(tau)!.d)));

  const x = linearScale([0, tMax], [MARGIN.left, WIDTH - MARGIN.right]);
  const y = linearScale([0, dMax * 1.05], [HEIGHT - MARGIN.bottom, MARGIN.top]);

  const palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
  const lines: string[] = [];
  const legend: string[] = [];
  picked.forEach((tau, i) => {
    const g = groups.get(tau)!;
    const color = palette[i % palette.length];
    lines.push(polyline(g.t, g.d, x, y, `stroke="${color}" stroke-width="1.5"`));
    const ly = MARGIN.top + 16 * i;
    legend.push(`<line x1="${WIDTH - MARGIN.right + 8}" y1="${ly}" x2="${WIDTH - MARGIN.right + 28}" y2="${ly}" stroke="${color}" stroke-width="1.5"/>`);
    legend.push(`<text x="${WIDTH - MARGIN.right + 32}" y="${ly + 4}" font-size="11">tau=${fmt(tau)}</text>`);
  });

  const body = [lines.join("\n"), legend.join("\n"), axes(x, y, "t", "trace distance")].join("\n");
  return svgDocument(body, "Relaxation at fixed inter-measurement time");
}

/** Bell populations with the control overlay and the readout rail. */
export function renderTrajectory(table: CsvTable): string {
  const t = table.rows.map((r) => num(r, "t"));
  const tMax = Math.max(...t);
  const railTop = HEIGHT - MARGIN.bottom - 28;

  const x = linearScale([0, tMax], [MARGIN.left, WIDTH - MARGIN.right]);
  const y = linearScale([0, 1.02], [railTop - 8, MARGIN.top]);

  const lines: string[] = [];
  const legend: string[] = [];
  POPULATION_SERIES.forEach(([column, color], i) => {
    const values = table.rows.map((r) => num(r, column));
    lines.push(polyline(t, values, x, y, `stroke="${color}" stroke-width="1.5"`));
    const ly = MARGIN.top + 16 * i;
    legend.push(`<line x1="${WIDTH - MARGIN.right + 8}" y1="${ly}" x2="${WIDTH - MARGIN.right + 28}" y2="${ly}" stroke="${color}" stroke-width="1.5"/>`);
    legend.push(`<text x="${WIDTH - MARGIN.right + 32}" y="${ly + 4}" font-size="11">${column}</text>`);
  });

  const uh = table.rows.map((r) => num(r, "u_h"));
  lines.push(polyline(t, uh, x, y, `stroke="#444" stroke-width="1.2" stroke-dasharray="5 3"`));
  legend.push(`<line x1="${WIDTH - MARGIN.right + 8}" y1="${MARGIN.top + 64}" x2="${WIDTH - MARGIN.right + 28}" y2="${MARGIN.top + 64}" stroke="#444" stroke-dasharray="5 3"/>`);
  legend.push(`<text x="${WIDTH - MARGIN.right + 32}" y="${MARGIN.top + 68}" font-size="11">u_h</text>`);

  // readout rail: one marker per measurement row (non-empty readout column)
  const rail: string[] = [];
  for (const row of table.rows) {
    if (row.readout === "") continue;
    const bit = row.readout;
    if (bit !== "0" && bit !== "1") {
      throw new SchemaError(`readout must be 0, 1, or empty, got ${JSON.stringify(bit)}`);
    }
    const px = x(num(row, "t"));
    const fill = bit === "1" ? "#333" : "#fff";
    const textFill = bit === "1" ? "#fff" : "#333";
    rail.push(`<rect x="${(px - 6).toFixed(2)}" y="${railTop}" width="12" height="14" fill="${fill}" stroke="#333"/>`);
    rail.push(`<text x="${px.toFixed(2)}" y="${railTop + 11}" font-size="10" text-anchor="middle" fill="${textFill}">${bit}</text>`);
  }

  const body = [lines.join("\n"), legend.join("\n"), rail.join("\n"), axes(x, y, "t", "population")].join("\n");
  return svgDocument(body, "Selective trajectory with readout rail");
}

/** Concurrence and fidelity panels from the trajectory samples. */
export function renderMetrics(table: CsvTable): string {
  const t = table.rows.map((r) => num(r, "t"));
  const conc = table.rows.map((r) => num(r, "concurrence"));
  const fid = table.rows.map((r) => num(r, "fidelity_to_final"));
  const tMax = Math.max(...t);

  const x = linearScale([0, tMax], [MARGIN.left, WIDTH - MARGIN.right]);
  const y = linearScale([0, 1.02], [HEIGHT - MARGIN.bottom, MARGIN.top]);

  const body = [
    polyline(t, conc, x, y, `stroke="#1f77b4" stroke-width="1.5"`),
    polyline(t, fid, x, y, `stroke="#d62728" stroke-width="1.5" stroke-dasharray="5 3"`),
    `<line x1="${WIDTH - MARGIN.right + 8}" y1="${MARGIN.top}" x2="${WIDTH - MARGIN.right + 28}" y2="${MARGIN.top}" stroke="#1f77b4" stroke-width="1.5"/>`,
    `<text x="${WIDTH - MARGIN.right + 32}" y="${MARGIN.top + 4}" font-size="11">concurrence</text>`,
    `<line x1="${WIDTH - MARGIN.right + 8}" y1="${MARGIN.top + 16}" x2="${WIDTH - MARGIN.right + 28}" y2="${MARGIN.top + 16}" stroke="#d62728" stroke-width="1.5" stroke-dasharray="5 3"/>`,
    `<text x="${WIDTH - MARGIN.right + 32}" y="${MARGIN.top + 20}" font-size="11">fidelity</text>`,
    axes(x, y, "t", "value"),
  ].join("\n");
  return svgDocument(body, "Entanglement metrics along the trajectory");
}
