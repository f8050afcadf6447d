/**
 * Deterministic SVG line charts: no DOM, no randomness, no timestamps —
 * the same inputs always serialize to the same bytes, so rerunning a figure
 * overwrites its output with an identical file.
 */

import { extent, nice, ticks } from "d3-array";

export interface Series {
  label: string;
  /** [x, y] pairs in data coordinates. */
  points: Array<[number, number]>;
}

export interface Axis {
  label: string;
  log?: boolean;
}

export interface RefLine {
  y: number;
  label: string;
}

export interface ChartSpec {
  title: string;
  xAxis: Axis;
  yAxis: Axis;
  series: Series[];
  /** Dashed horizontal marker, e.g. an FEC threshold. */
  refLine?: RefLine;
  /** Draw circular markers at the data points (for sparse curves). */
  markers?: boolean;
  width?: number;
  height?: number;
}

const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/** Fixed-precision number formatting keeps the output byte-stable. */
function fmt(x: number): string {
  return String(Number(x.toPrecision(6)));
}

function tickLabel(x: number, log: boolean): string {
  if (log) {
    const e = Math.round(Math.log10(x));
    return `1e${e}`;
  }
  return String(Number(x.toPrecision(4)));
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

interface Scale {
  (x: number): number;
  ticks: number[];
}

function makeScale(
  values: number[], range: [number, number], log: boolean,
): Scale {
  if (values.length === 0) {
    throw new Error("no finite data points to scale");
  }
  const [lo, hi] = extent(values) as [number, number];
  if (log) {
    if (lo <= 0) {
      throw new Error("log axis requires strictly positive values");
    }
    const eLo = Math.floor(Math.log10(lo));
    const eHi = Math.ceil(Math.log10(hi));
    const span = Math.max(eHi - eLo, 1);
    const f = (x: number) =>
      range[0] + ((Math.log10(x) - eLo) / span) * (range[1] - range[0]);
    const s = f as Scale;
    s.ticks = [];
    for (let e = eLo; e <= eHi; e++) s.ticks.push(10 ** e);
    return s;
  }
  let [nLo, nHi] = nice(lo, hi, 6);
  if (nLo === nHi) {
    nLo -= 1;
    nHi += 1;
  }
  const f = (x: number) =>
    range[0] + ((x - nLo) / (nHi - nLo)) * (range[1] - range[0]);
  const s = f as Scale;
  s.ticks = ticks(nLo, nHi, 6);
  return s;
}

export function renderChart(spec: ChartSpec): string {
  const width = spec.width ?? 760;
  const height = spec.height ?? 480;
  const m = { top: 44, right: 24, bottom: 52, left: 72 };
  const innerW = width - m.left - m.right;
  const innerH = height - m.top - m.bottom;

  const finite = spec.series
    .map((s) => ({
      ...s,
      points: s.points.filter(([x, y]) =>
        Number.isFinite(x) && Number.isFinite(y)
        && (!spec.yAxis.log || y > 0) && (!spec.xAxis.log || x > 0)),
    }))
    .filter((s) => s.points.length > 0);
  if (finite.length === 0) {
    throw new Error("nothing to draw: every series is empty");
  }

  const xs = finite.flatMap((s) => s.points.map((p) => p[0]));
  const ys = finite.flatMap((s) => s.points.map((p) => p[1]));
  if (spec.refLine) ys.push(spec.refLine.y);
  const sx = makeScale(xs, [m.left, m.left + innerW], !!spec.xAxis.log);
  const sy = makeScale(ys, [m.top + innerH, m.top], !!spec.yAxis.log);

  const out: string[] = [];
  out.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${height}" viewBox="0 0 ${width} ${height}" ` +
    `font-family="Helvetica, Arial, sans-serif">`);
  out.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  out.push(`<text x="${width / 2}" y="24" text-anchor="middle" ` +
    `font-size="15" font-weight="bold">${escapeXml(spec.title)}</text>`);

  // Gridlines and ticks.
  for (const t of sy.ticks) {
    const y = fmt(sy(t));
    out.push(`<line x1="${m.left}" y1="${y}" x2="${m.left + innerW}" ` +
      `y2="${y}" stroke="#dddddd" stroke-width="1"/>`);
    out.push(`<text x="${m.left - 8}" y="${fmt(sy(t) + 4)}" ` +
      `text-anchor="end" font-size="11">` +
      `${tickLabel(t, !!spec.yAxis.log)}</text>`);
  }
  for (const t of sx.ticks) {
    const x = fmt(sx(t));
    out.push(`<line x1="${x}" y1="${m.top}" x2="${x}" ` +
      `y2="${m.top + innerH}" stroke="#eeeeee" stroke-width="1"/>`);
    out.push(`<text x="${x}" y="${m.top + innerH + 18}" ` +
      `text-anchor="middle" font-size="11">` +
      `${tickLabel(t, !!spec.xAxis.log)}</text>`);
  }

  // Frame and axis labels.
  out.push(`<rect x="${m.left}" y="${m.top}" width="${innerW}" ` +
    `height="${innerH}" fill="none" stroke="#333333" stroke-width="1"/>`);
  out.push(`<text x="${m.left + innerW / 2}" y="${height - 12}" ` +
    `text-anchor="middle" font-size="13">` +
    `${escapeXml(spec.xAxis.label)}</text>`);
  out.push(`<text x="20" y="${m.top + innerH / 2}" text-anchor="middle" ` +
    `font-size="13" transform="rotate(-90 20 ${m.top + innerH / 2})">` +
    `${escapeXml(spec.yAxis.label)}</text>`);

  if (spec.refLine) {
    const y = fmt(sy(spec.refLine.y));
    out.push(`<line x1="${m.left}" y1="${y}" x2="${m.left + innerW}" ` +
      `y2="${y}" stroke="#444444" stroke-width="1.5" ` +
      `stroke-dasharray="7 4"/>`);
    out.push(`<text x="${m.left + innerW - 6}" y="${fmt(sy(spec.refLine.y) - 6)}" ` +
      `text-anchor="end" font-size="11" fill="#444444">` +
      `${escapeXml(spec.refLine.label)}</text>`);
  }

  // Series (clip to the frame so skirts and waterfalls stay inside).
  out.push(`<clipPath id="plot-area"><rect x="${m.left}" y="${m.top}" ` +
    `width="${innerW}" height="${innerH}"/></clipPath>`);
  out.push(`<g clip-path="url(#plot-area)">`);
  finite.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = s.points
      .map(([x, y]) => `${fmt(sx(x))},${fmt(sy(y))}`)
      .join(" ");
    out.push(`<polyline points="${pts}" fill="none" stroke="${color}" ` +
      `stroke-width="1.6"/>`);
    if (spec.markers) {
      for (const [x, y] of s.points) {
        out.push(`<circle cx="${fmt(sx(x))}" cy="${fmt(sy(y))}" r="3" ` +
          `fill="${color}"/>`);
      }
    }
  });
  out.push(`</g>`);

  // Legend.
  finite.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const y = m.top + 14 + 17 * i;
    const x = m.left + innerW - 150;
    out.push(`<line x1="${x}" y1="${y - 4}" x2="${x + 22}" y2="${y - 4}" ` +
      `stroke="${color}" stroke-width="2.5"/>`);
    out.push(`<text x="${x + 28}" y="${y}" font-size="12">` +
      `${escapeXml(s.label)}</text>`);
  });

  out.push("</svg>");
  return out.join("\n") + "\n";
}
