/**
 * Figure builders: each kind consumes one or more of the toolkit's result
 * CSVs and produces a deterministic SVG. The full SVG string is assembled
 * before anything touches the filesystem, so a schema or data error never
 * leaves a truncated or empty image behind.
 */

import { readFileSync, writeFileSync } from "node:fs";
import {
  parsePsdCsv, parseResultsCsv, parseSubcarrierCsv,
  PsdRow, ResultsRow, SubcarrierRow,
} from "./schema.js";

function loadAll<T>(
  files: string[],
  parse: (file: string, text: string) => T[],
): T[][] {
  return files.map((f) => parse(f, readFileSync(f, "utf8")));
}

export const FEC_THRESHOLD = 3.8e-3;

export const FIGURE_KINDS = [
  "psd", "psd-composite", "evm-subcarrier", "ber-waterfall",
] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

import { ChartSpec, renderChart, Series } from "./svg.js";

const WAVEFORM_LABELS: Record<string, string> = {
  ofdm: "OFDM",
  ufofdm: "UF-OFDM",
  gfdm: "GFDM",
  pam4: "PAM-4",
};

function waveformLabel(w: string): string {
  return WAVEFORM_LABELS[w] ?? w;
}

function sortedUnique<T>(xs: T[]): T[] {
  return [...new Set(xs)].sort();
}

/** One PSD trace per waveform, taken from the clean per-band signal. */
export function buildPsdChart(tables: PsdRow[][]): ChartSpec {
  const series: Series[] = [];
  for (const rows of tables) {
    const band = rows.filter((r) => r.signal === "band");
    if (band.length === 0) {
      throw new Error('no rows with signal "band" in PSD input');
    }
    for (const w of sortedUnique(band.map((r) => r.waveform))) {
      series.push({
        label: waveformLabel(w),
        points: band
          .filter((r) => r.waveform === w)
          .map((r) => [r.freq_hz / 1e6, r.psd_db] as [number, number]),
      });
    }
  }
  return {
    title: "Single-band power spectral density",
    xAxis: { label: "Frequency offset (MHz)" },
    yAxis: { label: "PSD (dB)" },
    series,
  };
}

/** Composite 20 GSa/s drive spectrum: wired lane plus wireless bands. */
export function buildCompositePsdChart(tables: PsdRow[][]): ChartSpec {
  const series: Series[] = [];
  for (const rows of tables) {
    const comp = rows.filter((r) => r.signal === "composite");
    if (comp.length === 0) {
      throw new Error('no rows with signal "composite" in PSD input');
    }
    for (const w of sortedUnique(comp.map((r) => r.waveform))) {
      series.push({
        label: waveformLabel(w),
        points: comp
          .filter((r) => r.waveform === w)
          .map((r) => [r.freq_hz / 1e9, r.psd_db] as [number, number]),
      });
    }
  }
  return {
    title: "Composite drive spectrum",
    xAxis: { label: "Frequency (GHz)" },
    yAxis: { label: "PSD (dB)" },
    series,
  };
}

/** EVM versus subcarrier index, one trace per (waveform, band). */
export function buildEvmSubcarrierChart(tables: SubcarrierRow[][]): ChartSpec {
  const series: Series[] = [];
  for (const rows of tables) {
    for (const w of sortedUnique(rows.map((r) => r.waveform))) {
      const wrows = rows.filter((r) => r.waveform === w);
      for (const b of sortedUnique(wrows.map((r) => r.band_id))) {
        const pts = wrows
          .filter((r) => r.band_id === b)
          .sort((p, q) => p.subcarrier - q.subcarrier)
          .map((r) => [r.subcarrier, r.evm_percent] as [number, number]);
        series.push({ label: `${waveformLabel(w)} band ${b}`, points: pts });
      }
    }
  }
  if (series.length === 0) {
    throw new Error("no per-subcarrier rows to plot");
  }
  return {
    title: "EVM per subcarrier",
    xAxis: { label: "Subcarrier index" },
    yAxis: { label: "EVM (%)" },
    series,
  };
}

interface BerPoint {
  errors: number;
  bits: number;
}

/**
 * BER versus received power. Wireless bands (band_id >= 1) are aggregated
 * per waveform by pooling bit errors over the bands at each power; the
 * wired PAM-4 lane (band_id 0) gets its own trace. Zero-error points fall
 * below the log axis and are dropped rather than plotted at a fake floor.
 */
export function buildBerWaterfallChart(tables: ResultsRow[][]): ChartSpec {
  const pooled = new Map<string, Map<number, BerPoint>>();
  for (const rows of tables) {
    for (const r of rows) {
      if (r.rx_power_dbm === null) {
        throw new Error(
          "ber-waterfall needs a received-power sweep, but " +
          `rx_power_dbm is blank (experiment "${r.experiment}")`);
      }
      if (r.bit_errors === null || r.bit_count === null) continue;
      const key = r.band_id === 0 ? "pam4" : r.waveform;
      let byPower = pooled.get(key);
      if (!byPower) {
        byPower = new Map();
        pooled.set(key, byPower);
      }
      const pt = byPower.get(r.rx_power_dbm) ?? { errors: 0, bits: 0 };
      pt.errors += r.bit_errors;
      pt.bits += r.bit_count;
      byPower.set(r.rx_power_dbm, pt);
    }
  }
  if (pooled.size === 0) {
    throw new Error("no BER measurements found in results input");
  }
  const series: Series[] = [];
  for (const key of [...pooled.keys()].sort()) {
    const byPower = pooled.get(key)!;
    const points = [...byPower.entries()]
      .sort((a, b) => a[0] - b[0])
      .map(([p, pt]) => [p, pt.errors / pt.bits] as [number, number])
      .filter(([, ber]) => ber > 0);
    if (points.length > 0) {
      series.push({ label: waveformLabel(key), points });
    }
  }
  if (series.length === 0) {
    throw new Error("every BER point is zero; nothing to plot on a log axis");
  }
  return {
    title: "BER versus received optical power",
    xAxis: { label: "Received power (dBm)" },
    yAxis: { label: "Bit error ratio", log: true },
    series,
    refLine: { y: FEC_THRESHOLD, label: "FEC limit 3.8e-3" },
    markers: true,
  };
}

export interface FigureRequest {
  kind: FigureKind;
  inputs: string[];
  output: string;
}

/** Parse the inputs, build the SVG, and only then write the output file. */
export function renderFigure(req: FigureRequest): string {
  let chart: ChartSpec;
  switch (req.kind) {
    case "psd":
      chart = buildPsdChart(loadAll(req.inputs, parsePsdCsv));
      break;
    case "psd-composite":
      chart = buildCompositePsdChart(loadAll(req.inputs, parsePsdCsv));
      break;
    case "evm-subcarrier":
      chart = buildEvmSubcarrierChart(loadAll(req.inputs, parseSubcarrierCsv));
      break;
    case "ber-waterfall":
      chart = buildBerWaterfallChart(loadAll(req.inputs, parseResultsCsv));
      break;
  }
  const svg = renderChart(chart);
  writeFileSync(req.output, svg);
  return svg;
}
