/**
 * Typed parsers for the experiment CSVs written by the simulation harness.
 *
 * The column headers are a stable interface; any deviation (missing,
 * renamed, or extra columns, or a cell that fails to parse) raises a
 * SchemaError naming the file, the offending column, and — for cell-level
 * problems — the data row.  Empty cells become null, matching the writer's
 * convention that exactly one of the sweep-axis columns is populated.
 */

import Papa from "papaparse";
import { z } from "zod";

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

const floatCell = z.string().transform((s, ctx) => {
  const v = Number(s);
  if (s.trim() === "" || !Number.isFinite(v)) {
    ctx.addIssue({ code: "custom", message: `not a number (got "${s}")` });
    return z.NEVER;
  }
  return v;
});

const intCell = z.string().transform((s, ctx) => {
  const v = Number(s);
  if (s.trim() === "" || !Number.isSafeInteger(v)) {
    ctx.addIssue({ code: "custom", message: `not an integer (got "${s}")` });
    return z.NEVER;
  }
  return v;
});

const optFloat = z.string().transform((s, ctx) => {
  if (s === "") return null;
  const v = Number(s);
  if (s.trim() === "" || !Number.isFinite(v)) {
    ctx.addIssue({ code: "custom", message: `not a number (got "${s}")` });
    return z.NEVER;
  }
  return v;
});

const optInt = z.string().transform((s, ctx) => {
  if (s === "") return null;
  const v = Number(s);
  if (s.trim() === "" || !Number.isSafeInteger(v)) {
    ctx.addIssue({ code: "custom", message: `not an integer (got "${s}")` });
    return z.NEVER;
  }
  return v;
});
const text = z.string().min(1, "empty cell");

export const resultsRowSchema = z.object({
  experiment: text,
  waveform: text,
  band_id: intCell,
  guard_hz: floatCell,
  rx_power_dbm: optFloat,
  snr_db: optFloat,
  evm_percent: optFloat,
  ber: optFloat,
  bit_errors: optInt,
  bit_count: optInt,
  seed: intCell,
  version: text,
});

export const subcarrierRowSchema = z.object({
  experiment: text,
  waveform: text,
  band_id: intCell,
  guard_hz: floatCell,
  rx_power_dbm: optFloat,
  snr_db: optFloat,
  subcarrier: intCell,
  evm_percent: floatCell,
  seed: intCell,
  version: text,
});

export const psdRowSchema = z.object({
  experiment: text,
  waveform: text,
  signal: z.enum(["band", "composite"]),
  freq_hz: floatCell,
  psd_db: floatCell,
  seed: intCell,
  version: text,
});

export type ResultsRow = z.infer<typeof resultsRowSchema>;
export type SubcarrierRow = z.infer<typeof subcarrierRowSchema>;
export type PsdRow = z.infer<typeof psdRowSchema>;

function checkHeader(file: string, actual: string[], expected: string[]): void {
  const have = new Set(actual);
  const want = new Set(expected);
  const missing = expected.filter((c) => !have.has(c));
  const extra = actual.filter((c) => !want.has(c));
  const parts: string[] = [];
  if (missing.length) {
    parts.push(`missing column(s) ${missing.map((c) => `"${c}"`).join(", ")}`);
  }
  if (extra.length) {
    parts.push(`unexpected column(s) ${extra.map((c) => `"${c}"`).join(", ")}`);
  }
  if (parts.length) {
    throw new SchemaError(`${file}: ${parts.join("; ")}`);
  }
}

interface RowSchema<T> {
  safeParse(raw: unknown):
    | { success: true; data: T }
    | { success: false; error: { issues: Array<{ path: PropertyKey[]; message: string }> } };
}

function parseTable<T>(
  file: string,
  textContent: string,
  rowSchema: RowSchema<T>,
  columns: string[],
): T[] {
  if (textContent.trim() === "") {
    throw new SchemaError(`${file}: empty file`);
  }
  const parsed = Papa.parse<Record<string, string>>(textContent, {
    header: true,
    skipEmptyLines: "greedy",
  });
  if (parsed.errors.length) {
    const e = parsed.errors[0];
    throw new SchemaError(`${file}: malformed CSV (${e.message})`);
  }
  checkHeader(file, parsed.meta.fields ?? [], columns);
  if (parsed.data.length === 0) {
    throw new SchemaError(`${file}: header only, no data rows`);
  }
  return parsed.data.map((raw, i) => {
    const out = rowSchema.safeParse(raw);
    if (!out.success) {
      const issue = out.error.issues[0];
      const column = issue.path.map(String).join(".") || "?";
      throw new SchemaError(
        `${file}: row ${i + 1}, column "${column}": ${issue.message}`,
      );
    }
    return out.data;
  });
}

export function parseResultsCsv(file: string, text: string): ResultsRow[] {
  return parseTable(file, text, resultsRowSchema,
    Object.keys(resultsRowSchema.shape));
}

export function parseSubcarrierCsv(file: string, text: string): SubcarrierRow[] {
  return parseTable(file, text, subcarrierRowSchema,
    Object.keys(subcarrierRowSchema.shape));
}

export function parsePsdCsv(file: string, text: string): PsdRow[] {
  return parseTable(file, text, psdRowSchema,
    Object.keys(psdRowSchema.shape));
}
