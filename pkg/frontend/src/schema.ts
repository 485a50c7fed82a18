/**
 * CSV schemas emitted by the simulator.
 *
 * Sweep files: one row per swept value, with-control and without-control
 * steady Rydberg populations plus standard errors and convergence flags.
 * Dynamics files: trajectory-averaged populations on a time grid.
 * Parsing is strict: a wrong header or malformed numbers fail loudly so a
 * schema drift in the producer cannot silently render nonsense.
 */
import Papa from "papaparse";

export const SWEEP_HEADER = [
  "param",
  "fr_with",
  "fr_with_err",
  "fr_without",
  "fr_without_err",
  "converged_with",
  "converged_without",
  "pmulti_max",
] as const;

export const DYNAMICS_HEADER = [
  "time",
  "P_gc",
  "P_gc_err",
  "P_rc",
  "P_rc_err",
  "P_gcG",
  "P_gcG_err",
  "P_multi",
  "P_multi_err",
] as const;

export interface SweepRow {
  param: number;
  frWith: number;
  frWithErr: number;
  frWithout: number;
  frWithoutErr: number;
  convergedWith: boolean;
  convergedWithout: boolean;
  pmultiMax: number;
}

export interface DynamicsRow {
  time: number;
  pGc: number;
  pGcErr: number;
  pRc: number;
  pRcErr: number;
  pGcG: number;
  pGcGErr: number;
  pMulti: number;
  pMultiErr: number;
}

export class SchemaError extends Error {}

function parseNumber(raw: string, where: string): number {
  if (raw === "nan") return NaN;
  const value = Number(raw);
  if (raw.trim() === "" || Number.isNaN(value)) {
    throw new SchemaError(`${where}: not a number: ${JSON.stringify(raw)}`);
  }
  return value;
}

function parseBool(raw: string, where: string): boolean {
  if (raw === "true") return true;
  if (raw === "false") return false;
  throw new SchemaError(`${where}: expected true/false, got ${JSON.stringify(raw)}`);
}

function splitStrict(text: string, expected: readonly string[], name: string): string[][] {
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`${name}: ${parsed.errors[0].message}`);
  }
  const rows = parsed.data;
  if (rows.length === 0) {
    throw new SchemaError(`${name}: empty file`);
  }
  const header = rows[0];
  if (header.length !== expected.length || header.some((h, i) => h !== expected[i])) {
    throw new SchemaError(
      `${name}: header mismatch; expected "${expected.join(",")}", got "${header.join(",")}"`,
    );
  }
  if (rows.length === 1) {
    throw new SchemaError(`${name}: no data rows`);
  }
  return rows.slice(1);
}

export function parseSweepCsv(text: string, name = "sweep csv"): SweepRow[] {
  const rows = splitStrict(text, SWEEP_HEADER, name).map((cells, k) => {
    const where = `${name} row ${k + 1}`;
    if (cells.length !== SWEEP_HEADER.length) {
      throw new SchemaError(`${where}: expected ${SWEEP_HEADER.length} columns`);
    }
    return {
      param: parseNumber(cells[0], where),
      frWith: parseNumber(cells[1], where),
      frWithErr: parseNumber(cells[2], where),
      frWithout: parseNumber(cells[3], where),
      frWithoutErr: parseNumber(cells[4], where),
      convergedWith: parseBool(cells[5], where),
      convergedWithout: parseBool(cells[6], where),
      pmultiMax: parseNumber(cells[7], where),
    };
  });
  for (let i = 1; i < rows.length; i++) {
    if (!(rows[i].param > rows[i - 1].param)) {
      throw new SchemaError(`${name}: param values must increase (row ${i + 1})`);
    }
  }
  return rows;
}

export function parseDynamicsCsv(text: string, name = "dynamics csv"): DynamicsRow[] {
  return splitStrict(text, DYNAMICS_HEADER, name).map((cells, k) => {
    const where = `${name} row ${k + 1}`;
    if (cells.length !== DYNAMICS_HEADER.length) {
      throw new SchemaError(`${where}: expected ${DYNAMICS_HEADER.length} columns`);
    }
    return {
      time: parseNumber(cells[0], where),
      pGc: parseNumber(cells[1], where),
      pGcErr: parseNumber(cells[2], where),
      pRc: parseNumber(cells[3], where),
      pRcErr: parseNumber(cells[4], where),
      pGcG: parseNumber(cells[5], where),
      pGcGErr: parseNumber(cells[6], where),
      pMulti: parseNumber(cells[7], where),
      pMultiErr: parseNumber(cells[8], where),
    };
  });
}
