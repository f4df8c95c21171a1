/**
 * Strict CSV parsing for the simulator's persisted series files.
 *
 * The producer writes plain numeric CSV (no quoting, fixed header); anything
 * else is treated as a corrupt input and rejected with a named error.
 */

export class ParseError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ParseError";
  }
}

export interface SeriesTable {
  columns: string[];
  /** column name -> values, all rows finite numbers */
  data: Map<string, number[]>;
  rows: number;
}

export const SERIES_COLUMNS = [
  "t",
  "l2_v",
  "grad_v",
  "h2_v",
  "l4_v4",
  "l2_phi",
  "grad_phi",
  "hminus1_phi",
  "ups1",
  "ups2",
  "e1",
  "e2",
  "e3",
  "res_phi_l2",
  "res_phi_h1",
  "res_v_l2",
  "nvt",
  "nphit",
  "nvt_h1",
] as const;

export const DECAY_COLUMNS = [
  "t",
  "h1_phid",
  "h1_phid_expected",
  "h1_phid_stepped",
  "h1_phic",
  "h2_phic",
] as const;

export function parseCsv(text: string, source: string): SeriesTable {
  const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
  if (lines.length < 2) {
    throw new ParseError(`${source}: empty series (need a header and at least one row)`);
  }
  const header = lines[0]!;
  const columns = header.split(",").map((c) => c.trim());
  const data = new Map<string, number[]>(columns.map((c) => [c, []]));
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i]!.split(",");
    if (cells.length !== columns.length) {
      throw new ParseError(`${source}: row ${i} has ${cells.length} cells, expected ${columns.length}`);
    }
    for (let j = 0; j < columns.length; j++) {
      const value = Number(cells[j]);
      if (!Number.isFinite(value)) {
        throw new ParseError(`${source}: row ${i}, column ${columns[j]}: not a finite number (${cells[j]})`);
      }
      data.get(columns[j]!)!.push(value);
    }
  }
  return { columns, data, rows: lines.length - 1 };
}

export function requireColumns(table: SeriesTable, required: readonly string[], source: string): void {
  for (const col of required) {
    if (!table.data.has(col)) {
      throw new ParseError(`${source}: missing required column ${col}`);
    }
  }
}

export function requireIncreasingTime(table: SeriesTable, source: string): number[] {
  const t = table.data.get("t");
  if (!t) throw new ParseError(`${source}: missing time column`);
  for (let i = 1; i < t.length; i++) {
    if (!(t[i]! > t[i - 1]!)) {
      throw new ParseError(`${source}: time column is not strictly increasing at row ${i}`);
    }
  }
  return t;
}

export function column(table: SeriesTable, name: string, source: string): number[] {
  const values = table.data.get(name);
  if (!values) throw new ParseError(`${source}: missing column ${name}`);
  return values;
}
