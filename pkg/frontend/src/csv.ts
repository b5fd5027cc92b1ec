import { readFileSync } from "node:fs";
import Papa from "papaparse";

/** Error raised for a CSV that is absent or does not conform to its schema. */
export class CsvError extends Error {
  readonly file: string;

  constructor(file: string, detail: string) {
    super(`${file}: ${detail}`);
    this.name = "CsvError";
    this.file = file;
  }
}

export interface CsvTable {
  /** Column values, keyed by header name, all finite numbers. */
  columns: Record<string, number[]>;
  /** Number of data rows (may be zero for a header-only file). */
  rows: number;
}

/**
 * Read a CSV whose header must equal `expectedColumns` exactly (same names,
 * same order) and whose every cell must parse to a finite number.
 *
 * Throws CsvError naming the file for a missing file, a header mismatch, a
 * ragged row, or a non-numeric/non-finite cell. Header-only files are valid
 * and yield empty columns.
 */
export function readColumns(filePath: string, expectedColumns: readonly string[]): CsvTable {
  let text: string;
  try {
    text = readFileSync(filePath, "utf8");
  } catch {
    throw new CsvError(filePath, "missing or unreadable");
  }

  const parsed = Papa.parse<string[]>(text.trimEnd(), {
    header: false,
    skipEmptyLines: false,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    throw new CsvError(filePath, `ill-formed CSV (${first.message})`);
  }

  const grid = parsed.data;
  if (grid.length === 0) {
    throw new CsvError(filePath, "empty file (expected a header row)");
  }
  const header = grid[0]!;
  if (header.length !== expectedColumns.length || header.some((h, i) => h !== expectedColumns[i])) {
    throw new CsvError(
      filePath,
      `header [${header.join(",")}] does not match expected [${expectedColumns.join(",")}]`,
    );
  }

  const columns: Record<string, number[]> = {};
  for (const name of expectedColumns) columns[name] = [];
  for (let r = 1; r < grid.length; r++) {
    const row = grid[r]!;
    if (row.length !== expectedColumns.length) {
      throw new CsvError(filePath, `row ${r + 1} has ${row.length} fields, expected ${expectedColumns.length}`);
    }
    for (let c = 0; c < expectedColumns.length; c++) {
      const raw = row[c]!;
      // Number("") is 0, so blank cells need their own rejection
      const value = raw.trim() === "" ? NaN : Number(raw);
      if (!Number.isFinite(value)) {
        throw new CsvError(filePath, `row ${r + 1}, column '${expectedColumns[c]}': '${row[c]}' is not a finite number`);
      }
      columns[expectedColumns[c]!]!.push(value);
    }
  }

  return { columns, rows: grid.length - 1 };
}
