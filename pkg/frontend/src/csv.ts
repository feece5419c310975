import { readFileSync } from "node:fs";

/** Any malformed input table. The message always names the offending file. */
export class CsvError extends Error {}

export interface Table {
  file: string;
  columns: string[];
  rows: number[][];
}

/**
 * Parse a numeric CSV written by the dmtlink CLI (sweep or loading output).
 *
 * Cells must be numbers; the literal "nan" is accepted and becomes NaN,
 * which is how failed sweep points are recorded. Blank lines are skipped.
 */
export function parseCsv(file: string): Table {
  let text: string;
  try {
    text = readFileSync(file, "utf8");
  } catch (err) {
    throw new CsvError(`${file}: cannot read: ${(err as Error).message}`);
  }
  const lines = text
    .split(/\r?\n/)
    .map((s) => s.trim())
    .filter((s) => s.length > 0);
  if (lines.length === 0) {
    throw new CsvError(`${file}: empty CSV`);
  }
  const header = lines[0]!;
  const columns = header.split(",").map((s) => s.trim());
  if (columns.some((c) => c.length === 0)) {
    throw new CsvError(`${file}: header has an unnamed column: '${header}'`);
  }
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i]!.split(",").map((s) => s.trim());
    if (cells.length !== columns.length) {
      throw new CsvError(
        `${file}: line ${i + 1} has ${cells.length} fields, expected ${columns.length}`,
      );
    }
    const row: number[] = [];
    for (let j = 0; j < cells.length; j++) {
      const cell = cells[j]!;
      const value = Number(cell);
      if (Number.isNaN(value) && cell.toLowerCase() !== "nan") {
        throw new CsvError(
          `${file}: line ${i + 1}, column '${columns[j]}': not a number: '${cell}'`,
        );
      }
      row.push(value);
    }
    rows.push(row);
  }
  if (rows.length === 0) {
    throw new CsvError(`${file}: no data rows`);
  }
  return { file, columns, rows };
}

/** Extract one column by name, or fail naming both the column and the file. */
export function column(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new CsvError(
      `${table.file}: missing column '${name}' (file has: ${table.columns.join(", ")})`,
    );
  }
  return table.rows.map((r) => r[idx]!);
}
