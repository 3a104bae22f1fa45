/**
 * Minimal CSV helpers for the flat numeric files exchanged with the
 * primary toolchain. Numbers are written with JavaScript's shortest
 * round-trip representation, which any float parser reads back exactly.
 */

import * as fs from "node:fs";

export interface CsvTable {
  header: string[];
  rows: string[][];
}

export function parseCsvText(text: string, context: string): CsvTable {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error(`${context}: empty file`);
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new Error(
        `${context}: line ${i + 2}: expected ${header.length} fields, got ${cells.length}`,
      );
    }
    return cells;
  });
  return { header, rows };
}

export function readCsv(path: string): CsvTable {
  return parseCsvText(fs.readFileSync(path, "utf8"), path);
}

export function cell(value: number | string): string {
  return typeof value === "string" ? value : String(value);
}

export function writeCsv(
  path: string,
  header: string[],
  rows: (number | string)[][],
): void {
  const lines = [header.join(",")];
  for (const row of rows) {
    lines.push(row.map(cell).join(","));
  }
  fs.writeFileSync(path, lines.join("\n") + "\n");
}

/** Column index that must exist. */
export function requireColumn(table: CsvTable, name: string, context: string): number {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`${context}: missing required column '${name}'`);
  }
  return idx;
}

/** Count of consecutive columns prefix0..prefix{n-1} present in the header. */
export function prefixedWidth(header: string[], prefix: string): number {
  let n = 0;
  while (header.includes(`${prefix}${n}`)) {
    n += 1;
  }
  return n;
}
