/**
 * Loader for the training datasets exported by the primary toolchain.
 *
 * Expected header:
 *   psnr_db,sigma,y0..y{N-1},ynoisy0..ynoisy{N-1},t0..t{K-1},a0..a{K-1}
 */

import * as crypto from "node:crypto";
import * as fs from "node:fs";

import { parseCsvText, prefixedWidth, requireColumn } from "./csv.js";

export interface Dataset {
  /** PSNR shared by every row (the training noise level). */
  psnrDb: number;
  n: number;
  k: number;
  rows: number;
  /** Row-major [rows, n] noiseless samples. */
  clean: Float32Array;
  /** Row-major [rows, n] noisy samples (network inputs). */
  noisy: Float32Array;
  /** Row-major [rows, k] locations, sorted ascending per row. */
  locations: Float32Array;
  sigma: Float32Array;
  /** sha256 of the source file, recorded in trained bundles. */
  sourceHash: string;
}

export function loadDataset(path: string, maxRows?: number): Dataset {
  const text = fs.readFileSync(path, "utf8");
  const table = parseCsvText(text, path);
  const n = prefixedWidth(table.header, "y");
  const k = prefixedWidth(table.header, "t");
  if (n === 0 || k === 0) {
    throw new Error(`${path}: not a dataset file (no y/t columns)`);
  }
  const psnrCol = requireColumn(table, "psnr_db", path);
  const sigmaCol = requireColumn(table, "sigma", path);
  const yCol = requireColumn(table, "y0", path);
  const ynCol = requireColumn(table, "ynoisy0", path);
  const tCol = requireColumn(table, "t0", path);

  const rows = maxRows ? Math.min(maxRows, table.rows.length) : table.rows.length;
  const clean = new Float32Array(rows * n);
  const noisy = new Float32Array(rows * n);
  const locations = new Float32Array(rows * k);
  const sigma = new Float32Array(rows);
  let psnrDb = NaN;
  for (let i = 0; i < rows; i++) {
    const r = table.rows[i];
    const rowPsnr = Number(r[psnrCol]);
    if (i === 0) {
      psnrDb = rowPsnr;
    } else if (rowPsnr !== psnrDb) {
      throw new Error(`${path}: line ${i + 2}: mixed psnr_db values (${rowPsnr} vs ${psnrDb})`);
    }
    sigma[i] = Number(r[sigmaCol]);
    for (let j = 0; j < n; j++) {
      clean[i * n + j] = Number(r[yCol + j]);
      noisy[i * n + j] = Number(r[ynCol + j]);
    }
    const ts = [];
    for (let j = 0; j < k; j++) {
      ts.push(Number(r[tCol + j]));
    }
    ts.sort((a, b) => a - b);
    for (let j = 0; j < k; j++) {
      locations[i * k + j] = ts[j];
    }
  }
  const sourceHash = crypto.createHash("sha256").update(text).digest("hex");
  return { psnrDb, n, k, rows, clean, noisy, locations, sigma, sourceHash };
}
