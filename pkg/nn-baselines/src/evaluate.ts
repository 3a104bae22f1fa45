/**
 * Evaluation flows that turn trained bundles into estimate CSVs the
 * primary's scoring pipeline ingests directly.
 *
 * Direct nets emit their location predictions. Denoiser nets emit
 * denoised sample files and hand them to the primary's matrix pencil
 * command; only the method label is rewritten so both pipelines stay
 * distinguishable in reports.
 */

import * as fs from "node:fs";

import * as tf from "@tensorflow/tfjs";

import { Bundle } from "./bundle.js";
import { prefixedWidth, readCsv, requireColumn, writeCsv } from "./csv.js";
import { rowPeaks, scaleRows } from "./model.js";
import { estimateSamples } from "./primary.js";

export interface Probe {
  psnrDb: Float64Array;
  deltaT: Float64Array;
  realization: Int32Array;
  samples: Float32Array;
  rows: number;
  n: number;
}

export const ESTIMATE_HEADER = [
  "method",
  "psnr_db",
  "delta_t",
  "realization",
  "k",
  "t_hat",
  "a_hat",
];

/** Read a samples CSV with meta columns (as written by the primary `synth`). */
export function readProbe(path: string): Probe {
  const table = readCsv(path);
  const n = prefixedWidth(table.header, "y");
  if (n === 0) {
    throw new Error(`${path}: no y0.. sample columns`);
  }
  const psnrCol = requireColumn(table, "psnr_db", path);
  const deltaCol = requireColumn(table, "delta_t", path);
  const realCol = requireColumn(table, "realization", path);
  const yCol = requireColumn(table, "y0", path);
  const rows = table.rows.length;
  const probe: Probe = {
    psnrDb: new Float64Array(rows),
    deltaT: new Float64Array(rows),
    realization: new Int32Array(rows),
    samples: new Float32Array(rows * n),
    rows,
    n,
  };
  table.rows.forEach((r, i) => {
    probe.psnrDb[i] = Number(r[psnrCol]);
    probe.deltaT[i] = Number(r[deltaCol]);
    probe.realization[i] = Number(r[realCol]);
    for (let j = 0; j < n; j++) {
      probe.samples[i * n + j] = Number(r[yCol + j]);
    }
  });
  return probe;
}

/** Largest float below tau/2 keeps clipped outputs inside [-tau/2, tau/2). */
function clampHalfOpen(t: number, tau: number): number {
  const hi = tau / 2;
  const lo = -hi;
  if (t < lo) return lo;
  if (t >= hi) return hi - hi * 2 ** -23;
  return t;
}

/** Batched inference: K clipped, ascending locations per input row. */
export function inferDirect(bundle: Bundle, probe: Probe): Float64Array {
  if (probe.n !== bundle.meta.spec.inputWidth) {
    throw new Error(
      `probe width ${probe.n} does not match network input ${bundle.meta.spec.inputWidth}`,
    );
  }
  const k = bundle.meta.spec.outputWidth;
  const tau = bundle.meta.tau;
  const inputs =
    bundle.meta.spec.normalize === "peak"
      ? scaleRows(probe.samples, probe.n, rowPeaks(probe.samples, probe.n, probe.rows))
      : probe.samples;
  const out = tf.tidy(() => {
    const x = tf.tensor3d(inputs, [probe.rows, probe.n, 1]);
    return bundle.model.predict(x, { batchSize: 512 }) as tf.Tensor2D;
  });
  const flat = out.dataSync() as Float32Array;
  out.dispose();
  const result = new Float64Array(probe.rows * k);
  for (let i = 0; i < probe.rows; i++) {
    const row = [];
    for (let j = 0; j < k; j++) {
      row.push(clampHalfOpen(flat[i * k + j], tau));
    }
    row.sort((a, b) => a - b);
    for (let j = 0; j < k; j++) {
      result[i * k + j] = row[j];
    }
  }
  return result;
}

export function writeDirectEstimates(bundle: Bundle, probe: Probe, out: string): void {
  const k = bundle.meta.spec.outputWidth;
  const locations = inferDirect(bundle, probe);
  const rows: (number | string)[][] = [];
  for (let i = 0; i < probe.rows; i++) {
    for (let j = 0; j < k; j++) {
      rows.push([
        "nn_direct",
        probe.psnrDb[i],
        probe.deltaT[i],
        probe.realization[i],
        j,
        locations[i * k + j],
        NaN,
      ]);
    }
  }
  writeCsv(out, ESTIMATE_HEADER, rows);
}

/** Batched denoising: cleaned sample rows at the probe's shape. */
export function denoiseSamples(bundle: Bundle, probe: Probe): Float32Array {
  if (probe.n !== bundle.meta.spec.inputWidth) {
    throw new Error(
      `probe width ${probe.n} does not match network input ${bundle.meta.spec.inputWidth}`,
    );
  }
  const out = tf.tidy(() => {
    const x = tf.tensor3d(probe.samples, [probe.rows, probe.n, 1]);
    return bundle.model.predict(x, { batchSize: 512 }) as tf.Tensor2D;
  });
  const flat = out.dataSync() as Float32Array;
  out.dispose();
  return flat.slice();
}

export function writeDenoisedSamples(
  bundle: Bundle,
  probe: Probe,
  out: string,
): void {
  const denoised = denoiseSamples(bundle, probe);
  const header = ["psnr_db", "delta_t", "realization"];
  for (let j = 0; j < probe.n; j++) {
    header.push(`y${j}`);
  }
  const rows: (number | string)[][] = [];
  for (let i = 0; i < probe.rows; i++) {
    const row: (number | string)[] = [
      probe.psnrDb[i],
      probe.deltaT[i],
      probe.realization[i],
    ];
    for (let j = 0; j < probe.n; j++) {
      row.push(denoised[i * probe.n + j]);
    }
    rows.push(row);
  }
  writeCsv(out, header, rows);
}

/**
 * Full denoiser pipeline: denoise the probe, run the primary matrix
 * pencil on the result, and relabel the rows as nn_denoise_pencil.
 */
export function writeDenoisePencilEstimates(
  bundle: Bundle,
  probe: Probe,
  k: number,
  out: string,
): void {
  const denoisedPath = out.replace(/\.csv$/, "") + ".denoised.csv";
  writeDenoisedSamples(bundle, probe, denoisedPath);
  estimateSamples({ infile: denoisedPath, method: "matrix_pencil", k, out });
  const text = fs.readFileSync(out, "utf8").split("\n");
  const relabeled = text.map((line, i) =>
    i === 0 || line.length === 0
      ? line
      : line.replace(/^matrix_pencil,/, "nn_denoise_pencil,"),
  );
  fs.writeFileSync(out, relabeled.join("\n"));
}
