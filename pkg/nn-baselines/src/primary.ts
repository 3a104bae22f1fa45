/**
 * Thin wrappers around the primary reconstruction toolchain's CLI.
 * Everything the learned estimators need from the signal model (probe
 * synthesis, datasets, subspace estimation, scoring) goes through these
 * subprocess calls; nothing is re-implemented on this side.
 */

import { spawnSync } from "node:child_process";

const PRIMARY = process.env.FRISTREAM_BIN
  ? process.env.FRISTREAM_BIN.split(" ")
  : ["python3", "-m", "fristream.cli"];

export function runPrimary(args: string[]): string {
  const [cmd, ...prefix] = PRIMARY;
  const proc = spawnSync(cmd, [...prefix, ...args], {
    encoding: "utf8",
    maxBuffer: 256 * 1024 * 1024,
  });
  if (proc.error) {
    throw proc.error;
  }
  if (proc.status !== 0) {
    throw new Error(
      `primary CLI failed (${args[0]}, exit ${proc.status}): ${proc.stderr || proc.stdout}`,
    );
  }
  return proc.stdout;
}

export interface ProbeSpec {
  locations: number[];
  amplitudes: number[];
  psnrDb: number;
  seed: number;
  count: number;
  n?: number;
  tau?: number;
}

/** Noisy realizations of one fixed stream, written as a samples CSV. */
export function synthProbe(spec: ProbeSpec, out: string): void {
  runPrimary([
    "synth",
    `--locations=${spec.locations.join(",")}`,
    `--amplitudes=${spec.amplitudes.join(",")}`,
    "--n", String(spec.n ?? 21),
    "--tau", String(spec.tau ?? 1.0),
    "--psnr", String(spec.psnrDb),
    "--seed", String(spec.seed),
    "--count", String(spec.count),
    "--out", out,
  ]);
}

export function exportDataset(opts: {
  size: number;
  psnrDb: number;
  seed: number;
  out: string;
  n?: number;
  k?: number;
}): void {
  runPrimary([
    "dataset",
    "--size", String(opts.size),
    "--psnr", String(opts.psnrDb),
    "--seed", String(opts.seed),
    "--n", String(opts.n ?? 21),
    "--k", String(opts.k ?? 2),
    "--out", opts.out,
  ]);
}

/** Subspace estimation over a samples CSV (columns {prefix}0..{prefix}{N-1}). */
export function estimateSamples(opts: {
  infile: string;
  method: string;
  k: number;
  out: string;
  columnPrefix?: string;
}): void {
  runPrimary([
    "estimate",
    "--in", opts.infile,
    "--method", opts.method,
    "--k", String(opts.k),
    ...(opts.columnPrefix ? ["--column-prefix", opts.columnPrefix] : []),
    "--out", opts.out,
  ]);
}

/** f_sd scoring of an estimate CSV against the sweep-style ground truth. */
export function ingestEstimates(opts: {
  infile: string;
  out: string;
  t0?: number;
  amplitudes?: number[];
}): void {
  runPrimary([
    "ingest",
    "--in", opts.infile,
    "--t0", String(opts.t0 ?? 0),
    "--amplitudes", (opts.amplitudes ?? [2, 2]).join(","),
    "--out", opts.out,
  ]);
}
