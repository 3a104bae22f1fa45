import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { beforeAll, describe, expect, it } from "vitest";

import { loadBundle, saveBundle } from "../src/bundle.js";
import { readCsv } from "../src/csv.js";
import { loadDataset } from "../src/dataset.js";
import {
  ESTIMATE_HEADER,
  inferDirect,
  readProbe,
  writeDenoisePencilEstimates,
  writeDirectEstimates,
} from "../src/evaluate.js";
import { ensureBackend, NetSpec } from "../src/model.js";
import { exportDataset, ingestEstimates, synthProbe } from "../src/primary.js";
import { denoiserArrays, directArrays, trainNetwork } from "../src/train.js";

let tmp: string;
let probePath: string;
let directDir: string;
let denoiserDir: string;

const NARROW = { layers: 3, filters: 8, kernelSize: 3 };

beforeAll(async () => {
  await ensureBackend();
  tmp = fs.mkdtempSync(path.join(os.tmpdir(), "nnb-eval-"));
  probePath = path.join(tmp, "probe.csv");
  synthProbe(
    { locations: [0, 0.1], amplitudes: [2, 2], psnrDb: 45, seed: 5, count: 12 },
    probePath,
  );
  const datasetPath = path.join(tmp, "train.csv");
  exportDataset({ size: 256, psnrDb: 45, seed: 6, out: datasetPath });
  const ds = loadDataset(datasetPath);
  const directSpecNarrow: NetSpec = {
    kind: "direct",
    inputWidth: ds.n,
    outputWidth: ds.k,
    conv: NARROW,
    fcWidths: [64, 32],
    loss: "l2",
  };
  const denoiserSpecNarrow: NetSpec = {
    kind: "denoiser",
    inputWidth: ds.n,
    outputWidth: ds.n,
    conv: NARROW,
    fcWidths: [64, 32],
    loss: "l2",
  };
  const opts = {
    epochs: 40,
    batchSize: 64,
    learningRate: 2e-3,
    patience: 40,
    validationFraction: 0.1,
    seed: 4,
  };
  const direct = await trainNetwork(directSpecNarrow, directArrays(ds), opts);
  directDir = path.join(tmp, "direct");
  await saveBundle(directDir, direct.model, {
    spec: directSpecNarrow,
    trainingPsnrDb: ds.psnrDb,
    datasetHash: ds.sourceHash,
    tau: 1,
    metrics: direct.metrics,
  });
  direct.model.dispose();
  const denoiser = await trainNetwork(denoiserSpecNarrow, denoiserArrays(ds), opts);
  denoiserDir = path.join(tmp, "denoiser");
  await saveBundle(denoiserDir, denoiser.model, {
    spec: denoiserSpecNarrow,
    trainingPsnrDb: ds.psnrDb,
    datasetHash: ds.sourceHash,
    tau: 1,
    metrics: denoiser.metrics,
  });
  denoiser.model.dispose();
}, 300_000);

describe("probe files", () => {
  it("parses the primary synth output", () => {
    const probe = readProbe(probePath);
    expect(probe.rows).toBe(12);
    expect(probe.n).toBe(21);
    expect(probe.psnrDb[0]).toBe(45);
    expect(probe.deltaT[0]).toBeCloseTo(0.1, 12);
  });
});

describe("direct inference", () => {
  it("is deterministic and batch-order invariant", () => {
    const bundle = loadBundle(directDir);
    const probe = readProbe(probePath);
    const a = inferDirect(bundle, probe);
    const b = inferDirect(bundle, probe);
    expect(Array.from(b)).toEqual(Array.from(a));
    // single-row probe gives the same row result
    const single = { ...probe, rows: 1, samples: probe.samples.slice(0, probe.n) };
    const first = inferDirect(bundle, single);
    expect(first[0]).toBeCloseTo(a[0], 5);
    expect(first[1]).toBeCloseTo(a[1], 5);
    bundle.model.dispose();
  });

  it("outputs sorted locations inside the period", () => {
    const bundle = loadBundle(directDir);
    const probe = readProbe(probePath);
    const locations = inferDirect(bundle, probe);
    for (let i = 0; i < probe.rows; i++) {
      const t0 = locations[i * 2];
      const t1 = locations[i * 2 + 1];
      expect(t0).toBeLessThanOrEqual(t1);
      expect(t0).toBeGreaterThanOrEqual(-0.5);
      expect(t1).toBeLessThan(0.5);
    }
    bundle.model.dispose();
  });

  it("rejects probes of the wrong width", () => {
    const bundle = loadBundle(directDir);
    const probe = readProbe(probePath);
    const bad = { ...probe, n: 11, samples: probe.samples.slice(0, probe.rows * 11) };
    expect(() => inferDirect(bundle, bad)).toThrow(/width/);
    bundle.model.dispose();
  });

  it("writes estimate files the primary ingest accepts", () => {
    const bundle = loadBundle(directDir);
    const probe = readProbe(probePath);
    const est = path.join(tmp, "est_direct.csv");
    writeDirectEstimates(bundle, probe, est);
    const table = readCsv(est);
    expect(table.header).toEqual(ESTIMATE_HEADER);
    expect(table.rows.length).toBe(12 * 2);
    const scored = path.join(tmp, "scores_direct.csv");
    ingestEstimates({ infile: est, out: scored });
    const report = readCsv(scored);
    expect(report.rows.length).toBe(2); // one row per k
    bundle.model.dispose();
  });
});

describe("denoiser pipeline", () => {
  it("feeds the primary matrix pencil and relabels the method", () => {
    const bundle = loadBundle(denoiserDir);
    const probe = readProbe(probePath);
    const est = path.join(tmp, "est_denoise.csv");
    writeDenoisePencilEstimates(bundle, probe, 2, est);
    const table = readCsv(est);
    expect(table.header).toEqual(ESTIMATE_HEADER);
    expect(new Set(table.rows.map((r) => r[0]))).toEqual(new Set(["nn_denoise_pencil"]));
    const scored = path.join(tmp, "scores_denoise.csv");
    ingestEstimates({ infile: est, out: scored });
    expect(readCsv(scored).rows.length).toBe(2);
    // the denoised samples file also exists and has the probe's shape
    const denoised = readCsv(est.replace(/\.csv$/, "") + ".denoised.csv");
    expect(denoised.rows.length).toBe(12);
    bundle.model.dispose();
  });
});
