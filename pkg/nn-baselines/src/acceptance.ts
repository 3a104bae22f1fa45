/**
 * Desk-scale acceptance run for the learned estimators.
 *
 * Trains the networks the checks need (matched-PSNR, 10k rows each),
 * evaluates them against sweep-style probes, scores everything through
 * the primary's ingest pipeline, and prints one PASS/FAIL line per check:
 *
 *   A. direct inference keeps f_sd below 1e-2 at spacing 1e-2 at some
 *      PSNR in {25, 30, 35} where the matrix pencil is above 1e-2;
 *   B. denoiser + pencil sits strictly below the raw pencil at spacing
 *      1e-2 for PSNR 25..40 dB;
 *   C. at 60 dB and spacing 1e-1 the raw pencil beats direct inference;
 *   D. L1- and L2-trained direct nets land within a factor 2 in f_sd.
 *
 * Usage: node dist/acceptance.js [--work acceptance-work] [--skip-training]
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { parseArgs } from "node:util";

import { loadBundle, saveBundle } from "./bundle.js";
import { readCsv } from "./csv.js";
import { loadDataset } from "./dataset.js";
import {
  readProbe,
  writeDenoisePencilEstimates,
  writeDirectEstimates,
} from "./evaluate.js";
import { denoiserSpec, directSpec, ensureBackend, LossKind } from "./model.js";
import { estimateSamples, exportDataset, ingestEstimates, synthProbe } from "./primary.js";
import { DESK_PROFILE, denoiserArrays, directArrays, trainNetwork } from "./train.js";

const ROWS = 10_000;
const PROBE_REALIZATIONS = 100;
const TAU = 1.0;

interface NetJob {
  name: string;
  kind: "direct" | "denoiser";
  psnrDb: number;
  loss: LossKind;
}

const JOBS: NetJob[] = [
  { name: "direct25", kind: "direct", psnrDb: 25, loss: "l2" },
  { name: "direct30", kind: "direct", psnrDb: 30, loss: "l2" },
  { name: "direct30l1", kind: "direct", psnrDb: 30, loss: "l1" },
  { name: "direct35", kind: "direct", psnrDb: 35, loss: "l2" },
  { name: "direct60", kind: "direct", psnrDb: 60, loss: "l2" },
  { name: "denoise25", kind: "denoiser", psnrDb: 25, loss: "l2" },
  { name: "denoise30", kind: "denoiser", psnrDb: 30, loss: "l2" },
  { name: "denoise35", kind: "denoiser", psnrDb: 35, loss: "l2" },
  { name: "denoise40", kind: "denoiser", psnrDb: 40, loss: "l2" },
];

function log(line: string): void {
  console.log(line);
}

async function trainAll(work: string): Promise<void> {
  for (const job of JOBS) {
    const bundleDir = path.join(work, "bundles", job.name);
    if (fs.existsSync(path.join(bundleDir, "meta.json"))) {
      log(`${job.name}: bundle exists, skipping training`);
      continue;
    }
    const datasetPath = path.join(work, `train_${job.psnrDb}db.csv`);
    if (!fs.existsSync(datasetPath)) {
      log(`exporting ${ROWS}-row dataset at ${job.psnrDb} dB`);
      exportDataset({ size: ROWS, psnrDb: job.psnrDb, seed: 4000 + job.psnrDb, out: datasetPath });
    }
    const ds = loadDataset(datasetPath, ROWS);
    const spec =
      job.kind === "direct" ? directSpec(ds.n, ds.k, job.loss) : denoiserSpec(ds.n);
    const data = job.kind === "direct" ? directArrays(ds) : denoiserArrays(ds);
    log(`training ${job.name} (${job.kind}, ${job.psnrDb} dB, loss ${job.loss})`);
    const t0 = Date.now();
    const result = await trainNetwork(spec, data, {
      ...DESK_PROFILE,
      log: (l) => log(`  ${job.name} ${l}`),
    });
    await saveBundle(bundleDir, result.model, {
      spec,
      trainingPsnrDb: ds.psnrDb,
      datasetHash: ds.sourceHash,
      tau: TAU,
      metrics: result.metrics,
    });
    result.model.dispose();
    log(`  ${job.name} done in ${((Date.now() - t0) / 60000).toFixed(1)} min`);
  }
}

/** f_sd per (method, k) from a scored report CSV, max over k. */
function fsdByMethod(scorePath: string): Map<string, number> {
  const table = readCsv(scorePath);
  const method = table.header.indexOf("method");
  const fsd = table.header.indexOf("f_sd");
  const out = new Map<string, number>();
  for (const row of table.rows) {
    const m = row[method];
    const v = Number(row[fsd]);
    out.set(m, Math.max(out.get(m) ?? 0, v));
  }
  return out;
}

interface CellScores {
  psnrDb: number;
  delta: number;
  fsd: Map<string, number>;
}

async function scoreCell(
  work: string,
  psnrDb: number,
  delta: number,
  bundles: string[],
): Promise<CellScores> {
  const tag = `p${psnrDb}_d${delta}`;
  const probePath = path.join(work, `probe_${tag}.csv`);
  if (!fs.existsSync(probePath)) {
    synthProbe(
      {
        locations: [0, delta],
        amplitudes: [2, 2],
        psnrDb,
        seed: 9000 + psnrDb,
        count: PROBE_REALIZATIONS,
      },
      probePath,
    );
  }
  const probe = readProbe(probePath);
  const estimateFiles: string[] = [];

  const rawPath = path.join(work, `est_raw_${tag}.csv`);
  estimateSamples({ infile: probePath, method: "matrix_pencil", k: 2, out: rawPath });
  estimateFiles.push(rawPath);

  for (const name of bundles) {
    const bundle = loadBundle(path.join(work, "bundles", name));
    const outPath = path.join(work, `est_${name}_${tag}.csv`);
    if (bundle.meta.spec.kind === "direct") {
      writeDirectEstimates(bundle, probe, outPath);
    } else {
      writeDenoisePencilEstimates(bundle, probe, 2, outPath);
    }
    bundle.model.dispose();
    estimateFiles.push(outPath);
  }

  const merged = path.join(work, `est_all_${tag}.csv`);
  mergeEstimateFiles(estimateFiles, merged);
  const scored = path.join(work, `scores_${tag}.csv`);
  ingestEstimates({ infile: merged, out: scored });
  return { psnrDb, delta, fsd: fsdByMethod(scored) };
}

function mergeEstimateFiles(files: string[], out: string): void {
  const pieces: string[] = [];
  files.forEach((f, i) => {
    const lines = fs.readFileSync(f, "utf8").trimEnd().split("\n");
    pieces.push(...(i === 0 ? lines : lines.slice(1)));
  });
  fs.writeFileSync(out, pieces.join("\n") + "\n");
}

function verdict(label: string, ok: boolean, detail: string): boolean {
  log(`[${label}] ${ok ? "PASS" : "FAIL"}: ${detail}`);
  return ok;
}

async function main(): Promise<void> {
  const { values } = parseArgs({
    options: {
      work: { type: "string", default: "acceptance-work" },
      "skip-training": { type: "boolean", default: false },
    },
  });
  const work = values.work;
  fs.mkdirSync(path.join(work, "bundles"), { recursive: true });
  await ensureBackend();
  if (!values["skip-training"]) {
    await trainAll(work);
  }

  const fmt = (v: number | undefined) => (v === undefined ? "n/a" : v.toExponential(2));
  let allOk = true;

  // A: breakdown improvement at spacing 1e-2 (crossover within 30 +/- 5 dB)
  const crossCells: CellScores[] = [];
  for (const psnr of [25, 30, 35]) {
    const direct = psnr === 30 ? "direct30" : `direct${psnr}`;
    crossCells.push(await scoreCell(work, psnr, 0.01, [direct, `denoise${psnr}`]));
  }
  const crossover = crossCells.find(
    (c) =>
      (c.fsd.get("nn_direct") ?? Infinity) < 1e-2 * TAU &&
      (c.fsd.get("matrix_pencil") ?? 0) > 1e-2 * TAU,
  );
  allOk =
    verdict(
      "secondary A",
      crossover !== undefined,
      "direct < 1e-2 while pencil > 1e-2 at spacing 1e-2: " +
        crossCells
          .map(
            (c) =>
              `${c.psnrDb}dB direct=${fmt(c.fsd.get("nn_direct"))} pencil=${fmt(c.fsd.get("matrix_pencil"))}`,
          )
          .join("; "),
    ) && allOk;

  // B: denoiser+pencil strictly below raw pencil over 25..40 dB at 1e-2
  const denoiserCells: CellScores[] = [...crossCells];
  denoiserCells.push(await scoreCell(work, 40, 0.01, ["denoise40"]));
  const bOk = denoiserCells.every(
    (c) => (c.fsd.get("nn_denoise_pencil") ?? Infinity) < (c.fsd.get("matrix_pencil") ?? 0),
  );
  allOk =
    verdict(
      "secondary B",
      bOk,
      "denoiser+pencil vs raw pencil at spacing 1e-2: " +
        denoiserCells
          .map(
            (c) =>
              `${c.psnrDb}dB ${fmt(c.fsd.get("nn_denoise_pencil"))} vs ${fmt(c.fsd.get("matrix_pencil"))}`,
          )
          .join("; "),
    ) && allOk;

  // C: raw pencil beats direct inference at 60 dB, spacing 1e-1
  const high = await scoreCell(work, 60, 0.1, ["direct60"]);
  const cOk =
    (high.fsd.get("matrix_pencil") ?? Infinity) < (high.fsd.get("nn_direct") ?? 0);
  allOk =
    verdict(
      "secondary C",
      cOk,
      `60dB spacing 1e-1: pencil=${fmt(high.fsd.get("matrix_pencil"))} direct=${fmt(high.fsd.get("nn_direct"))}`,
    ) && allOk;

  // D: L1 and L2 direct nets within a factor 2 at 30 dB
  const l1Cell = await scoreCell(work, 30, 0.01, ["direct30l1"]);
  const l2 = crossCells[1].fsd.get("nn_direct");
  const l1 = l1Cell.fsd.get("nn_direct");
  const dOk =
    l1 !== undefined && l2 !== undefined && l1 / l2 < 2 && l2 / l1 < 2;
  allOk =
    verdict(
      "secondary D",
      dOk,
      `direct f_sd at 30dB: L2=${fmt(l2)} L1=${fmt(l1)}`,
    ) && allOk;

  const summary = {
    cells: [...crossCells, ...denoiserCells.slice(3), high, l1Cell].map((c) => ({
      psnr_db: c.psnrDb,
      delta: c.delta,
      f_sd: Object.fromEntries(c.fsd),
    })),
  };
  fs.writeFileSync(
    path.join(work, "acceptance_summary.json"),
    JSON.stringify(summary, null, 2) + "\n",
  );
  log(allOk ? "all secondary checks passed" : "secondary checks FAILED");
  process.exit(allOk ? 0 : 1);
}

main().catch((err) => {
  console.error(err instanceof Error ? (err.stack ?? err.message) : err);
  process.exit(1);
});
