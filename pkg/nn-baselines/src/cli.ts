/**
 * CLI entry point: train-direct, train-denoiser, evaluate.
 *
 *   node dist/cli.js train-direct   --dataset train30.csv --psnr 30 --out bundles/direct30
 *   node dist/cli.js train-denoiser --dataset train30.csv --psnr 30 --out bundles/den30
 *   node dist/cli.js evaluate --bundle bundles/direct30 --delta 0.01 --psnr 30 \
 *       --realizations 100 --seed 5 --out est.csv
 */

import { parseArgs } from "node:util";

import { loadBundle, saveBundle } from "./bundle.js";
import { loadDataset } from "./dataset.js";
import {
  readProbe,
  writeDenoisePencilEstimates,
  writeDirectEstimates,
} from "./evaluate.js";
import { denoiserSpec, directSpec, ensureBackend, LossKind } from "./model.js";
import { synthProbe } from "./primary.js";
import {
  DESK_PROFILE,
  PAPER_PROFILE,
  denoiserArrays,
  directArrays,
  trainNetwork,
  TrainOptions,
} from "./train.js";

function fail(message: string): never {
  console.error(`error: ${message}`);
  process.exit(2);
}

function profileFor(values: Record<string, unknown>): TrainOptions {
  const base = values.profile === "paper" ? PAPER_PROFILE : DESK_PROFILE;
  const opts = { ...base, log: (line: string) => console.log(line) };
  if (values.epochs !== undefined) opts.epochs = Number(values.epochs);
  if (values["batch-size"] !== undefined) opts.batchSize = Number(values["batch-size"]);
  if (values["learning-rate"] !== undefined) opts.learningRate = Number(values["learning-rate"]);
  if (values.patience !== undefined) opts.patience = Number(values.patience);
  if (values.seed !== undefined) opts.seed = Number(values.seed);
  return opts;
}

const TRAIN_OPTIONS = {
  dataset: { type: "string" },
  psnr: { type: "string" },
  out: { type: "string" },
  profile: { type: "string", default: "desk" },
  loss: { type: "string", default: "l2" },
  rows: { type: "string" },
  epochs: { type: "string" },
  "batch-size": { type: "string" },
  "learning-rate": { type: "string" },
  patience: { type: "string" },
  seed: { type: "string" },
  tau: { type: "string", default: "1" },
} as const;

async function cmdTrain(kind: "direct" | "denoiser", argv: string[]): Promise<void> {
  const { values } = parseArgs({ args: argv, options: TRAIN_OPTIONS });
  if (!values.dataset || !values.out) {
    fail("--dataset and --out are required");
  }
  const profile = profileFor(values);
  const maxRows = values.rows
    ? Number(values.rows)
    : values.profile === "paper"
      ? undefined
      : 10_000;
  const ds = loadDataset(values.dataset, maxRows);
  if (values.psnr !== undefined && Number(values.psnr) !== ds.psnrDb) {
    fail(`dataset is at ${ds.psnrDb} dB, not the requested ${values.psnr} dB`);
  }
  await ensureBackend();
  const spec =
    kind === "direct"
      ? directSpec(ds.n, ds.k, values.loss as LossKind)
      : denoiserSpec(ds.n);
  const data = kind === "direct" ? directArrays(ds) : denoiserArrays(ds);
  console.log(
    `training ${kind} net at ${ds.psnrDb} dB on ${data.rows} rows (${values.profile} profile)`,
  );
  const result = await trainNetwork(spec, data, profile);
  await saveBundle(values.out, result.model, {
    spec,
    trainingPsnrDb: ds.psnrDb,
    datasetHash: ds.sourceHash,
    tau: Number(values.tau),
    metrics: result.metrics,
  });
  console.log(
    `saved ${values.out} (best val loss ${result.bestValLoss.toExponential(3)})`,
  );
}

async function cmdEvaluate(argv: string[]): Promise<void> {
  const { values } = parseArgs({
    args: argv,
    options: {
      bundle: { type: "string" },
      probe: { type: "string" },
      out: { type: "string" },
      psnr: { type: "string" },
      delta: { type: "string" },
      t0: { type: "string", default: "0" },
      amplitudes: { type: "string", default: "2,2" },
      realizations: { type: "string", default: "100" },
      seed: { type: "string", default: "0" },
      k: { type: "string", default: "2" },
    },
  });
  if (!values.bundle || !values.out) {
    fail("--bundle and --out are required");
  }
  await ensureBackend();
  const bundle = loadBundle(values.bundle);
  let probePath = values.probe;
  if (!probePath) {
    if (values.psnr === undefined || values.delta === undefined) {
      fail("--probe or both --psnr and --delta are required");
    }
    const t0 = Number(values.t0);
    const delta = Number(values.delta);
    const amplitudes = values.amplitudes.split(",").map(Number);
    const locations = amplitudes.map((_, j) => t0 + j * delta);
    probePath = values.out.replace(/\.csv$/, "") + ".probe.csv";
    synthProbe(
      {
        locations,
        amplitudes,
        psnrDb: Number(values.psnr),
        seed: Number(values.seed),
        count: Number(values.realizations),
        n: bundle.meta.spec.inputWidth,
        tau: bundle.meta.tau,
      },
      probePath,
    );
  }
  const probe = readProbe(probePath);
  if (bundle.meta.spec.kind === "direct") {
    writeDirectEstimates(bundle, probe, values.out);
  } else {
    writeDenoisePencilEstimates(bundle, probe, Number(values.k), values.out);
  }
  console.log(`wrote ${values.out}`);
}

async function main(): Promise<void> {
  const [command, ...rest] = process.argv.slice(2);
  switch (command) {
    case "train-direct":
      await cmdTrain("direct", rest);
      break;
    case "train-denoiser":
      await cmdTrain("denoiser", rest);
      break;
    case "evaluate":
      await cmdEvaluate(rest);
      break;
    default:
      console.error(
        "usage: cli.js <train-direct|train-denoiser|evaluate> [options]",
      );
      process.exit(2);
  }
}

main().catch((err) => {
  console.error(err instanceof Error ? err.message : err);
  process.exit(1);
});
