/**
 * Training loop shared by both estimators: Adam, seeded validation split,
 * early stopping on validation loss with best-weights restore, and a NaN
 * divergence guard that reports the failing epoch.
 */

import * as tf from "@tensorflow/tfjs";

import { Dataset } from "./dataset.js";
import { NetSpec, buildModel, lossName, rowPeaks, scaleRows } from "./model.js";

export interface TrainOptions {
  epochs: number;
  batchSize: number;
  learningRate: number;
  /** epochs without validation improvement before stopping */
  patience: number;
  validationFraction: number;
  seed: number;
  /** epochs at whose start the learning rate is halved */
  lrDecayEpochs?: number[];
  log?: (line: string) => void;
}

/** Reduced profile for single-machine runs: 10k rows, short epoch budget. */
export function deskProfile(kind: "direct" | "denoiser"): TrainOptions {
  if (kind === "direct") {
    return {
      epochs: 28,
      batchSize: 256,
      learningRate: 1.5e-3,
      patience: 6,
      validationFraction: 0.1,
      seed: 1,
      lrDecayEpochs: [17, 23],
    };
  }
  return {
    epochs: 8,
    batchSize: 256,
    learningRate: 1.5e-3,
    patience: 3,
    validationFraction: 0.1,
    seed: 1,
    lrDecayEpochs: [6],
  };
}

export const DESK_PROFILE: TrainOptions = deskProfile("direct");

export const PAPER_PROFILE: TrainOptions = {
  epochs: 100,
  batchSize: 256,
  learningRate: 1e-3,
  patience: 10,
  validationFraction: 0.1,
  seed: 1,
};

export interface EpochMetric {
  epoch: number;
  loss: number;
  valLoss: number;
}

export interface TrainResult {
  model: tf.LayersModel;
  metrics: EpochMetric[];
  bestValLoss: number;
}

/** Deterministic 32-bit PRNG for the shuffle/split. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function shuffledIndices(count: number, seed: number): Uint32Array {
  const rand = mulberry32(seed);
  const idx = new Uint32Array(count);
  for (let i = 0; i < count; i++) idx[i] = i;
  for (let i = count - 1; i > 0; i--) {
    const j = Math.floor(rand() * (i + 1));
    const tmp = idx[i];
    idx[i] = idx[j];
    idx[j] = tmp;
  }
  return idx;
}

function gather(flat: Float32Array, width: number, idx: Uint32Array): Float32Array {
  const out = new Float32Array(idx.length * width);
  for (let i = 0; i < idx.length; i++) {
    out.set(flat.subarray(idx[i] * width, idx[i] * width + width), i * width);
  }
  return out;
}

export interface SupervisedArrays {
  inputs: Float32Array;
  targets: Float32Array;
  inputWidth: number;
  targetWidth: number;
  rows: number;
}

/** Noisy samples to sorted locations (inputs scaled per the spec). */
export function directArrays(ds: Dataset, spec: NetSpec): SupervisedArrays {
  const inputs =
    spec.normalize === "peak"
      ? scaleRows(ds.noisy, ds.n, rowPeaks(ds.noisy, ds.n, ds.rows))
      : ds.noisy;
  return {
    inputs,
    targets: ds.locations,
    inputWidth: ds.n,
    targetWidth: ds.k,
    rows: ds.rows,
  };
}

/** Noisy to clean samples; both sides share the input's row scale. */
export function denoiserArrays(ds: Dataset, spec: NetSpec): SupervisedArrays {
  let inputs = ds.noisy;
  let targets = ds.clean;
  if (spec.normalize === "peak") {
    const peaks = rowPeaks(ds.noisy, ds.n, ds.rows);
    inputs = scaleRows(ds.noisy, ds.n, peaks);
    targets = scaleRows(ds.clean, ds.n, peaks);
  }
  return {
    inputs,
    targets,
    inputWidth: ds.n,
    targetWidth: ds.n,
    rows: ds.rows,
  };
}

export async function trainNetwork(
  spec: NetSpec,
  data: SupervisedArrays,
  opts: TrainOptions,
): Promise<TrainResult> {
  const model = buildModel(spec, opts.seed);
  model.compile({
    optimizer: tf.train.adam(opts.learningRate),
    loss: lossName(spec),
  });

  const order = shuffledIndices(data.rows, opts.seed);
  const valCount = Math.max(1, Math.floor(data.rows * opts.validationFraction));
  const valIdx = order.subarray(0, valCount);
  const trainIdx = order.subarray(valCount);
  const xTrain = tf.tensor3d(
    gather(data.inputs, data.inputWidth, trainIdx),
    [trainIdx.length, data.inputWidth, 1],
  );
  const yTrain = tf.tensor2d(
    gather(data.targets, data.targetWidth, trainIdx),
    [trainIdx.length, data.targetWidth],
  );
  const xVal = tf.tensor3d(
    gather(data.inputs, data.inputWidth, valIdx),
    [valIdx.length, data.inputWidth, 1],
  );
  const yVal = tf.tensor2d(
    gather(data.targets, data.targetWidth, valIdx),
    [valIdx.length, data.targetWidth],
  );

  const metrics: EpochMetric[] = [];
  let bestValLoss = Infinity;
  let bestWeights: tf.Tensor[] | null = null;
  let sinceBest = 0;
  let lr = opts.learningRate;
  try {
    for (let epoch = 1; epoch <= opts.epochs; epoch++) {
      if (opts.lrDecayEpochs?.includes(epoch)) {
        lr /= 2;
        // AdamOptimizer keeps the rate as a plain field; halving it in
        // place preserves the accumulated moments
        (model.optimizer as unknown as { learningRate: number }).learningRate = lr;
        opts.log?.(`learning rate -> ${lr.toExponential(2)}`);
      }
      const history = await model.fit(xTrain, yTrain, {
        epochs: 1,
        batchSize: opts.batchSize,
        validationData: [xVal, yVal],
        shuffle: true,
        verbose: 0,
      });
      const loss = Number(history.history.loss[0]);
      const valLoss = Number(history.history.val_loss[0]);
      if (!Number.isFinite(loss) || !Number.isFinite(valLoss)) {
        throw new Error(`training diverged (non-finite loss) at epoch ${epoch}`);
      }
      metrics.push({ epoch, loss, valLoss });
      opts.log?.(
        `epoch ${epoch}/${opts.epochs}: loss=${loss.toExponential(3)} val=${valLoss.toExponential(3)}`,
      );
      if (valLoss < bestValLoss) {
        bestValLoss = valLoss;
        sinceBest = 0;
        bestWeights?.forEach((w) => w.dispose());
        bestWeights = model.getWeights().map((w) => w.clone());
      } else {
        sinceBest += 1;
        if (sinceBest >= opts.patience) {
          opts.log?.(`early stop at epoch ${epoch} (best val ${bestValLoss.toExponential(3)})`);
          break;
        }
      }
    }
    if (bestWeights) {
      model.setWeights(bestWeights);
    }
  } finally {
    bestWeights?.forEach((w) => w.dispose());
    xTrain.dispose();
    yTrain.dispose();
    xVal.dispose();
    yVal.dispose();
  }
  return { model, metrics, bestValLoss };
}
