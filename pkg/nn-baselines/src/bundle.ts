/**
 * Trained-model bundles: a directory with the spec echo and training
 * metadata (meta.json) plus the raw float32 weights (weights.bin).
 * Reloading rebuilds the architecture from the spec and restores the
 * weights verbatim, so predictions are bit-identical.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import * as tf from "@tensorflow/tfjs";

import { EpochMetric } from "./train.js";
import { NetSpec, auditArchitecture, buildModel } from "./model.js";

export interface BundleMeta {
  spec: NetSpec;
  trainingPsnrDb: number;
  datasetHash: string;
  tau: number;
  metrics: EpochMetric[];
  weightShapes: number[][];
}

export interface Bundle {
  meta: BundleMeta;
  model: tf.LayersModel;
}

export async function saveBundle(
  dir: string,
  model: tf.LayersModel,
  meta: Omit<BundleMeta, "weightShapes">,
): Promise<void> {
  fs.mkdirSync(dir, { recursive: true });
  const weights = model.getWeights();
  const arrays = await Promise.all(weights.map((w) => w.data() as Promise<Float32Array>));
  const total = arrays.reduce((acc, a) => acc + a.length, 0);
  const flat = new Float32Array(total);
  let offset = 0;
  for (const a of arrays) {
    flat.set(a, offset);
    offset += a.length;
  }
  fs.writeFileSync(path.join(dir, "weights.bin"), Buffer.from(flat.buffer));
  const full: BundleMeta = { ...meta, weightShapes: weights.map((w) => w.shape.slice()) };
  fs.writeFileSync(path.join(dir, "meta.json"), JSON.stringify(full, null, 2) + "\n");
}

export function loadBundle(dir: string): Bundle {
  const meta = JSON.parse(
    fs.readFileSync(path.join(dir, "meta.json"), "utf8"),
  ) as BundleMeta;
  const model = buildModel(meta.spec);
  auditArchitecture(model, meta.spec);
  const raw = fs.readFileSync(path.join(dir, "weights.bin"));
  const flat = new Float32Array(raw.buffer, raw.byteOffset, raw.byteLength / 4);
  const tensors: tf.Tensor[] = [];
  let offset = 0;
  for (const shape of meta.weightShapes) {
    const size = shape.reduce((a, b) => a * b, 1);
    tensors.push(tf.tensor(flat.slice(offset, offset + size), shape));
    offset += size;
  }
  if (offset !== flat.length) {
    throw new Error(`${dir}: weights.bin size does not match recorded shapes`);
  }
  model.setWeights(tensors);
  tensors.forEach((t) => t.dispose());
  return { meta, model };
}
