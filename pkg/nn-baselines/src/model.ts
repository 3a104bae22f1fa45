/**
 * Network definitions for the two learned estimators.
 *
 * Both share a front-end of 3 convolutional layers (100 filters of width
 * 3, ReLU) followed by 3 fully connected layers:
 *   - direct net:   FC widths (100N, 20N, K), outputs K sorted locations
 *   - denoiser net: FC widths (100N, 20N, N), outputs clean samples
 *
 * Width-3 same-padded convolutions are expressed as shift/concat plus a
 * single matmul per layer (ShiftConv1D) so that training works on the
 * WASM backend, whose dedicated conv gradient kernels are unavailable;
 * the arithmetic and the parameter count are identical to a standard
 * conv1d layer.
 */

import * as path from "node:path";
import { fileURLToPath } from "node:url";

import * as tf from "@tensorflow/tfjs";
import { setWasmPaths } from "@tensorflow/tfjs-backend-wasm";

export type LossKind = "l1" | "l2";

export interface ConvSpec {
  layers: number;
  filters: number;
  kernelSize: number;
}

export interface NetSpec {
  kind: "direct" | "denoiser";
  inputWidth: number;
  outputWidth: number;
  conv: ConvSpec;
  /** Hidden fully connected widths; the output layer supplies the third. */
  fcWidths: [number, number];
  loss: LossKind;
  /**
   * Input preprocessing. "peak" divides each sample row by its largest
   * magnitude (the location task is invariant to amplitude scale; the
   * denoiser's targets are scaled by the same factor and restored after
   * prediction). Recorded in the bundle and applied identically at
   * inference.
   */
  normalize: "peak" | "none";
}

export const DEFAULT_CONV: ConvSpec = { layers: 3, filters: 100, kernelSize: 3 };

export function directSpec(n: number, k: number, loss: LossKind = "l2"): NetSpec {
  return {
    kind: "direct",
    inputWidth: n,
    outputWidth: k,
    conv: DEFAULT_CONV,
    fcWidths: [100 * n, 20 * n],
    loss,
    normalize: "peak",
  };
}

export function denoiserSpec(n: number): NetSpec {
  return {
    kind: "denoiser",
    inputWidth: n,
    outputWidth: n,
    conv: DEFAULT_CONV,
    fcWidths: [100 * n, 20 * n],
    loss: "l2",
    normalize: "peak",
  };
}

/** Per-row scale factors max_j |row_j| (floored away from zero). */
export function rowPeaks(flat: Float32Array, width: number, rows: number): Float32Array {
  const peaks = new Float32Array(rows);
  for (let i = 0; i < rows; i++) {
    let peak = 0;
    for (let j = 0; j < width; j++) {
      const v = Math.abs(flat[i * width + j]);
      if (v > peak) peak = v;
    }
    peaks[i] = peak > 1e-30 ? peak : 1;
  }
  return peaks;
}

/** flat scaled row-wise by 1/peaks (a copy; the input is untouched). */
export function scaleRows(
  flat: Float32Array,
  width: number,
  peaks: Float32Array,
): Float32Array {
  const out = new Float32Array(flat.length);
  for (let i = 0; i < peaks.length; i++) {
    const inv = 1 / peaks[i];
    for (let j = 0; j < width; j++) {
      out[i * width + j] = flat[i * width + j] * inv;
    }
  }
  return out;
}

let backendReady: Promise<string> | null = null;

/** Initialize the fastest available backend (wasm, falling back to cpu). */
export function ensureBackend(): Promise<string> {
  if (!backendReady) {
    backendReady = (async () => {
      tf.enableProdMode();
      try {
        const wasmDir = path.join(
          path.dirname(fileURLToPath(import.meta.url)),
          "..",
          "node_modules",
          "@tensorflow",
          "tfjs-backend-wasm",
          "wasm-out/",
        );
        setWasmPaths(wasmDir);
        if (await tf.setBackend("wasm")) {
          await tf.ready();
          return "wasm";
        }
      } catch {
        // fall through to cpu
      }
      await tf.setBackend("cpu");
      await tf.ready();
      return "cpu";
    })();
  }
  return backendReady;
}

interface ShiftConvArgs {
  filters: number;
  kernelSize: number;
  relu: boolean;
  seed: number;
  name?: string;
}

/**
 * Same-padded 1-d convolution built from shifted copies and one matmul.
 * Weight layout: kernel [kernelSize * cin, filters], bias [filters].
 */
class ShiftConv1D extends tf.layers.Layer {
  static className = "ShiftConv1D";
  private filters: number;
  private kernelSize: number;
  private relu: boolean;
  private seed: number;
  private cin = 0;
  private kernel!: ReturnType<tf.layers.Layer["addWeight"]>;
  private bias!: ReturnType<tf.layers.Layer["addWeight"]>;

  constructor(args: ShiftConvArgs) {
    super({ name: args.name });
    this.filters = args.filters;
    this.kernelSize = args.kernelSize;
    this.relu = args.relu;
    this.seed = args.seed;
    if (this.kernelSize % 2 !== 1) {
      throw new Error("ShiftConv1D needs an odd kernel size for same padding");
    }
  }

  override build(inputShape: tf.Shape | tf.Shape[]): void {
    const shape = (Array.isArray(inputShape[0]) ? inputShape[0] : inputShape) as number[];
    this.cin = shape[2];
    this.kernel = this.addWeight(
      "kernel",
      [this.kernelSize * this.cin, this.filters],
      "float32",
      tf.initializers.glorotUniform({ seed: this.seed }),
    );
    this.bias = this.addWeight(
      "bias",
      [this.filters],
      "float32",
      tf.initializers.zeros(),
    );
    this.built = true;
  }

  override computeOutputShape(inputShape: tf.Shape): tf.Shape {
    return [inputShape[0], inputShape[1], this.filters];
  }

  override call(inputs: tf.Tensor | tf.Tensor[]): tf.Tensor {
    return tf.tidy(() => {
      const x = (Array.isArray(inputs) ? inputs[0] : inputs) as tf.Tensor3D;
      const width = x.shape[1];
      const half = (this.kernelSize - 1) / 2;
      const shifted: tf.Tensor3D[] = [];
      for (let offset = -half; offset <= half; offset++) {
        shifted.push(shiftAlongWidth(x, offset));
      }
      const patches = tf.concat(shifted, 2);
      let out = tf
        .matMul(patches.reshape([-1, this.kernelSize * this.cin]), this.kernel.read() as tf.Tensor2D)
        .add(this.bias.read())
        .reshape([-1, width, this.filters]);
      if (this.relu) {
        out = tf.relu(out);
      }
      return out;
    });
  }

  override getConfig(): tf.serialization.ConfigDict {
    return {
      ...super.getConfig(),
      filters: this.filters,
      kernelSize: this.kernelSize,
      relu: this.relu,
      seed: this.seed,
    };
  }
}

tf.serialization.registerClass(ShiftConv1D);

/** x shifted by `offset` along the width axis, zero padded (same-length). */
function shiftAlongWidth(x: tf.Tensor3D, offset: number): tf.Tensor3D {
  if (offset === 0) {
    return x;
  }
  const width = x.shape[1];
  const pad = tf.zeros<tf.Rank.R3>([x.shape[0], Math.abs(offset), x.shape[2]]);
  if (offset < 0) {
    const body = x.slice([0, 0, 0], [-1, width + offset, -1]);
    return tf.concat([pad, body], 1);
  }
  const body = x.slice([0, offset, 0], [-1, width - offset, -1]);
  return tf.concat([body, pad], 1);
}

export function buildModel(spec: NetSpec, seed = 1): tf.LayersModel {
  const input = tf.input({ shape: [spec.inputWidth, 1] });
  let h: tf.SymbolicTensor = input;
  for (let i = 0; i < spec.conv.layers; i++) {
    h = new ShiftConv1D({
      filters: spec.conv.filters,
      kernelSize: spec.conv.kernelSize,
      relu: true,
      seed: seed + i,
      name: `conv${i + 1}`,
    }).apply(h) as tf.SymbolicTensor;
  }
  h = tf.layers.flatten().apply(h) as tf.SymbolicTensor;
  for (let i = 0; i < spec.fcWidths.length; i++) {
    h = tf.layers
      .dense({
        units: spec.fcWidths[i],
        activation: "relu",
        kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 100 + i }),
        name: `fc${i + 1}`,
      })
      .apply(h) as tf.SymbolicTensor;
  }
  const out = tf.layers
    .dense({
      units: spec.outputWidth,
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 200 }),
      name: "out",
    })
    .apply(h) as tf.SymbolicTensor;
  return tf.model({ inputs: input, outputs: out });
}

export function lossName(spec: NetSpec): string {
  return spec.loss === "l1" ? "meanAbsoluteError" : "meanSquaredError";
}

/** Parameter count implied by the spec fields (the audit oracle). */
export function expectedParameterCount(spec: NetSpec): number {
  let total = 0;
  let channels = 1;
  for (let i = 0; i < spec.conv.layers; i++) {
    total += spec.conv.kernelSize * channels * spec.conv.filters + spec.conv.filters;
    channels = spec.conv.filters;
  }
  let width = spec.inputWidth * channels;
  for (const fc of spec.fcWidths) {
    total += width * fc + fc;
    width = fc;
  }
  total += width * spec.outputWidth + spec.outputWidth;
  return total;
}

/** Throws unless the built model carries exactly the declared weights. */
export function auditArchitecture(model: tf.LayersModel, spec: NetSpec): void {
  const expected = expectedParameterCount(spec);
  const got = model.countParams();
  if (got !== expected) {
    throw new Error(`architecture mismatch: ${got} parameters, expected ${expected}`);
  }
  const outShape = model.outputs[0].shape;
  if (outShape[outShape.length - 1] !== spec.outputWidth) {
    throw new Error(`output width ${outShape[outShape.length - 1]}, expected ${spec.outputWidth}`);
  }
}
