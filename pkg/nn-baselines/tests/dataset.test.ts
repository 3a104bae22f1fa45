import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { beforeAll, describe, expect, it } from "vitest";

import { parseCsvText, prefixedWidth } from "../src/csv.js";
import { loadDataset } from "../src/dataset.js";
import { exportDataset } from "../src/primary.js";

let tmp: string;
let datasetPath: string;

beforeAll(() => {
  tmp = fs.mkdtempSync(path.join(os.tmpdir(), "nnb-data-"));
  datasetPath = path.join(tmp, "train.csv");
  exportDataset({ size: 40, psnrDb: 35, seed: 3, out: datasetPath });
}, 60_000);

describe("dataset loading", () => {
  it("reads the primary export format", () => {
    const ds = loadDataset(datasetPath);
    expect(ds.rows).toBe(40);
    expect(ds.n).toBe(21);
    expect(ds.k).toBe(2);
    expect(ds.psnrDb).toBe(35);
    expect(ds.sourceHash).toMatch(/^[0-9a-f]{64}$/);
  });

  it("keeps targets sorted and amplitudes aside", () => {
    const ds = loadDataset(datasetPath);
    for (let i = 0; i < ds.rows; i++) {
      expect(ds.locations[i * 2]).toBeLessThanOrEqual(ds.locations[i * 2 + 1]);
    }
  });

  it("noisy minus clean matches the recorded sigma scale", () => {
    const ds = loadDataset(datasetPath);
    let acc = 0;
    let count = 0;
    for (let i = 0; i < ds.rows; i++) {
      for (let j = 0; j < ds.n; j++) {
        const z = (ds.noisy[i * ds.n + j] - ds.clean[i * ds.n + j]) / ds.sigma[i];
        acc += z * z;
        count += 1;
      }
    }
    expect(Math.sqrt(acc / count)).toBeGreaterThan(0.85);
    expect(Math.sqrt(acc / count)).toBeLessThan(1.15);
  });

  it("honors the row cap used by the desk profile", () => {
    const ds = loadDataset(datasetPath, 10);
    expect(ds.rows).toBe(10);
  });

  it("rejects files with mixed PSNR", () => {
    const text = fs.readFileSync(datasetPath, "utf8").split("\n");
    const broken = [...text];
    broken[2] = broken[2].replace(/^35,/, "30,");
    const badPath = path.join(tmp, "mixed.csv");
    fs.writeFileSync(badPath, broken.join("\n"));
    expect(() => loadDataset(badPath)).toThrow(/mixed psnr_db/);
  });

  it("rejects non-dataset files", () => {
    const badPath = path.join(tmp, "other.csv");
    fs.writeFileSync(badPath, "a,b\n1,2\n");
    expect(() => loadDataset(badPath)).toThrow(/not a dataset/);
  });
});

describe("csv helpers", () => {
  it("counts prefixed column runs", () => {
    expect(prefixedWidth(["y0", "y1", "y2", "t0"], "y")).toBe(3);
    expect(prefixedWidth(["a", "b"], "y")).toBe(0);
  });

  it("flags ragged rows with their line number", () => {
    expect(() => parseCsvText("a,b\n1,2\n3\n", "x.csv")).toThrow(/line 3/);
  });
});
