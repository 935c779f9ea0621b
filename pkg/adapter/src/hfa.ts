// Minimal reader for the HFA array file format:
// "HFA1" + u8 rank (2|3) + rank x u32 LE dims + product(dims) x f32 LE.

import { readFileSync } from "node:fs";

export interface HfaArray {
  dims: number[];
  values: Float64Array;
}

export function loadHfa(path: string): HfaArray {
  const blob = readFileSync(path);
  if (blob.length < 5 || blob.toString("ascii", 0, 4) !== "HFA1") {
    throw new Error(`${path}: not an HFA file`);
  }
  const rank = blob.readUInt8(4);
  if (rank !== 2 && rank !== 3) {
    throw new Error(`${path}: unsupported rank ${rank}`);
  }
  const dims: number[] = [];
  for (let k = 0; k < rank; k++) {
    dims.push(blob.readUInt32LE(5 + 4 * k));
  }
  const count = dims.reduce((a, b) => a * b, 1);
  const offset = 5 + 4 * rank;
  if (blob.length !== offset + 4 * count) {
    throw new Error(`${path}: payload length mismatch`);
  }
  const values = new Float64Array(count);
  for (let k = 0; k < count; k++) {
    values[k] = blob.readFloatLE(offset + 4 * k);
  }
  return { dims, values };
}
