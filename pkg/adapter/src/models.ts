// Scoring models the adapter can serve. A model scores one tensor
// (c*h*w values, channel-major) and may expose multiple target classes.
//
// Built-ins: "sum" (uniform weighted sum) and "weighted" (per-class
// weight fields from an HFA file). registerModel is the hook point for
// wiring in a real classifier.

import { loadHfa } from "./hfa.js";
import type { Shape } from "./protocol.js";

export interface ScoringModel {
  classCount: number;
  score(values: Float64Array, shape: Shape, target: number): number;
}

class WeightedSumModel implements ScoringModel {
  // one weight field per class, each h*w long, applied per channel
  constructor(private readonly classWeights: Float64Array[]) {}

  get classCount(): number {
    return this.classWeights.length;
  }

  score(values: Float64Array, shape: Shape, target: number): number {
    const weights = this.classWeights[target];
    const perChannel = shape.h * shape.w;
    let total = 0;
    for (let c = 0; c < shape.c; c++) {
      const base = c * perChannel;
      for (let i = 0; i < perChannel; i++) {
        total += weights[i] * values[base + i];
      }
    }
    return total;
  }
}

type ModelFactory = (shape: Shape, weightsPath?: string) => ScoringModel;

const registry = new Map<string, ModelFactory>();

export function registerModel(name: string, factory: ModelFactory): void {
  registry.set(name, factory);
}

registerModel("sum", (shape) => {
  const uniform = new Float64Array(shape.h * shape.w).fill(1);
  return new WeightedSumModel([uniform]);
});

registerModel("weighted", (shape, weightsPath) => {
  if (!weightsPath) {
    throw new Error("weighted model needs --weights <file.hfa>");
  }
  const { dims, values } = loadHfa(weightsPath);
  const fieldDims = dims.length === 2 ? dims : dims.slice(1);
  if (fieldDims[0] !== shape.h || fieldDims[1] !== shape.w) {
    throw new Error(
      `weights are ${fieldDims[0]}x${fieldDims[1]} but the advertised shape is ${shape.h}x${shape.w}`,
    );
  }
  const per = shape.h * shape.w;
  const classes = dims.length === 2 ? 1 : dims[0];
  const fields: Float64Array[] = [];
  for (let k = 0; k < classes; k++) {
    fields.push(values.slice(k * per, (k + 1) * per));
  }
  return new WeightedSumModel(fields);
});

export function resolveModel(name: string, shape: Shape, weightsPath?: string): ScoringModel {
  const factory = registry.get(name);
  if (!factory) {
    throw new Error(`unknown model ${name}; registered: ${[...registry.keys()].join(", ")}`);
  }
  return factory(shape, weightsPath);
}
