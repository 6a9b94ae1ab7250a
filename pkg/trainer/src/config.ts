/** Harness configuration; every CLI flag mirrors a field here and a JSON
 *  config file can set any subset. */

import * as fs from "node:fs";
import { DEFAULT_MODEL, ModelConfig } from "./model.js";
import { DEFAULT_TREE, TreeConfig } from "./gbdt.js";

export interface HarnessConfig {
  seed: number;
  trainStart: number;
  trainEnd: number;
  trainMix: string;
  task: "family" | "equation";
  rawFeatures: boolean;
  batch: number;
  lr: number;
  maxSteps: number;
  minSteps: number;
  evalEvery: number;
  patience: number;
  valFraction: number;
  bucketExponents: number[];
  bucketCount: number;
  breakdownCount: number;
  breakdownBuckets: number[];
  model: ModelConfig;
  tree: TreeConfig;
  outDir: string;
}

// Training length is a real hyperparameter here: in-distribution validation
// saturates within ~150 steps, while length generalization peaks around 800
// steps and then degrades as the trained positional rows drift away from
// their sinusoidal tail. The budget is therefore fixed rather than left to
// the (in-distribution) early stopper.
export const DEFAULT_CONFIG: HarnessConfig = {
  seed: 11,
  trainStart: 1,
  trainEnd: 1000,
  trainMix: "PA01=1",
  task: "family",
  rawFeatures: false,
  batch: 128,
  lr: 3e-4,
  maxSteps: 800,
  minSteps: 800,
  evalEvery: 100,
  patience: 99,
  valFraction: 0.1,
  bucketExponents: [3, 9, 15, 20, 50],
  bucketCount: 400,
  breakdownCount: 60,
  breakdownBuckets: [3, 9, 15, 20, 50],
  model: DEFAULT_MODEL,
  tree: DEFAULT_TREE,
  outDir: "runs/latest",
};

export function loadConfig(file: string | null, overrides: Partial<HarnessConfig> = {}): HarnessConfig {
  let fromFile: Partial<HarnessConfig> = {};
  if (file) {
    fromFile = JSON.parse(fs.readFileSync(file, "utf8"));
  }
  return {
    ...DEFAULT_CONFIG,
    ...fromFile,
    ...overrides,
    model: { ...DEFAULT_MODEL, ...(fromFile.model ?? {}), ...(overrides.model ?? {}) },
    tree: { ...DEFAULT_TREE, ...(fromFile.tree ?? {}), ...(overrides.tree ?? {}) },
  };
}
