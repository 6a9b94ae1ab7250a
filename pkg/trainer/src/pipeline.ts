/** End-to-end harness: data generation (through the factory CLI), tree and
 *  transformer training, magnitude-bucket evaluation, and the perturbation
 *  sweep. Produces table1.csv, breakdown.csv, delta_sweep.csv and
 *  training_log.json under the configured output directory. */

import * as fs from "node:fs";
import * as path from "node:path";

import { Adam } from "./adam.js";
import { HarnessConfig } from "./config.js";
import {
  FeatureRow,
  ShardRecord,
  extractFeatures,
  featureMatrix,
  generateBalanced,
  readFeatures,
  readShard,
  runCli,
  shardFiles,
} from "./data.js";
import { Gbdt } from "./gbdt.js";
import { ArithmeticVerifier, TripleBatch, batchFromStrings } from "./model.js";
import { Prng } from "./prng.js";

export interface BucketEval {
  exponent: number;
  treeAccuracy: number | null;
  transformerAccuracy: number | null;
}

export interface BreakdownRow {
  exponent: number;
  attack: string;
  treeAccuracy: number | null;
  transformerAccuracy: number | null;
}

export interface SweepPoint {
  epsilon: number;
  meanPNeg: number;
}

const ALL_ATTACKS = [
  "PA01", "PA02", "PA03",
  "AR01", "AR02", "AR03", "AR04", "AR05",
  "ST01", "ST02", "ST03",
];

// --- dataset plumbing --------------------------------------------------

function bucketRange(cfg: HarnessConfig, exponent: number): { start: bigint; end: bigint } {
  if (exponent === 3) {
    // the training magnitude: in-distribution bucket
    return { start: BigInt(cfg.trainStart), end: BigInt(cfg.trainEnd) };
  }
  const start = 10n ** BigInt(exponent);
  return { start, end: start + BigInt(cfg.bucketCount) - 1n };
}

function datasetDir(cfg: HarnessConfig, name: string): string {
  return path.join(cfg.outDir, "data", name);
}

function bucketShards(cfg: HarnessConfig, exponent: number, mix: string, seed: number, name: string): string[] | null {
  const { start, end } = bucketRange(cfg, exponent);
  const dir = datasetDir(cfg, name);
  try {
    return generateBalanced({ start, end, mix, seed, outDir: dir });
  } catch {
    // some attacks are inapplicable at some magnitudes (e.g. the 1e-15
    // relative drift below c = 5e14); report them as absent, not as zero
    fs.rmSync(dir, { recursive: true, force: true });
    return null;
  }
}

function labelTarget(label: ShardRecord["label"], task: HarnessConfig["task"]): number {
  if (task === "equation") return label === "neg_eq" ? 0 : 1;
  return label === "pos" ? 1 : 0;
}

// --- tree --------------------------------------------------------------

export function trainTree(cfg: HarnessConfig, mode: "float" | "exact" = "float"): Gbdt {
  const dir = datasetDir(cfg, "train");
  const shards = generateBalanced({
    start: BigInt(cfg.trainStart),
    end: BigInt(cfg.trainEnd),
    mix: cfg.trainMix,
    seed: cfg.seed,
    outDir: dir,
  });
  const rows: FeatureRow[] = [];
  const raws: ShardRecord[] = [];
  for (const shard of shards) {
    const fcsv = extractFeatures(shard, mode, shard.replace(/\.csv$/, `.${mode}.features.csv`));
    rows.push(...readFeatures(fcsv));
    raws.push(...readShard(shard));
  }
  const { x, y } = featureMatrix(rows, cfg.rawFeatures ? raws : undefined);
  const tree = new Gbdt({ ...cfg.tree, seed: cfg.seed });
  tree.fit(x, y);
  return tree;
}

function treeBalancedAccuracy(tree: Gbdt, rows: FeatureRow[], raws: ShardRecord[] | undefined): number {
  const { x, y } = featureMatrix(rows, raws);
  let posOk = 0, pos = 0, negOk = 0, neg = 0;
  for (let i = 0; i < x.length; i++) {
    const predNeg = tree.predict(x[i]) >= 0.5 ? 1 : 0;
    if (y[i] === 0) {
      pos += 1;
      if (predNeg === 0) posOk += 1;
    } else {
      neg += 1;
      if (predNeg === 1) negOk += 1;
    }
  }
  if (pos === 0 || neg === 0) throw new Error("bucket is not balanced");
  return 0.5 * (posOk / pos + negOk / neg);
}

export function evalTreeOnBucket(
  cfg: HarnessConfig, tree: Gbdt, exponent: number, mix: string, seed: number, name: string,
  mode: "float" | "exact" = "float",
): number | null {
  const shards = bucketShards(cfg, exponent, mix, seed, name);
  if (!shards) return null;
  const rows: FeatureRow[] = [];
  const raws: ShardRecord[] = [];
  for (const shard of shards) {
    const fcsv = extractFeatures(shard, mode, shard.replace(/\.csv$/, `.${mode}.features.csv`));
    rows.push(...readFeatures(fcsv));
    raws.push(...readShard(shard));
  }
  return treeBalancedAccuracy(tree, rows, cfg.rawFeatures ? raws : undefined);
}

// --- transformer ---------------------------------------------------------

export interface TrainingLog {
  config: unknown;
  steps: number;
  wallSeconds: number;
  stopReason: string;
  valAccuracy: number[];
  lossSamples: { step: number; loss: number }[];
  optimizer: { kind: string; lr: number; batch: number };
}

export function trainTransformer(
  cfg: HarnessConfig,
  onProgress?: (step: number, loss: number) => void,
): { model: ArithmeticVerifier; log: TrainingLog } {
  const dir = datasetDir(cfg, "train");
  const shards = generateBalanced({
    start: BigInt(cfg.trainStart),
    end: BigInt(cfg.trainEnd),
    mix: cfg.trainMix,
    seed: cfg.seed,
    outDir: dir,
  });
  if (cfg.trainEnd > 1000) {
    throw new Error("training shards are restricted to generator indices <= 1000");
  }
  const records = shards.flatMap(readShard);
  const rng = new Prng(cfg.seed * 7919 + 5);
  const order = Int32Array.from(records.keys());
  rng.shuffle(order);
  const valCount = Math.max(1, Math.floor(records.length * cfg.valFraction));
  const valIdx = Array.from(order.slice(0, valCount));
  const trainIdx = Array.from(order.slice(valCount));

  const model = new ArithmeticVerifier(cfg.model, cfg.seed);
  const adam = new Adam(model.parameters(), cfg.lr);

  const makeBatch = (idxs: number[]): { batch: TripleBatch; targets: Float64Array } => {
    const rs = idxs.map((i) => records[i]);
    const batch = batchFromStrings(rs.map((r) => r.a), rs.map((r) => r.b), rs.map((r) => r.c));
    const targets = Float64Array.from(rs.map((r) => labelTarget(r.label, cfg.task)));
    return { batch, targets };
  };

  const valAccuracy = (): number => {
    let ok = 0;
    for (let off = 0; off < valIdx.length; off += 256) {
      const part = valIdx.slice(off, off + 256);
      const { batch, targets } = makeBatch(part);
      const probs = model.predict(batch);
      for (let i = 0; i < part.length; i++) {
        ok += (probs[i] >= 0.5 ? 1 : 0) === targets[i] ? 1 : 0;
      }
    }
    return ok / valIdx.length;
  };

  const log: TrainingLog = {
    config: cfg,
    steps: 0,
    wallSeconds: 0,
    stopReason: "max-steps",
    valAccuracy: [],
    lossSamples: [],
    optimizer: { kind: "adam", lr: cfg.lr, batch: cfg.batch },
  };

  const t0 = Date.now();
  let cursor = trainIdx.length; // trigger reshuffle on first step
  const epochOrder = trainIdx.slice();
  let goodEvals = 0;
  let step = 0;
  while (step < cfg.maxSteps) {
    if (cursor + cfg.batch > epochOrder.length) {
      rng.shuffle(epochOrder as unknown as number[]);
      cursor = 0;
    }
    const idxs = epochOrder.slice(cursor, cursor + cfg.batch);
    cursor += cfg.batch;
    const { batch, targets } = makeBatch(idxs);
    const loss = model.lossAndGrad(batch, targets, true);
    adam.step();
    step += 1;
    if (step % 10 === 0) log.lossSamples.push({ step, loss });
    onProgress?.(step, loss);
    if (step % cfg.evalEvery === 0) {
      const acc = valAccuracy();
      log.valAccuracy.push(acc);
      goodEvals = acc >= 0.999 ? goodEvals + 1 : 0;
      if (step >= cfg.minSteps && goodEvals >= cfg.patience) {
        log.stopReason = `early-stop: validation accuracy held >= 0.999 for ${cfg.patience} evals`;
        break;
      }
    }
  }
  log.steps = step;
  log.wallSeconds = (Date.now() - t0) / 1000;
  return { model, log };
}

export function transformerBalancedAccuracy(
  cfg: HarnessConfig, model: ArithmeticVerifier, records: ShardRecord[],
): number {
  let posOk = 0, pos = 0, negOk = 0, neg = 0;
  for (let off = 0; off < records.length; off += 64) {
    const part = records.slice(off, off + 64);
    const batch = batchFromStrings(part.map((r) => r.a), part.map((r) => r.b), part.map((r) => r.c));
    const probs = model.predict(batch);
    for (let i = 0; i < part.length; i++) {
      const target = labelTarget(part[i].label, cfg.task);
      const pred = probs[i] >= 0.5 ? 1 : 0;
      if (target === 1) {
        pos += 1;
        if (pred === 1) posOk += 1;
      } else {
        neg += 1;
        if (pred === 0) negOk += 1;
      }
    }
  }
  if (pos === 0 || neg === 0) throw new Error("bucket is not balanced");
  return 0.5 * (posOk / pos + negOk / neg);
}

export function evalTransformerOnBucket(
  cfg: HarnessConfig, model: ArithmeticVerifier, exponent: number, mix: string, seed: number, name: string,
): number | null {
  const shards = bucketShards(cfg, exponent, mix, seed, name);
  if (!shards) return null;
  const records = shards.flatMap(readShard);
  return transformerBalancedAccuracy(cfg, model, records);
}

// --- delta sweep ---------------------------------------------------------

export const SWEEP_EPSILONS = [
  0,
  1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4,
  1e-3, 1e-2, 1e-1, 1, 10, 100, 1000,
];

/** Float-path features of (a, b, c + eps), exactly as a float64 pipeline
 *  would compute them. Probe triples are small, so parsing to doubles is
 *  lossless and the perturbation lands in feature space before any model
 *  sees the sample. */
export function perturbedFloatFeatures(rec: ShardRecord, eps: number): Float64Array {
  const a = Number(rec.a);
  const b = Number(rec.b);
  const c = Number(rec.c) + eps;
  const res = Math.log(Math.abs(a * a + b * b - c * c) + 1e-12);
  return Float64Array.from([c - b, b / a, res]);
}

export function deltaSweep(
  cfg: HarnessConfig, tree: Gbdt, probes: ShardRecord[],
): { points: SweepPoint[]; threshold: number | null } {
  const points: SweepPoint[] = [];
  let threshold: number | null = null;
  for (const eps of SWEEP_EPSILONS) {
    let acc = 0;
    for (const rec of probes) {
      acc += tree.predict(perturbedFloatFeatures(rec, eps));
    }
    const mean = acc / probes.length;
    points.push({ epsilon: eps, meanPNeg: mean });
    if (threshold === null && eps > 0 && mean > 0.5) threshold = eps;
  }
  return { points, threshold };
}

export function sweepProbes(cfg: HarnessConfig): ShardRecord[] {
  // small-magnitude positives: the detection threshold scales inversely
  // with c, so the probe set pins the reported number to the training
  // distribution's low end
  const dir = datasetDir(cfg, "sweep-probes");
  if (!fs.existsSync(path.join(dir, "dataset.json"))) {
    fs.mkdirSync(dir, { recursive: true });
    runCli(["gen", "--start", "1", "--end", "32", "--out", dir, "--seed", String(cfg.seed)]);
  }
  return shardFiles(dir).flatMap(readShard);
}

// --- full run -------------------------------------------------------------

export interface HarnessResult {
  buckets: BucketEval[];
  breakdown: BreakdownRow[];
  sweep: { points: SweepPoint[]; threshold: number | null };
  trainingLog: TrainingLog;
  exactTreeAccuracyAt20: number | null;
}

export function runAll(cfg: HarnessConfig, progress: (msg: string) => void = () => {}): HarnessResult {
  fs.mkdirSync(cfg.outDir, { recursive: true });

  progress("training boosted tree on float-path features");
  const tree = trainTree(cfg, "float");

  progress("training transformer");
  const { model, log } = trainTransformer(cfg, (step, loss) => {
    if (step % 100 === 0) progress(`  step ${step} loss ${loss.toFixed(4)}`);
  });

  const buckets: BucketEval[] = [];
  for (const d of cfg.bucketExponents) {
    progress(`evaluating bucket 10^${d}`);
    const seed = cfg.seed + 1000 + d;
    const name = `bucket-${d}-PA01`;
    const treeAcc = evalTreeOnBucket(cfg, tree, d, "PA01=1", seed, name);
    const trAcc = evalTransformerOnBucket(cfg, model, d, "PA01=1", seed, name);
    buckets.push({ exponent: d, treeAccuracy: treeAcc, transformerAccuracy: trAcc });
  }

  const breakdown: BreakdownRow[] = [];
  for (const d of cfg.breakdownBuckets) {
    for (const attack of ALL_ATTACKS) {
      const seed = cfg.seed + 5000 + d * 37 + ALL_ATTACKS.indexOf(attack);
      const name = `breakdown-${d}-${attack}`;
      const small: HarnessConfig = { ...cfg, bucketCount: cfg.breakdownCount };
      const treeAcc = evalTreeOnBucket(small, tree, d, `${attack}=1`, seed, name);
      const trAcc = treeAcc === null
        ? null
        : evalTransformerOnBucket(small, model, d, `${attack}=1`, seed, name);
      breakdown.push({ exponent: d, attack, treeAccuracy: treeAcc, transformerAccuracy: trAcc });
    }
  }

  progress("running perturbation sweep");
  const sweep = deltaSweep(cfg, tree, sweepProbes(cfg));

  progress("sanity: tree on exact-path features at 10^20");
  const exactTree = trainTree(cfg, "exact");
  const exactTreeAccuracyAt20 = evalTreeOnBucket(
    cfg, exactTree, 20, "PA01=1", cfg.seed + 1020, "bucket-20-PA01", "exact",
  );

  writeArtifacts(cfg, { buckets, breakdown, sweep, trainingLog: log, exactTreeAccuracyAt20 });
  return { buckets, breakdown, sweep, trainingLog: log, exactTreeAccuracyAt20 };
}

export function writeArtifacts(cfg: HarnessConfig, result: HarnessResult): void {
  fs.mkdirSync(cfg.outDir, { recursive: true });
  const fmt = (v: number | null) => (v === null ? "" : v.toFixed(4));
  const table1 = ["bucket_exponent,tree_accuracy,transformer_accuracy"];
  for (const row of result.buckets) {
    table1.push(`${row.exponent},${fmt(row.treeAccuracy)},${fmt(row.transformerAccuracy)}`);
  }
  fs.writeFileSync(path.join(cfg.outDir, "table1.csv"), table1.join("\n") + "\n");

  const bd = ["bucket_exponent,attack,tree_accuracy,transformer_accuracy"];
  for (const row of result.breakdown) {
    bd.push(`${row.exponent},${row.attack},${fmt(row.treeAccuracy)},${fmt(row.transformerAccuracy)}`);
  }
  fs.writeFileSync(path.join(cfg.outDir, "breakdown.csv"), bd.join("\n") + "\n");

  const sweepCsv = ["epsilon,mean_p_neg"];
  for (const p of result.sweep.points) {
    sweepCsv.push(`${p.epsilon},${p.meanPNeg.toFixed(6)}`);
  }
  sweepCsv.push(`# wakeup_threshold,${result.sweep.threshold ?? "none"}`);
  fs.writeFileSync(path.join(cfg.outDir, "delta_sweep.csv"), sweepCsv.join("\n") + "\n");

  fs.writeFileSync(
    path.join(cfg.outDir, "training_log.json"),
    JSON.stringify(
      { ...result.trainingLog, exactTreeAccuracyAt20: result.exactTreeAccuracyAt20 },
      null,
      2,
    ) + "\n",
  );
}
