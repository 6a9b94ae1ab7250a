/** Dataset access: everything flows through the factory's external
 *  interfaces — the `triplesmith` CLI plus its shard and feature CSV
 *  formats. Nothing in the trainer reaches into the factory's internals. */

import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as path from "node:path";

export const CLI = process.env.TRIPLESMITH_CMD ?? "triplesmith";

export interface ShardRecord {
  a: string;
  b: string;
  c: string;
  label: "pos" | "neg_eq" | "neg_family";
  attack: string | null;
  n: string | null;
}

export interface FeatureRow {
  fGap: number;
  fRatio: number;
  fRes: number;
  label: "pos" | "neg_eq" | "neg_family";
}

export function runCli(args: string[]): any {
  const stdout = execFileSync(CLI, args, { encoding: "utf8", maxBuffer: 1 << 28 });
  const lines = stdout.trim().split("\n");
  return JSON.parse(lines[lines.length - 1]);
}

export function readShard(file: string): ShardRecord[] {
  const out: ShardRecord[] = [];
  for (const line of fs.readFileSync(file, "utf8").split("\n")) {
    if (!line) continue;
    const [a, b, c, label, attack, n] = line.split(",");
    out.push({
      a, b, c,
      label: label as ShardRecord["label"],
      attack: attack === "-" ? null : attack,
      n: n === "-" ? null : n,
    });
  }
  return out;
}

export function readFeatures(file: string): FeatureRow[] {
  const out: FeatureRow[] = [];
  for (const line of fs.readFileSync(file, "utf8").split("\n")) {
    if (!line || line.startsWith("#") || line.startsWith("f_gap")) continue;
    const [gap, ratio, res, label] = line.split(",");
    out.push({
      fGap: Number(gap),
      fRatio: Number(ratio),
      fRes: Number(res),
      label: label as FeatureRow["label"],
    });
  }
  return out;
}

export interface BalancedSetOptions {
  start: bigint;
  end: bigint;
  mix: string; // e.g. "PA01=1"
  seed: number;
  outDir: string;
}

/** Generate a balanced positive/negative shard set via the CLI; returns the
 *  shard file paths. Regenerates only when the directory is absent. */
export function generateBalanced(opts: BalancedSetOptions): string[] {
  if (!fs.existsSync(path.join(opts.outDir, "dataset.json"))) {
    fs.mkdirSync(opts.outDir, { recursive: true });
    runCli([
      "gen",
      "--start", opts.start.toString(),
      "--end", opts.end.toString(),
      "--out", opts.outDir,
      "--ratio", "0.5",
      "--mix", opts.mix,
      "--seed", String(opts.seed),
    ]);
  }
  return shardFiles(opts.outDir);
}

export function shardFiles(dir: string): string[] {
  return fs
    .readdirSync(dir)
    .filter((f) => /^shard_\d+\.csv$/.test(f))
    .sort()
    .map((f) => path.join(dir, f));
}

/** Extract features for a shard via the CLI (float or exact path). */
export function extractFeatures(shardFile: string, mode: "float" | "exact", outFile: string): string {
  if (!fs.existsSync(outFile)) {
    runCli(["features", "--in", shardFile, "--path", mode, "--out", outFile]);
  }
  return outFile;
}

export function featureMatrix(rows: FeatureRow[], raw?: ShardRecord[]): { x: Float64Array[]; y: Float64Array } {
  const x: Float64Array[] = [];
  const y = new Float64Array(rows.length);
  for (let i = 0; i < rows.length; i++) {
    const r = rows[i];
    if (raw) {
      const rec = raw[i];
      x.push(Float64Array.from([r.fGap, r.fRatio, r.fRes, Number(rec.a), Number(rec.b), Number(rec.c)]));
    } else {
      x.push(Float64Array.from([r.fGap, r.fRatio, r.fRes]));
    }
    y[i] = r.label === "pos" ? 0 : 1; // the tree answers "is this an attack?"
  }
  return { x, y };
}
