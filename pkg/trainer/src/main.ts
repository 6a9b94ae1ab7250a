/** Harness CLI.
 *
 *    node dist/src/main.js all --out runs/demo [--config cfg.json] [--seed N]
 *    node dist/src/main.js train-tree --out runs/demo [--raw] [--exact]
 *    node dist/src/main.js sweep --out runs/demo
 *
 *  Flags mirror fields of the JSON config file; CLI flags win.
 */

import * as path from "node:path";
import { HarnessConfig, loadConfig } from "./config.js";
import { deltaSweep, runAll, sweepProbes, trainTree, writeArtifacts } from "./pipeline.js";

function parseArgs(argv: string[]): { cmd: string; flags: Map<string, string> } {
  const cmd = argv[0];
  const flags = new Map<string, string>();
  for (let i = 1; i < argv.length; i++) {
    if (!argv[i].startsWith("--")) throw new Error(`unexpected argument: ${argv[i]}`);
    const key = argv[i].slice(2);
    if (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
      flags.set(key, argv[++i]);
    } else {
      flags.set(key, "true");
    }
  }
  return { cmd, flags };
}

function configFrom(flags: Map<string, string>): HarnessConfig {
  const overrides: Partial<HarnessConfig> = {};
  if (flags.has("out")) overrides.outDir = flags.get("out")!;
  if (flags.has("seed")) overrides.seed = Number(flags.get("seed"));
  if (flags.has("steps")) overrides.maxSteps = Number(flags.get("steps"));
  if (flags.has("batch")) overrides.batch = Number(flags.get("batch"));
  if (flags.has("task")) overrides.task = flags.get("task") as HarnessConfig["task"];
  if (flags.has("raw")) overrides.rawFeatures = true;
  return loadConfig(flags.get("config") ?? null, overrides);
}

function main(): void {
  const { cmd, flags } = parseArgs(process.argv.slice(2));
  const cfg = configFrom(flags);
  const say = (msg: string) => console.error(msg);

  switch (cmd) {
    case "all": {
      const result = runAll(cfg, say);
      console.log(JSON.stringify({
        ok: true,
        outDir: cfg.outDir,
        buckets: result.buckets,
        wakeupThreshold: result.sweep.threshold,
        trainSteps: result.trainingLog.steps,
        trainWallSeconds: result.trainingLog.wallSeconds,
      }));
      break;
    }
    case "train-tree": {
      const mode = flags.has("exact") ? "exact" : "float";
      const tree = trainTree(cfg, mode);
      console.log(JSON.stringify({ ok: true, trees: tree.trees.length, mode }));
      break;
    }
    case "sweep": {
      const tree = trainTree(cfg, "float");
      const sweep = deltaSweep(cfg, tree, sweepProbes(cfg));
      console.log(JSON.stringify({ ok: true, threshold: sweep.threshold, points: sweep.points }));
      break;
    }
    default:
      console.error(`unknown command: ${cmd}; expected all | train-tree | sweep`);
      process.exit(2);
  }
}

main();
