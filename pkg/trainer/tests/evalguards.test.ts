import assert from "node:assert/strict";
import { test } from "node:test";

import { loadConfig } from "../src/config.js";
import { ShardRecord } from "../src/data.js";
import { ArithmeticVerifier } from "../src/model.js";
import { transformerBalancedAccuracy } from "../src/pipeline.js";

test("quick eval: one-sided buckets raise instead of reporting silent zeros", () => {
  const cfg = loadConfig(null, {});
  const model = new ArithmeticVerifier(cfg.model, 1);
  const onlyPos: ShardRecord[] = [
    { a: "3", b: "4", c: "5", label: "pos", attack: null, n: "1" },
    { a: "5", b: "12", c: "13", label: "pos", attack: null, n: "2" },
  ];
  assert.throws(() => transformerBalancedAccuracy(cfg, model, onlyPos), /balanced/);
  assert.throws(() => transformerBalancedAccuracy(cfg, model, []), /balanced/);
});
