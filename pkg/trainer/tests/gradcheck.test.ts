import assert from "node:assert/strict";
import { test } from "node:test";

import { ArithmeticVerifier, batchFromStrings } from "../src/model.js";
import { Prng } from "../src/prng.js";

/** Central finite differences against the analytic gradient on a 2-sample
 *  batch, dropout off so the loss is a deterministic function of weights. */
test("acceptance gradient check: analytic matches finite differences to 1e-4", () => {
  const model = new ArithmeticVerifier(
    { embedDim: 64, heads: 4, layers: 2, maxDigits: 128, dropout: 0, posInit: "sinusoidal" as const, posInitScale: 1 },
    1234,
  );
  const batch = batchFromStrings(["3", "41"], ["4", "840"], ["5", "841"]);
  const targets = Float64Array.from([1, 1]);

  const lossAt = () => {
    const probeModel = model; // weights mutated in place around each probe
    return probeModel.lossAndGrad(batch, targets, true);
  };

  model.lossAndGrad(batch, targets, true);
  const analytic = new Map<string, Float64Array>();
  for (const [name, p] of model.params) {
    analytic.set(name, Float64Array.from(p.grad ?? new Float64Array(p.size)));
  }

  const rng = new Prng(77);
  const checked: string[] = [];
  let worst = 0;
  for (const [name, p] of model.params) {
    // every parameter tensor gets probed at a few random coordinates;
    // the digit embedding is the example the contract calls out, probe more
    const probes = name === "tok_embed" ? 8 : 3;
    for (let t = 0; t < probes; t++) {
      const i = rng.below(p.size);
      const g = analytic.get(name)![i];
      const h = Math.max(1e-6, 1e-6 * Math.abs(p.data[i]));
      const orig = p.data[i];
      p.data[i] = orig + h;
      const up = lossAt();
      p.data[i] = orig - h;
      const down = lossAt();
      p.data[i] = orig;
      const fd = (up - down) / (2 * h);
      const denom = Math.max(Math.abs(g), Math.abs(fd), 1e-7);
      const rel = Math.abs(g - fd) / denom;
      worst = Math.max(worst, rel);
      assert.ok(rel < 1e-4, `${name}[${i}]: analytic ${g} vs fd ${fd} (rel ${rel})`);
      checked.push(`${name}[${i}]`);
    }
  }
  assert.ok(checked.length > 100, "expected probes across every parameter tensor");
  console.error(`  gradient check: ${checked.length} coordinates, worst rel err ${worst.toExponential(2)}`);
});
