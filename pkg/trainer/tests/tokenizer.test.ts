import assert from "node:assert/strict";
import { test } from "node:test";

import { Prng } from "../src/prng.js";
import { MAX_DIGITS, PAD_ID, VOCAB_SIZE, detokenize, padBatch, tokenize } from "../src/tokenizer.js";

test("quick tokenizer: digits come out reversed", () => {
  assert.deepEqual(Array.from(tokenize("123")), [3 + 1, 2 + 1, 1 + 1]);
  assert.deepEqual(Array.from(tokenize("0")), [1]);
});

test("quick tokenizer: vocabulary layout", () => {
  assert.equal(PAD_ID, 0);
  assert.equal(VOCAB_SIZE, 12); // PAD + ten digits + reserved sign slot
});

test("quick tokenizer: roundtrip on 10^4 random numbers up to 60 digits", () => {
  const rng = new Prng(42);
  for (let i = 0; i < 10_000; i++) {
    const len = 1 + rng.below(60);
    let s = String(1 + rng.below(9));
    for (let j = 1; j < len; j++) s += String(rng.below(10));
    if (rng.below(50) === 0) s = "0";
    assert.equal(detokenize(tokenize(s)), s);
  }
});

test("quick tokenizer: refuses to clip beyond the digit limit", () => {
  const tooLong = "1".repeat(MAX_DIGITS + 1);
  assert.throws(() => tokenize(tooLong), /limit/);
  assert.equal(tokenize("1".repeat(MAX_DIGITS)).length, MAX_DIGITS);
});

test("quick tokenizer: rejects non-canonical strings", () => {
  for (const bad of ["", "007", "-5", "1.0", "12a"]) {
    assert.throws(() => tokenize(bad));
  }
});

test("quick tokenizer: padding fills with PAD and roundtrips", () => {
  const { ids, b, l } = padBatch([tokenize("123"), tokenize("7")]);
  assert.equal(b, 2);
  assert.equal(l, 3);
  assert.deepEqual(Array.from(ids), [4, 3, 2, 8, 0, 0]);
  assert.equal(detokenize(ids.subarray(3, 6)), "7");
});
