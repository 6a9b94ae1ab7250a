/** Digit tokenization for the sequence model.
 *
 *  Numbers arrive as canonical decimal strings and are split into digits in
 *  reversed (least-significant-first) order, aligning token position 0 with
 *  the units digit at every magnitude — the property that lets rules learned
 *  on short numbers transfer to long ones.
 *
 *  Vocabulary: PAD = 0, digits '0'..'9' = 1..10, and a reserved sign token
 *  (11) kept for vocabulary compatibility; the data contains only
 *  non-negative integers so it never occurs.
 */

export const PAD_ID = 0;
export const SIGN_ID = 11;
export const VOCAB_SIZE = 12;
export const MAX_DIGITS = 128;

const CANONICAL = /^(0|[1-9][0-9]*)$/;

export function tokenize(decimal: string): Int32Array {
  if (!CANONICAL.test(decimal)) {
    throw new Error(`not a canonical decimal string: ${JSON.stringify(decimal)}`);
  }
  if (decimal.length > MAX_DIGITS) {
    // refuse rather than silently clipping: a clipped number is a different number
    throw new Error(`number has ${decimal.length} digits; tokenizer limit is ${MAX_DIGITS}`);
  }
  const out = new Int32Array(decimal.length);
  for (let i = 0; i < decimal.length; i++) {
    out[i] = decimal.charCodeAt(decimal.length - 1 - i) - 48 + 1;
  }
  return out;
}

export function detokenize(tokens: ArrayLike<number>): string {
  const digits: string[] = [];
  for (let i = tokens.length - 1; i >= 0; i--) {
    const t = tokens[i];
    if (t === PAD_ID) {
      if (digits.length > 0) throw new Error("PAD token inside a number");
      continue; // trailing padding
    }
    if (t < 1 || t > 10) throw new Error(`non-digit token id: ${t}`);
    digits.push(String.fromCharCode(48 + t - 1));
  }
  if (digits.length === 0) throw new Error("empty token sequence");
  const s = digits.join("");
  if (!CANONICAL.test(s)) throw new Error(`detokenized to non-canonical: ${s}`);
  return s;
}

/** Pack a batch of token sequences into [batch, maxLen] with PAD fill. */
export function padBatch(seqs: Int32Array[], maxLen?: number): { ids: Int32Array; b: number; l: number } {
  const l = maxLen ?? Math.max(...seqs.map((s) => s.length));
  const b = seqs.length;
  const ids = new Int32Array(b * l); // PAD_ID = 0 fill
  for (let i = 0; i < b; i++) {
    if (seqs[i].length > l) throw new Error("sequence longer than pad length");
    ids.set(seqs[i], i * l);
  }
  return { ids, b, l };
}
