/** Digit-level verifier: one weight-shared number encoder applied to a, b
 *  and c, plus an interaction head over the three pooled vectors.
 *
 *  Encoder: digit embedding (PAD row frozen at zero) + learnable positional
 *  embeddings, layer norm and dropout on the sum; two pre-norm transformer
 *  layers (4 heads, feed-forward width 4d, GELU); attention pooling with a
 *  single learned query. Head: concat of the three pooled vectors ->
 *  4d GELU MLP -> one logit.
 *
 *  Positional embeddings are zero-initialized: positions never reached by
 *  the training lengths keep exactly zero contribution at evaluation time,
 *  so longer numbers degrade gracefully instead of injecting untrained
 *  noise. The reversed tokenization pins the units digit to position 0 at
 *  every magnitude, which is the anchor the task depends on.
 */

import { Prng } from "./prng.js";
import {
  Tensor,
  add,
  addPositional,
  attentionCore,
  bceWithLogits,
  backward,
  concatLast,
  dropout,
  expandQuery,
  gatherEmbed,
  gelu,
  layerNorm,
  linear,
  param,
  reshape,
  resetTape,
  sigmoid,
} from "./tensor.js";
import { MAX_DIGITS, PAD_ID, VOCAB_SIZE, padBatch, tokenize } from "./tokenizer.js";

export type PosInit = "zeros" | "sinusoidal" | "shared" | "small-normal";

export interface ModelConfig {
  embedDim: number;
  heads: number;
  layers: number;
  maxDigits: number;
  dropout: number;
  posInit: PosInit;
  posInitScale: number;
}

export const DEFAULT_MODEL: ModelConfig = {
  embedDim: 64,
  heads: 4,
  layers: 2,
  maxDigits: MAX_DIGITS,
  dropout: 0.1,
  posInit: "sinusoidal",
  posInitScale: 0.5,
};

interface LayerParams {
  ln1g: Tensor; ln1b: Tensor;
  wq: Tensor; bq: Tensor; wk: Tensor; bk: Tensor; wv: Tensor; bv: Tensor;
  wo: Tensor; bo: Tensor;
  ln2g: Tensor; ln2b: Tensor;
  wf1: Tensor; bf1: Tensor; wf2: Tensor; bf2: Tensor;
}

export class ArithmeticVerifier {
  readonly cfg: ModelConfig;
  readonly params: Map<string, Tensor> = new Map();
  private dropRng: Prng;

  tokenEmbed!: Tensor;
  posEmbed!: Tensor;
  embLNg!: Tensor;
  embLNb!: Tensor;
  layersP: LayerParams[] = [];
  poolQuery!: Tensor;
  poolWq!: Tensor; poolBq!: Tensor;
  poolWk!: Tensor; poolBk!: Tensor;
  poolWv!: Tensor; poolBv!: Tensor;
  poolWo!: Tensor; poolBo!: Tensor;
  headW1!: Tensor; headB1!: Tensor;
  headW2!: Tensor; headB2!: Tensor;

  constructor(cfg: ModelConfig = DEFAULT_MODEL, seed = 0) {
    this.cfg = cfg;
    const rng = new Prng(seed);
    this.dropRng = new Prng(seed + 1);
    const d = cfg.embedDim;

    const normal = (std: number) => () => rng.normal() * std;
    const uniformFan = (fanIn: number) => () => (rng.uniform() * 2 - 1) / Math.sqrt(fanIn);
    const zeros = () => 0;
    const ones = () => 1;

    const reg = (name: string, t: Tensor) => {
      this.params.set(name, t);
      return t;
    };

    this.tokenEmbed = reg("tok_embed", param([VOCAB_SIZE, d], normal(0.5)));
    this.tokenEmbed.data.fill(0, 0, d); // PAD row stays zero, and gets no grads
    this.posEmbed = reg("pos_embed", param([cfg.maxDigits, d], zeros));
    this.initPositional(cfg.posInit, rng);
    this.embLNg = reg("emb_ln_g", param([d], ones));
    this.embLNb = reg("emb_ln_b", param([d], zeros));

    for (let li = 0; li < cfg.layers; li++) {
      const lp: LayerParams = {
        ln1g: reg(`l${li}_ln1_g`, param([d], ones)),
        ln1b: reg(`l${li}_ln1_b`, param([d], zeros)),
        wq: reg(`l${li}_wq`, param([d, d], uniformFan(d))),
        bq: reg(`l${li}_bq`, param([d], zeros)),
        wk: reg(`l${li}_wk`, param([d, d], uniformFan(d))),
        bk: reg(`l${li}_bk`, param([d], zeros)),
        wv: reg(`l${li}_wv`, param([d, d], uniformFan(d))),
        bv: reg(`l${li}_bv`, param([d], zeros)),
        wo: reg(`l${li}_wo`, param([d, d], uniformFan(d))),
        bo: reg(`l${li}_bo`, param([d], zeros)),
        ln2g: reg(`l${li}_ln2_g`, param([d], ones)),
        ln2b: reg(`l${li}_ln2_b`, param([d], zeros)),
        wf1: reg(`l${li}_wf1`, param([d, 4 * d], uniformFan(d))),
        bf1: reg(`l${li}_bf1`, param([4 * d], zeros)),
        wf2: reg(`l${li}_wf2`, param([4 * d, d], uniformFan(4 * d))),
        bf2: reg(`l${li}_bf2`, param([d], zeros)),
      };
      this.layersP.push(lp);
    }

    this.poolQuery = reg("pool_query", param([d], normal(0.5)));
    this.poolWq = reg("pool_wq", param([d, d], uniformFan(d)));
    this.poolBq = reg("pool_bq", param([d], zeros));
    this.poolWk = reg("pool_wk", param([d, d], uniformFan(d)));
    this.poolBk = reg("pool_bk", param([d], zeros));
    this.poolWv = reg("pool_wv", param([d, d], uniformFan(d)));
    this.poolBv = reg("pool_bv", param([d], zeros));
    this.poolWo = reg("pool_wo", param([d, d], uniformFan(d)));
    this.poolBo = reg("pool_bo", param([d], zeros));
    this.headW1 = reg("head_w1", param([3 * d, 4 * d], uniformFan(3 * d)));
    this.headB1 = reg("head_b1", param([4 * d], zeros));
    this.headW2 = reg("head_w2", param([4 * d, 1], uniformFan(4 * d)));
    this.headB2 = reg("head_b2", param([1], zeros));
  }

  /** Positional-table initialization controls how out-of-range positions
   *  look at evaluation time: beyond the training lengths the rows keep
   *  their init, so the init IS the extrapolation behavior. */
  private initPositional(kind: PosInit, rng: Prng): void {
    const [maxLen, d] = this.posEmbed.shape;
    const data = this.posEmbed.data;
    switch (kind) {
      case "zeros":
        break;
      case "small-normal":
        for (let i = 0; i < data.length; i++) data[i] = rng.normal() * 0.02;
        break;
      case "shared": {
        for (let j = 0; j < d; j++) {
          const v = rng.normal() * 0.5;
          for (let p = 0; p < maxLen; p++) data[p * d + j] = v;
        }
        break;
      }
      case "sinusoidal": {
        const scale = this.cfg.posInitScale;
        for (let p = 0; p < maxLen; p++) {
          for (let j = 0; j < d; j += 2) {
            const freq = Math.pow(10000, -j / d);
            data[p * d + j] = scale * Math.sin(p * freq);
            if (j + 1 < d) data[p * d + j + 1] = scale * Math.cos(p * freq);
          }
        }
        break;
      }
      default:
        throw new Error(`unknown positional init: ${kind}`);
    }
  }

  parameters(): Tensor[] {
    return [...this.params.values()];
  }

  parameterCount(): number {
    return this.parameters().reduce((a, t) => a + t.size, 0);
  }

  private maskOf(ids: Int32Array): Uint8Array {
    const m = new Uint8Array(ids.length);
    for (let i = 0; i < ids.length; i++) m[i] = ids[i] === PAD_ID ? 1 : 0;
    return m;
  }

  /** Encode one padded batch of numbers -> pooled [b, d] vectors. */
  encodeNumbers(ids: Int32Array, b: number, l: number, training: boolean): Tensor {
    const cfg = this.cfg;
    const mask = this.maskOf(ids);
    let x = gatherEmbed(this.tokenEmbed, ids, b, l, PAD_ID);
    x = addPositional(x, this.posEmbed);
    x = dropout(x, cfg.dropout, this.dropRng, training);
    x = layerNorm(x, this.embLNg, this.embLNb);
    for (const lp of this.layersP) {
      const n1 = layerNorm(x, lp.ln1g, lp.ln1b);
      const q = linear(n1, lp.wq, lp.bq);
      const k = linear(n1, lp.wk, lp.bk);
      const v = linear(n1, lp.wv, lp.bv);
      let attn = attentionCore(q, k, v, cfg.heads, mask, cfg.dropout, this.dropRng, training);
      attn = linear(attn, lp.wo, lp.bo);
      attn = dropout(attn, cfg.dropout, this.dropRng, training);
      x = add(x, attn);
      const n2 = layerNorm(x, lp.ln2g, lp.ln2b);
      let ff = linear(n2, lp.wf1, lp.bf1);
      ff = gelu(ff);
      ff = dropout(ff, cfg.dropout, this.dropRng, training);
      ff = linear(ff, lp.wf2, lp.bf2);
      ff = dropout(ff, cfg.dropout, this.dropRng, training);
      x = add(x, ff);
    }
    // attention pooling with a single learned query (one head)
    const q = linear(expandQuery(this.poolQuery, b), this.poolWq, this.poolBq);
    const k = linear(x, this.poolWk, this.poolBk);
    const v = linear(x, this.poolWv, this.poolBv);
    let pooled = attentionCore(q, k, v, 1, mask, 0, this.dropRng, false);
    pooled = linear(pooled, this.poolWo, this.poolBo);
    return reshape(pooled, [b, cfg.embedDim]);
  }

  /** Logits for a batch of (a, b, c) token sequences. */
  forward(
    aIds: Int32Array, bIds: Int32Array, cIds: Int32Array,
    b: number, la: number, lb: number, lc: number,
    training: boolean,
  ): Tensor {
    const za = this.encodeNumbers(aIds, b, la, training);
    const zb = this.encodeNumbers(bIds, b, lb, training);
    const zc = this.encodeNumbers(cIds, b, lc, training);
    const combined = concatLast([za, zb, zc]);
    let h = linear(combined, this.headW1, this.headB1);
    h = gelu(h);
    h = linear(h, this.headW2, this.headB2);
    return reshape(h, [b]);
  }

  /** Loss + gradients for one batch; returns the scalar loss. */
  lossAndGrad(batch: TripleBatch, targets: Float64Array, training = true): number {
    resetTape();
    for (const p of this.parameters()) p.zeroGrad();
    const logits = this.forward(
      batch.a.ids, batch.b.ids, batch.c.ids,
      batch.size, batch.a.l, batch.b.l, batch.c.l, training,
    );
    const loss = bceWithLogits(logits, targets);
    backward(loss);
    return loss.data[0];
  }

  /** Probabilities P(positive) without touching gradients or dropout. */
  predict(batch: TripleBatch): Float64Array {
    resetTape();
    const logits = this.forward(
      batch.a.ids, batch.b.ids, batch.c.ids,
      batch.size, batch.a.l, batch.b.l, batch.c.l, false,
    );
    const out = new Float64Array(batch.size);
    for (let i = 0; i < batch.size; i++) out[i] = sigmoid(logits.data[i]);
    resetTape();
    return out;
  }
}

export interface PaddedNumbers {
  ids: Int32Array;
  l: number;
}

export interface TripleBatch {
  size: number;
  a: PaddedNumbers;
  b: PaddedNumbers;
  c: PaddedNumbers;
}

export function batchFromStrings(as: string[], bs: string[], cs: string[]): TripleBatch {
  const pa = padBatch(as.map(tokenize));
  const pb = padBatch(bs.map(tokenize));
  const pc = padBatch(cs.map(tokenize));
  return {
    size: as.length,
    a: { ids: pa.ids, l: pa.l },
    b: { ids: pb.ids, l: pb.l },
    c: { ids: pc.ids, l: pc.l },
  };
}
