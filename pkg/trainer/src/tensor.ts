/** Minimal define-by-run autograd over Float64Array tensors.
 *
 *  Just enough machinery for a small pre-norm transformer encoder: linear,
 *  layer norm, GELU, dropout, embedding gather, fused multi-head attention
 *  with key padding masks, concat, and a binary-cross-entropy-with-logits
 *  head. Every op records a backward closure on a global tape; `backward`
 *  replays the tape in reverse. Analytic gradients are validated against
 *  central finite differences in the test suite, so keep forward and
 *  backward of each op in one place.
 */

import { Prng } from "./prng.js";

export class Tensor {
  data: Float64Array;
  shape: number[];
  grad: Float64Array | null = null;
  requiresGrad: boolean;
  backwardFn: (() => void) | null = null;

  constructor(data: Float64Array, shape: number[], requiresGrad = false) {
    if (data.length !== shape.reduce((a, b) => a * b, 1)) {
      throw new Error(`data length ${data.length} != shape ${shape}`);
    }
    this.data = data;
    this.shape = shape;
    this.requiresGrad = requiresGrad;
  }

  get size(): number {
    return this.data.length;
  }

  ensureGrad(): Float64Array {
    if (!this.grad) this.grad = new Float64Array(this.data.length);
    return this.grad;
  }

  zeroGrad(): void {
    if (this.grad) this.grad.fill(0);
  }
}

let tape: Tensor[] = [];

export function resetTape(): void {
  tape = [];
}

function record(t: Tensor, backwardFn: () => void): Tensor {
  t.backwardFn = backwardFn;
  tape.push(t);
  return t;
}

export function backward(loss: Tensor): void {
  loss.ensureGrad().fill(1);
  for (let i = tape.length - 1; i >= 0; i--) {
    const node = tape[i];
    if (node.grad && node.backwardFn) node.backwardFn();
  }
}

export function param(shape: number[], init: (i: number) => number): Tensor {
  const data = new Float64Array(shape.reduce((a, b) => a * b, 1));
  for (let i = 0; i < data.length; i++) data[i] = init(i);
  return new Tensor(data, shape, true);
}

// --- kernels ----------------------------------------------------------

/** Y[N,M] = X[N,K] @ W[K,M] (accumulating into y). Inner loops are
 *  branch-free and unrolled by four: this kernel dominates the step time. */
function matmulAcc(x: Float64Array, w: Float64Array, y: Float64Array, n: number, k: number, m: number): void {
  const m4 = m - (m % 4);
  for (let i = 0; i < n; i++) {
    const xo = i * k;
    const yo = i * m;
    for (let p = 0; p < k; p++) {
      const xv = x[xo + p];
      const wo = p * m;
      let j = 0;
      for (; j < m4; j += 4) {
        y[yo + j] += xv * w[wo + j];
        y[yo + j + 1] += xv * w[wo + j + 1];
        y[yo + j + 2] += xv * w[wo + j + 2];
        y[yo + j + 3] += xv * w[wo + j + 3];
      }
      for (; j < m; j++) y[yo + j] += xv * w[wo + j];
    }
  }
}

/** Y[N,K] += G[N,M] @ W[K,M]^T */
function matmulTransBAcc(g: Float64Array, w: Float64Array, y: Float64Array, n: number, k: number, m: number): void {
  const m4 = m - (m % 4);
  for (let i = 0; i < n; i++) {
    const go = i * m;
    const yo = i * k;
    for (let p = 0; p < k; p++) {
      const wo = p * m;
      let acc0 = 0;
      let acc1 = 0;
      let j = 0;
      for (; j < m4; j += 4) {
        acc0 += g[go + j] * w[wo + j] + g[go + j + 1] * w[wo + j + 1];
        acc1 += g[go + j + 2] * w[wo + j + 2] + g[go + j + 3] * w[wo + j + 3];
      }
      for (; j < m; j++) acc0 += g[go + j] * w[wo + j];
      y[yo + p] += acc0 + acc1;
    }
  }
}

/** W[K,M] += X[N,K]^T @ G[N,M] */
function matmulTransAAcc(x: Float64Array, g: Float64Array, w: Float64Array, n: number, k: number, m: number): void {
  const m4 = m - (m % 4);
  for (let i = 0; i < n; i++) {
    const xo = i * k;
    const go = i * m;
    for (let p = 0; p < k; p++) {
      const xv = x[xo + p];
      const wo = p * m;
      let j = 0;
      for (; j < m4; j += 4) {
        w[wo + j] += xv * g[go + j];
        w[wo + j + 1] += xv * g[go + j + 1];
        w[wo + j + 2] += xv * g[go + j + 2];
        w[wo + j + 3] += xv * g[go + j + 3];
      }
      for (; j < m; j++) w[wo + j] += xv * g[go + j];
    }
  }
}

// --- ops ---------------------------------------------------------------

/** Rows of `table` selected by ids -> [b, l, d]. Row `frozenRow` (the PAD
 *  embedding) receives no gradient, matching padding_idx semantics. */
export function gatherEmbed(table: Tensor, ids: Int32Array, b: number, l: number, frozenRow = 0): Tensor {
  const d = table.shape[1];
  const out = new Tensor(new Float64Array(b * l * d), [b, l, d]);
  for (let i = 0; i < b * l; i++) {
    out.data.set(table.data.subarray(ids[i] * d, ids[i] * d + d), i * d);
  }
  return record(out, () => {
    const g = table.ensureGrad();
    const og = out.grad!;
    for (let i = 0; i < b * l; i++) {
      const row = ids[i];
      if (row === frozenRow) continue;
      const ro = row * d;
      const oo = i * d;
      for (let j = 0; j < d; j++) g[ro + j] += og[oo + j];
    }
  });
}

/** x[b,l,d] + pos[0..l, d] broadcast over the batch. */
export function addPositional(x: Tensor, pos: Tensor): Tensor {
  const [b, l, d] = x.shape;
  if (pos.shape[0] < l) throw new Error(`sequence length ${l} exceeds positional table ${pos.shape[0]}`);
  const out = new Tensor(new Float64Array(x.size), [b, l, d]);
  for (let i = 0; i < b; i++) {
    for (let j = 0; j < l; j++) {
      const xo = (i * l + j) * d;
      const po = j * d;
      for (let q = 0; q < d; q++) out.data[xo + q] = x.data[xo + q] + pos.data[po + q];
    }
  }
  return record(out, () => {
    const og = out.grad!;
    if (x.requiresGrad || x.backwardFn) {
      const xg = x.ensureGrad();
      for (let i = 0; i < og.length; i++) xg[i] += og[i];
    }
    const pg = pos.ensureGrad();
    for (let i = 0; i < b; i++) {
      for (let j = 0; j < l; j++) {
        const xo = (i * l + j) * d;
        const po = j * d;
        for (let q = 0; q < d; q++) pg[po + q] += og[xo + q];
      }
    }
  });
}

export function add(x: Tensor, y: Tensor): Tensor {
  if (x.size !== y.size) throw new Error("shape mismatch in add");
  const out = new Tensor(new Float64Array(x.size), x.shape.slice());
  for (let i = 0; i < x.size; i++) out.data[i] = x.data[i] + y.data[i];
  return record(out, () => {
    const og = out.grad!;
    const xg = x.ensureGrad();
    const yg = y.ensureGrad();
    for (let i = 0; i < og.length; i++) {
      xg[i] += og[i];
      yg[i] += og[i];
    }
  });
}

/** x[..., din] @ W[din, dout] + bias. */
export function linear(x: Tensor, w: Tensor, bias: Tensor | null): Tensor {
  const din = w.shape[0];
  const dout = w.shape[1];
  const n = x.size / din;
  const shape = x.shape.slice(0, -1).concat([dout]);
  const out = new Tensor(new Float64Array(n * dout), shape);
  matmulAcc(x.data, w.data, out.data, n, din, dout);
  if (bias) {
    for (let i = 0; i < n; i++) {
      const o = i * dout;
      for (let j = 0; j < dout; j++) out.data[o + j] += bias.data[j];
    }
  }
  return record(out, () => {
    const og = out.grad!;
    matmulTransBAcc(og, w.data, x.ensureGrad(), n, din, dout);
    matmulTransAAcc(x.data, og, w.ensureGrad(), n, din, dout);
    if (bias) {
      const bg = bias.ensureGrad();
      for (let i = 0; i < n; i++) {
        const o = i * dout;
        for (let j = 0; j < dout; j++) bg[j] += og[o + j];
      }
    }
  });
}

export function layerNorm(x: Tensor, gamma: Tensor, beta: Tensor, eps = 1e-5): Tensor {
  const d = gamma.shape[0];
  const n = x.size / d;
  const out = new Tensor(new Float64Array(x.size), x.shape.slice());
  const xhat = new Float64Array(x.size);
  const invStd = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    const o = i * d;
    let mean = 0;
    for (let j = 0; j < d; j++) mean += x.data[o + j];
    mean /= d;
    let varSum = 0;
    for (let j = 0; j < d; j++) {
      const c = x.data[o + j] - mean;
      varSum += c * c;
    }
    const inv = 1 / Math.sqrt(varSum / d + eps);
    invStd[i] = inv;
    for (let j = 0; j < d; j++) {
      const h = (x.data[o + j] - mean) * inv;
      xhat[o + j] = h;
      out.data[o + j] = gamma.data[j] * h + beta.data[j];
    }
  }
  return record(out, () => {
    const og = out.grad!;
    const xg = x.ensureGrad();
    const gg = gamma.ensureGrad();
    const bg = beta.ensureGrad();
    for (let i = 0; i < n; i++) {
      const o = i * d;
      let meanG = 0;
      let meanGH = 0;
      for (let j = 0; j < d; j++) {
        const g = og[o + j] * gamma.data[j];
        meanG += g;
        meanGH += g * xhat[o + j];
        gg[j] += og[o + j] * xhat[o + j];
        bg[j] += og[o + j];
      }
      meanG /= d;
      meanGH /= d;
      const inv = invStd[i];
      for (let j = 0; j < d; j++) {
        const g = og[o + j] * gamma.data[j];
        xg[o + j] += inv * (g - meanG - xhat[o + j] * meanGH);
      }
    }
  });
}

const GELU_C = Math.sqrt(2 / Math.PI);

export function gelu(x: Tensor): Tensor {
  const out = new Tensor(new Float64Array(x.size), x.shape.slice());
  const tanhs = new Float64Array(x.size); // saved: tanh dominates the op cost
  for (let i = 0; i < x.size; i++) {
    const v = x.data[i];
    const t = Math.tanh(GELU_C * (v + 0.044715 * v * v * v));
    tanhs[i] = t;
    out.data[i] = 0.5 * v * (1 + t);
  }
  return record(out, () => {
    const og = out.grad!;
    const xg = x.ensureGrad();
    for (let i = 0; i < x.size; i++) {
      const v = x.data[i];
      const t = tanhs[i];
      const du = GELU_C * (1 + 3 * 0.044715 * v * v);
      xg[i] += og[i] * (0.5 * (1 + t) + 0.5 * v * (1 - t * t) * du);
    }
  });
}

export function dropout(x: Tensor, rate: number, rng: Prng, training: boolean): Tensor {
  if (!training || rate === 0) return x;
  const keep = 1 - rate;
  const mask = new Float64Array(x.size);
  const out = new Tensor(new Float64Array(x.size), x.shape.slice());
  for (let i = 0; i < x.size; i++) {
    mask[i] = rng.uniform() < keep ? 1 / keep : 0;
    out.data[i] = x.data[i] * mask[i];
  }
  return record(out, () => {
    const og = out.grad!;
    const xg = x.ensureGrad();
    for (let i = 0; i < x.size; i++) xg[i] += og[i] * mask[i];
  });
}

/** Fused scaled-dot-product attention with a key padding mask.
 *
 *  q: [b, lq, d], k/v: [b, lk, d], mask: Uint8Array[b*lk] (1 = padded key).
 *  Heads split d into `heads` slices of dh = d/heads. Rows never consist of
 *  padded keys only (every number has at least one digit).
 */
export function attentionCore(
  q: Tensor,
  k: Tensor,
  v: Tensor,
  heads: number,
  mask: Uint8Array,
  attnDropout: number,
  rng: Prng,
  training: boolean,
): Tensor {
  const [b, lq, d] = q.shape;
  const lk = k.shape[1];
  if (d % heads !== 0) throw new Error("embed dim not divisible by heads");
  const dh = d / heads;
  const scale = 1 / Math.sqrt(dh);
  const probs = new Float64Array(b * heads * lq * lk);
  const dropMask = training && attnDropout > 0 ? new Float64Array(b * heads * lq * lk) : null;
  const keep = 1 - attnDropout;
  const out = new Tensor(new Float64Array(b * lq * d), [b, lq, d]);

  const scores = new Float64Array(lk);
  for (let bi = 0; bi < b; bi++) {
    for (let h = 0; h < heads; h++) {
      const ho = h * dh;
      for (let i = 0; i < lq; i++) {
        const qo = (bi * lq + i) * d + ho;
        let max = -Infinity;
        for (let j = 0; j < lk; j++) {
          if (mask[bi * lk + j]) {
            scores[j] = -Infinity;
            continue;
          }
          const ko = (bi * lk + j) * d + ho;
          let s = 0;
          for (let p = 0; p < dh; p++) s += q.data[qo + p] * k.data[ko + p];
          s *= scale;
          scores[j] = s;
          if (s > max) max = s;
        }
        let z = 0;
        const po = ((bi * heads + h) * lq + i) * lk;
        for (let j = 0; j < lk; j++) {
          const e = scores[j] === -Infinity ? 0 : Math.exp(scores[j] - max);
          probs[po + j] = e;
          z += e;
        }
        const invZ = 1 / z;
        for (let j = 0; j < lk; j++) probs[po + j] *= invZ;
        const oo = (bi * lq + i) * d + ho;
        for (let j = 0; j < lk; j++) {
          let p = probs[po + j];
          if (dropMask) {
            const m = rng.uniform() < keep ? 1 / keep : 0;
            dropMask[po + j] = m;
            p *= m;
          }
          if (p === 0) continue;
          const vo = (bi * lk + j) * d + ho;
          for (let pp = 0; pp < dh; pp++) out.data[oo + pp] += p * v.data[vo + pp];
        }
      }
    }
  }

  return record(out, () => {
    const og = out.grad!;
    const qg = q.ensureGrad();
    const kg = k.ensureGrad();
    const vg = v.ensureGrad();
    const dP = new Float64Array(lk);
    for (let bi = 0; bi < b; bi++) {
      for (let h = 0; h < heads; h++) {
        const ho = h * dh;
        for (let i = 0; i < lq; i++) {
          const po = ((bi * heads + h) * lq + i) * lk;
          const oo = (bi * lq + i) * d + ho;
          // dV and dP'
          for (let j = 0; j < lk; j++) {
            const m = dropMask ? dropMask[po + j] : 1;
            const pEff = probs[po + j] * m;
            const vo = (bi * lk + j) * d + ho;
            let acc = 0;
            for (let pp = 0; pp < dh; pp++) {
              acc += og[oo + pp] * v.data[vo + pp];
              if (pEff !== 0) vg[vo + pp] += pEff * og[oo + pp];
            }
            dP[j] = acc * m; // through dropout
          }
          // softmax backward: dS_j = P_j (dP_j - sum_k dP_k P_k)
          let dot = 0;
          for (let j = 0; j < lk; j++) dot += dP[j] * probs[po + j];
          const qo = (bi * lq + i) * d + ho;
          for (let j = 0; j < lk; j++) {
            const ds = probs[po + j] * (dP[j] - dot) * scale;
            if (ds === 0) continue;
            const ko = (bi * lk + j) * d + ho;
            for (let pp = 0; pp < dh; pp++) {
              qg[qo + pp] += ds * k.data[ko + pp];
              kg[ko + pp] += ds * q.data[qo + pp];
            }
          }
        }
      }
    }
  });
}

/** Broadcast a [d] parameter to [b, 1, d] (the learned pooling query). */
export function expandQuery(qparam: Tensor, b: number): Tensor {
  const d = qparam.shape[0];
  const out = new Tensor(new Float64Array(b * d), [b, 1, d]);
  for (let i = 0; i < b; i++) out.data.set(qparam.data, i * d);
  return record(out, () => {
    const og = out.grad!;
    const pg = qparam.ensureGrad();
    for (let i = 0; i < b; i++) {
      for (let j = 0; j < d; j++) pg[j] += og[i * d + j];
    }
  });
}

/** Reinterpret shape without copying (layout-compatible only). */
export function reshape(x: Tensor, shape: number[]): Tensor {
  const out = new Tensor(x.data, shape);
  return record(out, () => {
    const xg = x.ensureGrad();
    const og = out.grad!;
    for (let i = 0; i < og.length; i++) xg[i] += og[i];
  });
}

/** Concatenate [b, d_i] tensors along the last axis. */
export function concatLast(xs: Tensor[]): Tensor {
  const b = xs[0].shape[0];
  const dims = xs.map((x) => x.shape[1]);
  const dTot = dims.reduce((a, c) => a + c, 0);
  const out = new Tensor(new Float64Array(b * dTot), [b, dTot]);
  for (let i = 0; i < b; i++) {
    let off = 0;
    for (let t = 0; t < xs.length; t++) {
      out.data.set(xs[t].data.subarray(i * dims[t], (i + 1) * dims[t]), i * dTot + off);
      off += dims[t];
    }
  }
  return record(out, () => {
    const og = out.grad!;
    for (let i = 0; i < b; i++) {
      let off = 0;
      for (let t = 0; t < xs.length; t++) {
        const xg = xs[t].ensureGrad();
        for (let j = 0; j < dims[t]; j++) xg[i * dims[t] + j] += og[i * dTot + off + j];
        off += dims[t];
      }
    }
  });
}

/** Mean binary cross-entropy over logits [b] against 0/1 targets. */
export function bceWithLogits(logits: Tensor, targets: Float64Array): Tensor {
  const n = logits.size;
  let total = 0;
  for (let i = 0; i < n; i++) {
    const z = logits.data[i];
    total += Math.max(z, 0) - z * targets[i] + Math.log1p(Math.exp(-Math.abs(z)));
  }
  const out = new Tensor(new Float64Array([total / n]), [1]);
  return record(out, () => {
    const og = out.grad![0];
    const lg = logits.ensureGrad();
    for (let i = 0; i < n; i++) {
      const p = 1 / (1 + Math.exp(-logits.data[i]));
      lg[i] += (og * (p - targets[i])) / n;
    }
  });
}

export function sigmoid(z: number): number {
  return 1 / (1 + Math.exp(-z));
}
