/** Gradient-boosted decision trees for binary classification.
 *
 *  Leaf-wise growth with second-order (Newton) leaf values under logistic
 *  loss: per round, g = p - y, h = p(1 - p); split gain is the usual
 *  G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda); leaves are
 *  grown best-first until the leaf budget runs out or no split clears the
 *  gain floor. Deterministic given (data, config, seed): the per-tree
 *  feature subsample comes from a seeded PRNG and ties break by feature
 *  order, then threshold.
 */

import { Prng } from "./prng.js";
import { sigmoid } from "./tensor.js";

export interface TreeConfig {
  leaves: number;
  learningRate: number;
  featureFraction: number;
  rounds: number;
  minLeaf: number;
  lambda: number;
  seed: number;
}

export const DEFAULT_TREE: TreeConfig = {
  leaves: 31,
  learningRate: 0.05,
  featureFraction: 0.9,
  rounds: 80,
  minLeaf: 5,
  lambda: 1e-3,
  seed: 0,
};

interface Node {
  feature: number;
  threshold: number;
  left: number;
  right: number;
  value: number; // leaf output when feature < 0
}

interface Leaf {
  nodeIdx: number;
  indices: Int32Array;
  gain: number;
  feature: number;
  threshold: number;
}

export class Gbdt {
  readonly cfg: TreeConfig;
  baseScore = 0;
  trees: Node[][] = [];
  featureCount = 0;

  constructor(cfg: Partial<TreeConfig> = {}) {
    this.cfg = { ...DEFAULT_TREE, ...cfg };
  }

  fit(x: Float64Array[], y: Float64Array): void {
    const n = x.length;
    this.featureCount = x[0].length;
    const rng = new Prng(this.cfg.seed);
    let posRate = 0;
    for (let i = 0; i < n; i++) posRate += y[i];
    posRate = Math.min(Math.max(posRate / n, 1e-6), 1 - 1e-6);
    this.baseScore = Math.log(posRate / (1 - posRate));

    const score = new Float64Array(n).fill(this.baseScore);
    const g = new Float64Array(n);
    const h = new Float64Array(n);

    for (let round = 0; round < this.cfg.rounds; round++) {
      for (let i = 0; i < n; i++) {
        const p = sigmoid(score[i]);
        g[i] = p - y[i];
        h[i] = Math.max(p * (1 - p), 1e-12);
      }
      const features = this.sampleFeatures(rng);
      const tree = this.growTree(x, g, h, features);
      this.trees.push(tree);
      for (let i = 0; i < n; i++) {
        score[i] += this.cfg.learningRate * evalTree(tree, x[i]);
      }
    }
  }

  private sampleFeatures(rng: Prng): number[] {
    const f = this.featureCount;
    const k = Math.max(1, Math.round(this.cfg.featureFraction * f));
    const idx = Array.from({ length: f }, (_, i) => i);
    for (let i = f - 1; i > 0; i--) {
      const j = rng.below(i + 1);
      [idx[i], idx[j]] = [idx[j], idx[i]];
    }
    return idx.slice(0, k).sort((a, b) => a - b);
  }

  private growTree(x: Float64Array[], g: Float64Array, h: Float64Array, features: number[]): Node[] {
    const nodes: Node[] = [];
    const { lambda, minLeaf, leaves } = this.cfg;

    const mkLeafNode = (indices: Int32Array): number => {
      let G = 0;
      let H = 0;
      for (const i of indices) {
        G += g[i];
        H += h[i];
      }
      nodes.push({ feature: -1, threshold: 0, left: -1, right: -1, value: -G / (H + lambda) });
      return nodes.length - 1;
    };

    const bestSplit = (indices: Int32Array) => {
      let G = 0;
      let H = 0;
      for (const i of indices) {
        G += g[i];
        H += h[i];
      }
      const parentObj = (G * G) / (H + lambda);
      let best = { gain: 0, feature: -1, threshold: 0 };
      for (const f of features) {
        const order = Array.from(indices).sort((a, b) => x[a][f] - x[b][f] || a - b);
        let GL = 0;
        let HL = 0;
        for (let pos = 0; pos < order.length - 1; pos++) {
          const i = order[pos];
          GL += g[i];
          HL += h[i];
          const vHere = x[i][f];
          const vNext = x[order[pos + 1]][f];
          if (vHere === vNext) continue;
          const nL = pos + 1;
          const nR = order.length - nL;
          if (nL < minLeaf || nR < minLeaf) continue;
          const GR = G - GL;
          const HR = H - HL;
          const gain = (GL * GL) / (HL + lambda) + (GR * GR) / (HR + lambda) - parentObj;
          if (gain > best.gain + 1e-12) {
            best = { gain, feature: f, threshold: (vHere + vNext) / 2 };
          }
        }
      }
      return best;
    };

    const rootIdx = mkLeafNode(Int32Array.from(x.keys()));
    const root = bestSplit(Int32Array.from(x.keys()));
    const frontier: Leaf[] = [
      { nodeIdx: rootIdx, indices: Int32Array.from(x.keys()), ...root },
    ];
    let leafCount = 1;

    while (leafCount < leaves) {
      let bi = -1;
      for (let i = 0; i < frontier.length; i++) {
        if (frontier[i].feature >= 0 && (bi < 0 || frontier[i].gain > frontier[bi].gain)) bi = i;
      }
      if (bi < 0) break;
      const leaf = frontier.splice(bi, 1)[0];
      const li: number[] = [];
      const ri: number[] = [];
      for (const i of leaf.indices) {
        (x[i][leaf.feature] <= leaf.threshold ? li : ri).push(i);
      }
      const leftIndices = Int32Array.from(li);
      const rightIndices = Int32Array.from(ri);
      const leftIdx = mkLeafNode(leftIndices);
      const rightIdx = mkLeafNode(rightIndices);
      nodes[leaf.nodeIdx] = {
        feature: leaf.feature,
        threshold: leaf.threshold,
        left: leftIdx,
        right: rightIdx,
        value: 0,
      };
      frontier.push({ nodeIdx: leftIdx, indices: leftIndices, ...bestSplit(leftIndices) });
      frontier.push({ nodeIdx: rightIdx, indices: rightIndices, ...bestSplit(rightIndices) });
      leafCount += 1;
    }
    return nodes;
  }

  /** Raw margin (log-odds) for one row. */
  margin(row: Float64Array): number {
    let s = this.baseScore;
    for (const tree of this.trees) s += this.cfg.learningRate * evalTree(tree, row);
    return s;
  }

  /** P(y = 1). */
  predict(row: Float64Array): number {
    return sigmoid(this.margin(row));
  }

  accuracy(x: Float64Array[], y: Float64Array): number {
    let correct = 0;
    for (let i = 0; i < x.length; i++) {
      correct += (this.predict(x[i]) >= 0.5 ? 1 : 0) === y[i] ? 1 : 0;
    }
    return correct / x.length;
  }
}

function evalTree(nodes: Node[], row: Float64Array): number {
  let idx = 0;
  for (;;) {
    const node = nodes[idx];
    if (node.feature < 0) return node.value;
    idx = row[node.feature] <= node.threshold ? node.left : node.right;
  }
}
