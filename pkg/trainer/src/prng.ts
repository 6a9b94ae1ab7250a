/** Deterministic PRNG (sfc32). All randomness in the harness — init,
 *  dropout masks, shuffling, sampling — flows from explicit seeds so runs
 *  are reproducible. Pure 32-bit integer math: this sits on the hot path
 *  of every dropout mask. */

export class Prng {
  private a: number;
  private b: number;
  private c: number;
  private d: number;

  constructor(seed: number | bigint) {
    const s = BigInt(seed) & ((1n << 64n) - 1n);
    this.a = Number(s & 0xffffffffn) >>> 0;
    this.b = Number((s >> 32n) & 0xffffffffn) >>> 0;
    this.c = 0x9e3779b9 ^ this.a;
    this.d = 0x243f6a88 ^ this.b;
    for (let i = 0; i < 12; i++) this.next32(); // decorrelate from the raw seed
  }

  private next32(): number {
    const t = (((this.a + this.b) | 0) + this.d) | 0;
    this.d = (this.d + 1) | 0;
    this.a = this.b ^ (this.b >>> 9);
    this.b = (this.c + (this.c << 3)) | 0;
    this.c = (this.c << 21) | (this.c >>> 11);
    this.c = (this.c + t) | 0;
    return t >>> 0;
  }

  /** Uniform float in [0, 1). */
  uniform(): number {
    return this.next32() / 4294967296;
  }

  /** Uniform integer in [0, n). */
  below(n: number): number {
    return Math.floor(this.uniform() * n);
  }

  /** Standard normal via Box-Muller. */
  normal(): number {
    let u = this.uniform();
    if (u === 0) u = 1e-12;
    const v = this.uniform();
    return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v);
  }

  /** In-place Fisher-Yates shuffle. */
  shuffle(xs: Int32Array | number[]): void {
    for (let i = xs.length - 1; i > 0; i--) {
      const j = this.below(i + 1);
      const tmp = xs[i];
      xs[i] = xs[j];
      xs[j] = tmp;
    }
  }
}
