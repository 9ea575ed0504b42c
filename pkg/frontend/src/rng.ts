/**
 * Portable PCG32 stream, bit-compatible with the Python toolkit.
 *
 * Algorithm: pcg_setseq_64_xsh_rr_32 (64-bit LCG state, XSH-RR output).
 * Per-record generators derive from (seed, ordinal) via splitmix64:
 *   z = (seed * 0x9E3779B97F4A7C15 + ordinal) mod 2^64
 *   initstate = splitmix64(z), initseq = splitmix64(z + 1)
 * Bounded draws use rejection sampling; floats are nextUint32 / 2^32.
 */

const MASK64 = (1n << 64n) - 1n;
const MASK32 = (1n << 32n) - 1n;
const PCG_MULT = 6364136223846793005n;
const GOLDEN = 0x9e3779b97f4a7c15n;

export function splitmix64(z: bigint): bigint {
  z = (z + GOLDEN) & MASK64;
  z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK64;
  z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK64;
  return z ^ (z >> 31n);
}

export class Pcg32 {
  private state: bigint;
  private inc: bigint;

  constructor(initstate: bigint, initseq: bigint = 0n) {
    this.state = 0n;
    this.inc = ((initseq << 1n) | 1n) & MASK64;
    this.nextUint32();
    this.state = (this.state + initstate) & MASK64;
    this.nextUint32();
  }

  nextUint32(): number {
    const old = this.state;
    this.state = (old * PCG_MULT + this.inc) & MASK64;
    const xorshifted = (((old >> 18n) ^ old) >> 27n) & MASK32;
    const rot = old >> 59n;
    const out = ((xorshifted >> rot) | (xorshifted << ((32n - rot) & 31n))) & MASK32;
    return Number(out);
  }

  /** float64 in [0, 1) with 32 bits of randomness. */
  nextFloat(): number {
    return this.nextUint32() * 2 ** -32;
  }

  /** Uniform integer in [0, n), unbiased via rejection. */
  nextBelow(n: number): number {
    if (n <= 0) throw new RangeError("bound must be positive");
    const threshold = Number((0x100000000n - BigInt(n)) % BigInt(n));
    for (;;) {
      const r = this.nextUint32();
      if (r >= threshold) return r % n;
    }
  }

  /** In-place Fisher-Yates shuffle. */
  shuffle<T>(items: T[]): void {
    for (let i = items.length - 1; i > 0; i--) {
      const j = this.nextBelow(i + 1);
      [items[i], items[j]] = [items[j], items[i]];
    }
  }
}

export function deriveRng(seed: number | bigint, ordinal: number | bigint = 0): Pcg32 {
  const z = (BigInt(seed) * GOLDEN + BigInt(ordinal)) & MASK64;
  return new Pcg32(splitmix64(z), splitmix64((z + 1n) & MASK64));
}
