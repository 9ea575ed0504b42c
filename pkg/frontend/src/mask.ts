/**
 * Masked-example generation, bit-compatible with the Python toolkit.
 *
 * Units (pieces, or whole words under whole-word masking) are shuffled
 * with Fisher-Yates and taken until the selected piece count reaches
 * max(1, floor(rate * n + 0.5)). Each unit draws one action (MASK below
 * 0.80, KEEP below 0.90, RANDOM otherwise); RANDOM positions draw
 * independent replacements uniformly over non-special vocabulary ids.
 * The draw order is fixed: unit shuffle, then per selected unit the
 * action draw, then per-piece replacement draws.
 */

import { deriveRng } from "./rng.js";
import { Vocabulary } from "./vocab.js";

export const IGNORE_INDEX = -100;

export interface MaskResult {
  maskedIds: number[];
  labels: number[];
}

function candidateUnits(wordIndex: number[], wwm: boolean): number[][] {
  const positions = wordIndex
    .map((w, i) => (w !== -1 ? i : -1))
    .filter((i) => i !== -1);
  if (!wwm) return positions.map((p) => [p]);
  const units: number[][] = [];
  let currentWord: number | null = null;
  for (const p of positions) {
    const w = wordIndex[p];
    if (w !== currentWord) {
      units.push([]);
      currentWord = w;
    }
    units[units.length - 1].push(p);
  }
  return units;
}

export function mask(
  ids: number[],
  wordIndex: number[],
  rate: number,
  wwm: boolean,
  seed: number,
  vocab: Vocabulary,
  ordinal = 0,
): MaskResult {
  if (ids.length !== wordIndex.length) {
    throw new Error(`ids (${ids.length}) and wordIndex (${wordIndex.length}) differ in length`);
  }
  if (!(rate >= 0 && rate <= 1)) throw new RangeError(`rate must be in [0, 1], got ${rate}`);
  const units = candidateUnits(wordIndex, wwm);
  const nCandidates = units.reduce((acc, u) => acc + u.length, 0);
  if (nCandidates === 0) throw new Error("no non-special pieces to mask");

  const budget = Math.max(1, Math.floor(rate * nCandidates + 0.5));
  const rng = deriveRng(seed, ordinal);
  const order = units.map((_, i) => i);
  rng.shuffle(order);

  const pool: number[] = [];
  for (let i = 0; i < vocab.size; i++) {
    if (!vocab.specialIds.has(i)) pool.push(i);
  }

  const maskedIds = [...ids];
  const labels = new Array<number>(ids.length).fill(IGNORE_INDEX);
  let taken = 0;
  for (const unitIdx of order) {
    if (taken >= budget) break;
    const unit = units[unitIdx];
    const r = rng.nextFloat();
    const action = r < 0.8 ? "MASK" : r < 0.9 ? "KEEP" : "RANDOM";
    for (const p of unit) {
      labels[p] = ids[p];
      if (action === "MASK") {
        maskedIds[p] = vocab.maskId;
      } else if (action === "RANDOM") {
        maskedIds[p] = pool[rng.nextBelow(pool.length)];
      }
    }
    taken += unit.length;
  }
  return { maskedIds, labels };
}
