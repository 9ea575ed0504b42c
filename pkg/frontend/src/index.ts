/**
 * Bindings over biotok vocabulary files for training-stack consumers:
 * load a vocabulary once, then encode text and generate masked examples
 * with outputs elementwise identical to the Python CLI for the same
 * inputs, configuration and seed.
 */

import { mask as maskIds, IGNORE_INDEX, MaskResult } from "./mask.js";
import { BoundEncoding, BoundTokenizer, TokenizerConfig } from "./tokenizer.js";
import { Casing, loadVocab, Vocabulary } from "./vocab.js";

export { IGNORE_INDEX } from "./mask.js";
export type { MaskResult } from "./mask.js";
export type { BoundEncoding, TokenizerConfig } from "./tokenizer.js";
export { BoundTokenizer } from "./tokenizer.js";
export { loadVocab, Vocabulary } from "./vocab.js";
export { deriveRng, Pcg32, splitmix64 } from "./rng.js";

export interface LoadConfig extends TokenizerConfig {
  casing?: Casing;
}

export class Bindings {
  readonly vocab: Vocabulary;
  readonly tokenizer: BoundTokenizer;

  constructor(vocab: Vocabulary, config: LoadConfig = {}) {
    this.vocab = vocab;
    this.tokenizer = new BoundTokenizer(vocab, config);
  }

  encode(text: string): BoundEncoding {
    return this.tokenizer.encode(text);
  }

  encodePair(first: string, second: string): BoundEncoding {
    return this.tokenizer.encodePair(first, second);
  }

  mask(
    ids: number[],
    wordIndex: number[],
    rate: number,
    wwm: boolean,
    seed: number,
    ordinal = 0,
  ): MaskResult {
    return maskIds(ids, wordIndex, rate, wwm, seed, this.vocab, ordinal);
  }
}

/** Load a vocabulary file and return a shareable, immutable handle. */
export function load(vocabPath: string, config: LoadConfig = {}): Bindings {
  return new Bindings(loadVocab(vocabPath, config.casing ?? "uncased"), config);
}
