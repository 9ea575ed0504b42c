/**
 * WordPiece encoding over a vocabulary file, elementwise identical to
 * the Python toolkit's `tokenize` CLI: NFC + control-character cleanup,
 * CJK isolation, whitespace split, per-word lower/accent folding under
 * uncased vocabularies, punctuation isolation, then greedy
 * longest-match WordPiece with an [UNK] escape.
 *
 * All string work is done on Unicode code points (not UTF-16 units) to
 * match Python's string semantics.
 */

import { CLS, SEP, UNK, Vocabulary } from "./vocab.js";

export interface TokenizerConfig {
  maxWordChars?: number;
  maxSeqLen?: number;
  stripAccents?: boolean;
}

export interface BoundEncoding {
  pieces: string[];
  ids: number[];
  segments: number[];
  wordIndex: number[];
}

const CJK_RANGES: Array<[number, number]> = [
  [0x4e00, 0x9fff],
  [0x3400, 0x4dbf],
  [0x20000, 0x2a6df],
  [0x2a700, 0x2b73f],
  [0x2b740, 0x2b81f],
  [0x2b820, 0x2ceaf],
  [0xf900, 0xfaff],
  [0x2f800, 0x2fa1f],
];

const ZS = /\p{Zs}/u;
const OTHER = /\p{C}/u;
const PUNCT = /\p{P}/u;
const COMBINING = /\p{Mn}/u;

function isWhitespace(ch: string): boolean {
  return ch === " " || ch === "\t" || ch === "\n" || ch === "\r" || ZS.test(ch);
}

function isControl(ch: string): boolean {
  if (ch === "\t" || ch === "\n" || ch === "\r") return false;
  return OTHER.test(ch);
}

function isPunctuation(ch: string): boolean {
  const cp = ch.codePointAt(0)!;
  if (
    (cp >= 33 && cp <= 47) ||
    (cp >= 58 && cp <= 64) ||
    (cp >= 91 && cp <= 96) ||
    (cp >= 123 && cp <= 126)
  ) {
    return true;
  }
  return PUNCT.test(ch);
}

function isCjk(ch: string): boolean {
  const cp = ch.codePointAt(0)!;
  return CJK_RANGES.some(([lo, hi]) => cp >= lo && cp <= hi);
}

function clean(text: string): string {
  const out: string[] = [];
  for (const ch of text) {
    const cp = ch.codePointAt(0)!;
    if (cp === 0 || cp === 0xfffd || isControl(ch)) continue;
    out.push(isWhitespace(ch) ? " " : ch);
  }
  return out.join("");
}

function padCjk(text: string): string {
  const out: string[] = [];
  for (const ch of text) {
    out.push(isCjk(ch) ? ` ${ch} ` : ch);
  }
  return out.join("");
}

function caseFold(word: string, stripAccents: boolean): string {
  let folded = word.toLowerCase();
  if (stripAccents) {
    folded = [...folded.normalize("NFD")].filter((ch) => !COMBINING.test(ch)).join("");
  }
  return folded;
}

function splitPunct(word: string): string[] {
  const parts: string[] = [];
  let current: string[] = [];
  for (const ch of word) {
    if (isPunctuation(ch)) {
      if (current.length) {
        parts.push(current.join(""));
        current = [];
      }
      parts.push(ch);
    } else {
      current.push(ch);
    }
  }
  if (current.length) parts.push(current.join(""));
  return parts;
}

export class BoundTokenizer {
  readonly vocab: Vocabulary;
  readonly maxWordChars: number;
  readonly maxSeqLen: number;
  readonly stripAccents: boolean;
  private cache = new Map<string, string[]>();

  constructor(vocab: Vocabulary, config: TokenizerConfig = {}) {
    this.vocab = vocab;
    this.maxWordChars = config.maxWordChars ?? 100;
    this.maxSeqLen = config.maxSeqLen ?? 512;
    if (this.maxSeqLen < 3) throw new Error("maxSeqLen must be at least 3");
    this.stripAccents = config.stripAccents ?? vocab.casing === "uncased";
  }

  wordsOf(text: string): string[] {
    const base = padCjk(clean(text.normalize("NFC")));
    const words: string[] = [];
    for (const token of base.split(/ +/).filter((t) => t.length > 0)) {
      const folded = this.vocab.casing === "uncased" ? caseFold(token, this.stripAccents) : token;
      words.push(...splitPunct(folded));
    }
    return words;
  }

  piecesOf(word: string): string[] {
    const cached = this.cache.get(word);
    if (cached) return cached;
    const pieces = this.wordpiece(word);
    this.cache.set(word, pieces);
    return pieces;
  }

  private wordpiece(word: string): string[] {
    const chars = [...word];
    if (chars.length === 0) throw new Error("cannot tokenize an empty word");
    if (chars.length > this.maxWordChars) return [UNK];
    const prefix = this.vocab.continuationPrefix;
    const pieces: string[] = [];
    let start = 0;
    while (start < chars.length) {
      let end = chars.length;
      let match: string | null = null;
      while (start < end) {
        let candidate = chars.slice(start, end).join("");
        if (start > 0) candidate = prefix + candidate;
        if (this.vocab.tokenToId.has(candidate)) {
          match = candidate;
          break;
        }
        end -= 1;
      }
      if (match === null) return [UNK];
      pieces.push(match);
      start = end;
    }
    return pieces;
  }

  private body(text: string): { pieces: string[]; wordIndex: number[]; nWords: number } {
    const words = this.wordsOf(text);
    const pieces: string[] = [];
    const wordIndex: number[] = [];
    words.forEach((word, ordinal) => {
      for (const piece of this.piecesOf(word)) {
        pieces.push(piece);
        wordIndex.push(ordinal);
      }
    });
    return { pieces, wordIndex, nWords: words.length };
  }

  /** `[CLS] body [SEP]` encoding, truncated to maxSeqLen. */
  encode(text: string): BoundEncoding {
    const { pieces, wordIndex } = this.body(text);
    const keep = this.maxSeqLen - 2;
    const bodyPieces = pieces.slice(0, keep);
    const bodyWords = wordIndex.slice(0, keep);
    const all = [CLS, ...bodyPieces, SEP];
    return {
      pieces: all,
      ids: all.map((p) => this.vocab.idOf(p)),
      segments: new Array(all.length).fill(0),
      wordIndex: [-1, ...bodyWords, -1],
    };
  }

  /**
   * `[CLS] A [SEP] B [SEP]`; while the total exceeds maxSeqLen one piece
   * is dropped from the end of the currently longer segment (ties trim
   * the second segment).
   */
  encodePair(first: string, second: string): BoundEncoding {
    const a = this.body(first);
    const b = this.body(second);
    const budget = this.maxSeqLen - 3;
    while (a.pieces.length + b.pieces.length > budget) {
      const victim = a.pieces.length > b.pieces.length ? a : b;
      victim.pieces.pop();
      victim.wordIndex.pop();
    }
    // shift by segment A's full word count (pre-truncation), matching
    // the reference pipeline
    const nAWords = a.nWords;
    const pieces = [CLS, ...a.pieces, SEP, ...b.pieces, SEP];
    const wordIndex = [
      -1,
      ...a.wordIndex,
      -1,
      ...b.wordIndex.map((w) => w + nAWords),
      -1,
    ];
    const segments = [
      ...new Array(a.pieces.length + 2).fill(0),
      ...new Array(b.pieces.length + 1).fill(1),
    ];
    return { pieces, ids: pieces.map((p) => this.vocab.idOf(p)), segments, wordIndex };
  }
}
