/** Vocabulary files: one token per line, id = zero-based line index. */

import { readFileSync } from "node:fs";

export const SPECIAL_TOKENS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] as const;
export const PAD = "[PAD]";
export const UNK = "[UNK]";
export const CLS = "[CLS]";
export const SEP = "[SEP]";
export const MASK = "[MASK]";

export type Casing = "cased" | "uncased";

export class Vocabulary {
  readonly tokens: string[];
  readonly tokenToId: Map<string, number>;
  readonly casing: Casing;
  readonly continuationPrefix: string;
  readonly specialIds: Set<number>;

  constructor(tokens: string[], casing: Casing = "uncased", continuationPrefix = "##") {
    this.tokens = tokens;
    this.casing = casing;
    this.continuationPrefix = continuationPrefix;
    this.tokenToId = new Map();
    tokens.forEach((token, id) => {
      if (token.length === 0) throw new Error(`empty token at line ${id + 1}`);
      if (this.tokenToId.has(token)) {
        throw new Error(
          `duplicate token ${JSON.stringify(token)} at line ${id + 1} ` +
            `(first at line ${this.tokenToId.get(token)! + 1})`,
        );
      }
      this.tokenToId.set(token, id);
    });
    for (const special of SPECIAL_TOKENS) {
      if (!this.tokenToId.has(special)) throw new Error(`missing special token ${special}`);
    }
    this.specialIds = new Set(SPECIAL_TOKENS.map((t) => this.tokenToId.get(t)!));
  }

  get size(): number {
    return this.tokens.length;
  }

  idOf(token: string): number {
    const id = this.tokenToId.get(token);
    if (id === undefined) throw new Error(`token not in vocabulary: ${token}`);
    return id;
  }

  get maskId(): number {
    return this.idOf(MASK);
  }
}

export function loadVocab(
  path: string,
  casing: Casing = "uncased",
  continuationPrefix = "##",
): Vocabulary {
  const text = readFileSync(path, "utf-8");
  const lines = text.split("\n");
  if (lines.length && lines[lines.length - 1] === "") lines.pop();
  return new Vocabulary(
    lines.map((line) => (line.endsWith("\r") ? line.slice(0, -1) : line)),
    casing,
    continuationPrefix,
  );
}
