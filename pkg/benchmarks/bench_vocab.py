"""Benchmark the vocabulary-training kernels: numba vs numpy backend.

Two scenarios, each run in both backends (subprocesses with
BIOTOK_NUMBA=1 / 0) and checked for identical outputs:

* ``table``  -- merge training over a large random word-frequency table
  (the corpus-scale regime the kernels exist for).
* ``corpus`` -- end-to-end frequency build + training on the synthetic
  abstract fixture (small distinct-word set; numpy fallback tends to win
  here because the arrays are tiny).

    python benchmarks/bench_vocab.py
    python benchmarks/bench_vocab.py --scenario table --distinct 30000
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

TABLE_WORKER = r"""
import hashlib, json, sys, time
sys.path.insert(0, {src!r})

from biotok import _accel
from biotok.rng import Pcg32
from biotok.vocab import VocabTrainConfig, shatter, train_bpe

rng = Pcg32(5, 5)
alphabet = "abcdefghijklmnopqrstuvwxyz"
freqs = {{}}
while len(freqs) < {distinct}:
    length = 3 + rng.next_below(10)
    word = "".join(alphabet[rng.next_below(26)] for _ in range(length))
    freqs[word] = 1 + rng.next_below(500)
floor = 5 + len(shatter(freqs)[1])

t0 = time.perf_counter()
vocab, history = train_bpe(freqs, VocabTrainConfig(target_size=floor + {merges}))
t_train = time.perf_counter() - t0

print(json.dumps({{
    "backend": _accel.ACTIVE_BACKEND,
    "train_seconds": t_train,
    "merges": len(history),
    "vocab_digest": hashlib.sha256("\n".join(vocab.tokens).encode()).hexdigest(),
}}))
"""

CORPUS_WORKER = r"""
import hashlib, json, sys, time
sys.path.insert(0, {src!r})
sys.path.insert(0, {tests!r})

import synthcorpus
from biotok import _accel
from biotok.corpus import build_word_frequencies, load_corpus
from biotok.vocab import VocabTrainConfig, train_bpe

import tempfile, pathlib
with tempfile.TemporaryDirectory() as tmp:
    corpus = pathlib.Path(tmp) / "abstracts.txt"
    synthcorpus.write_corpus(corpus, {abstracts}, 11)
    t0 = time.perf_counter()
    docs = load_corpus(corpus, min_words=128)
    freqs = build_word_frequencies(docs, casing="uncased")
    t_freq = time.perf_counter() - t0

t0 = time.perf_counter()
vocab, history = train_bpe(freqs, VocabTrainConfig(target_size={target}))
t_train = time.perf_counter() - t0

print(json.dumps({{
    "backend": _accel.ACTIVE_BACKEND,
    "freq_seconds": t_freq,
    "train_seconds": t_train,
    "merges": len(history),
    "vocab_digest": hashlib.sha256("\n".join(vocab.tokens).encode()).hexdigest(),
}}))
"""


def _run(code: str, numba_flag: str) -> dict:
    env = dict(os.environ, BIOTOK_NUMBA=numba_flag)
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def _compare(code: str, label: str, detail_keys: tuple[str, ...]) -> bool:
    results = {}
    for flag, name in (("1", "numba"), ("0", "numpy")):
        results[name] = _run(code, flag)
        parts = ", ".join(f"{k} {results[name][k]:.2f}s" for k in detail_keys)
        print(f"  {name:>6}: {parts}, {results[name]['merges']} merges")
    if results["numba"]["vocab_digest"] != results["numpy"]["vocab_digest"]:
        print(f"  ERROR: backends diverged on {label}")
        return False
    speedup = results["numpy"]["train_seconds"] / results["numba"]["train_seconds"]
    print(f"  identical vocabularies; numba training speedup: {speedup:.2f}x")
    return True


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", choices=["table", "corpus", "both"], default="both")
    parser.add_argument("--distinct", type=int, default=20000)
    parser.add_argument("--merges", type=int, default=300)
    parser.add_argument("--abstracts", type=int, default=5000)
    parser.add_argument("--target", type=int, default=3000)
    args = parser.parse_args()

    ok = True
    if args.scenario in ("table", "both"):
        print(f"table scenario: {args.distinct} distinct words, {args.merges} merges")
        code = TABLE_WORKER.format(
            src=str(ROOT / "src"), distinct=args.distinct, merges=args.merges
        )
        ok &= _compare(code, "table", ("train_seconds",))
    if args.scenario in ("corpus", "both"):
        print(f"corpus scenario: {args.abstracts} abstracts, target {args.target}")
        code = CORPUS_WORKER.format(
            src=str(ROOT / "src"), tests=str(ROOT / "tests"),
            abstracts=args.abstracts, target=args.target,
        )
        ok &= _compare(code, "corpus", ("freq_seconds", "train_seconds"))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
