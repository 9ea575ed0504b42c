"""Subword vocabulary types and merge-based vocabulary training.

Training starts from words shattered into characters (non-initial
characters carry the continuation prefix) and repeatedly merges the
best-scoring adjacent pair until the vocabulary reaches its target size
or no pair is frequent enough. Two scorers are supported:

* ``frequency``           -- corpus frequency of the pair.
* ``unigram_likelihood``  -- ``count(ab) / (count(a) * count(b))``, the
  likelihood-gain criterion of a unigram language model.

Ties are broken by the lexicographically smallest (merged, left) string
pair, which makes training deterministic and shard-independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

import numpy as np

from . import _accel
from .errors import ConfigError, DataError, VocabFormatError

SPECIAL_TOKENS = ("[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]")
PAD, UNK, CLS, SEP, MASK = SPECIAL_TOKENS


@dataclass(frozen=True)
class Vocabulary:
    """Ordered token set; a token's id is its position in ``tokens``."""

    tokens: tuple[str, ...]
    casing: str = "uncased"
    continuation_prefix: str = "##"
    special_tokens: tuple[str, ...] = SPECIAL_TOKENS
    reserved_tokens: frozenset[str] = frozenset()
    token_to_id: dict[str, int] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        if not self.token_to_id:
            object.__setattr__(
                self, "token_to_id", {t: i for i, t in enumerate(self.tokens)}
            )
        if len(self.token_to_id) != len(self.tokens):
            seen = set()
            for t in self.tokens:
                if t in seen:
                    raise DataError(f"duplicate token: {t!r}")
                seen.add(t)
        if any(not t for t in self.tokens):
            raise DataError("vocabulary contains an empty token")
        missing = [t for t in self.special_tokens if t not in self.token_to_id]
        if missing:
            raise DataError(f"missing special tokens: {missing}")
        if self.casing not in ("cased", "uncased"):
            raise ConfigError(f"casing must be 'cased' or 'uncased', got {self.casing!r}")

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_id

    def id_of(self, token: str) -> int:
        return self.token_to_id[token]

    @property
    def unk_id(self) -> int:
        return self.token_to_id[UNK]

    @property
    def cls_id(self) -> int:
        return self.token_to_id[CLS]

    @property
    def sep_id(self) -> int:
        return self.token_to_id[SEP]

    @property
    def mask_id(self) -> int:
        return self.token_to_id[MASK]

    @property
    def special_ids(self) -> frozenset[int]:
        return frozenset(self.token_to_id[t] for t in self.special_tokens)

    def with_reserved(self, tokens: Iterable[str]) -> "Vocabulary":
        """Copy with ``tokens`` registered as atomic; appends missing ones."""
        tokens = list(dict.fromkeys(tokens))
        new_tokens = self.tokens + tuple(t for t in tokens if t not in self.token_to_id)
        return Vocabulary(
            tokens=new_tokens,
            casing=self.casing,
            continuation_prefix=self.continuation_prefix,
            special_tokens=self.special_tokens,
            reserved_tokens=self.reserved_tokens | frozenset(tokens),
        )


@dataclass(frozen=True)
class VocabTrainConfig:
    target_size: int
    min_pair_frequency: int = 2
    scorer: str = "frequency"
    casing: str = "uncased"
    continuation_prefix: str = "##"

    def __post_init__(self):
        if self.target_size <= 0:
            raise ConfigError("target_size must be positive")
        if self.min_pair_frequency <= 0:
            raise ConfigError("min_pair_frequency must be positive")
        if self.scorer not in ("frequency", "unigram_likelihood"):
            raise ConfigError(f"unknown scorer: {self.scorer!r}")


@dataclass(frozen=True)
class MergeRecord:
    left: str
    right: str
    merged: str
    score: float


MergeHistory = list[MergeRecord]


def shatter(
    word_freqs: dict[str, int], continuation_prefix: str = "##"
) -> tuple[dict[str, list[str]], list[str]]:
    """Character-level initial segmentation of every word.

    Returns the per-word piece lists and the sorted alphabet of observed
    single-character pieces (prefixed and unprefixed forms separately).
    """
    if not word_freqs:
        raise DataError("word frequency table is empty")
    segmentations: dict[str, list[str]] = {}
    alphabet: set[str] = set()
    for word in word_freqs:
        if not word:
            raise DataError("word frequency table contains an empty key")
        pieces = [word[0]] + [continuation_prefix + ch for ch in word[1:]]
        segmentations[word] = pieces
        alphabet.update(pieces)
    return segmentations, sorted(alphabet)


def _merged_string(left: str, right: str, prefix: str) -> str:
    tail = right[len(prefix):] if right.startswith(prefix) else right
    return left + tail


class _TrainState:
    """CSR arrays over distinct words plus the piece intern table."""

    def __init__(self, word_freqs: dict[str, int], prefix: str):
        segs, alphabet = shatter(word_freqs, prefix)
        self.prefix = prefix
        self.piece_strings: list[str] = list(alphabet)
        self.piece_ids: dict[str, int] = {p: i for i, p in enumerate(alphabet)}
        words = list(segs)
        self.freqs = np.array([word_freqs[w] for w in words], dtype=np.int64)
        lengths = np.array([len(segs[w]) for w in words], dtype=np.int64)
        self.starts = np.zeros(len(words) + 1, dtype=np.int64)
        np.cumsum(lengths, out=self.starts[1:])
        self.flat = np.fromiter(
            (self.piece_ids[p] for w in words for p in segs[w]),
            dtype=np.int32,
            count=int(lengths.sum()),
        )
        self.alphabet = alphabet

    def intern(self, piece: str) -> int:
        pid = self.piece_ids.get(piece)
        if pid is None:
            pid = len(self.piece_strings)
            self.piece_ids[piece] = pid
            self.piece_strings.append(piece)
        return pid

    def segmentation_of(self, word_index: int) -> list[str]:
        s, e = self.starts[word_index], self.starts[word_index + 1]
        return [self.piece_strings[pid] for pid in self.flat[s:e]]


def _select_best(
    state: _TrainState,
    keys: np.ndarray,
    counts: np.ndarray,
    scorer: str,
    min_pair_frequency: int,
    backend,
) -> tuple[int, int, float] | None:
    eligible = counts >= min_pair_frequency
    if not eligible.any():
        return None
    keys = keys[eligible]
    counts = counts[eligible]
    if scorer == "frequency":
        scores = counts.astype(np.float64)
    else:
        _, piece_counts_fn, _ = backend
        pc = piece_counts_fn(state.flat, state.starts, state.freqs, len(state.piece_strings))
        left = (keys >> 32).astype(np.int64)
        right = (keys & 0xFFFFFFFF).astype(np.int64)
        scores = counts.astype(np.float64) / (pc[left] * pc[right]).astype(np.float64)
    best = scores.max()
    tied = np.nonzero(scores == best)[0]
    best_key = None
    best_strings = None
    for i in tied:
        left_id = int(keys[i]) >> 32
        right_id = int(keys[i]) & 0xFFFFFFFF
        left_s = state.piece_strings[left_id]
        right_s = state.piece_strings[right_id]
        strings = (_merged_string(left_s, right_s, state.prefix), left_s)
        if best_strings is None or strings < best_strings:
            best_strings = strings
            best_key = (left_id, right_id)
    return best_key[0], best_key[1], float(best)


def _train(
    word_freqs: dict[str, int], config: VocabTrainConfig
) -> tuple[Vocabulary, MergeHistory]:
    state = _TrainState(word_freqs, config.continuation_prefix)
    backend = _accel.get_backend(_accel.ACTIVE_BACKEND)
    pair_counts_fn, _, merge_pair_fn = backend

    tokens: list[str] = list(SPECIAL_TOKENS) + state.alphabet
    token_set = set(tokens)
    floor = len(tokens)
    if config.target_size < floor:
        raise ConfigError(
            f"target_size {config.target_size} is below alphabet + specials ({floor})"
        )

    history: MergeHistory = []
    while len(tokens) < config.target_size:
        keys, counts = pair_counts_fn(state.flat, state.starts, state.freqs)
        if keys.size == 0:
            break
        best = _select_best(
            state, keys, counts, config.scorer, config.min_pair_frequency, backend
        )
        if best is None:
            break
        left_id, right_id, score = best
        left_s = state.piece_strings[left_id]
        right_s = state.piece_strings[right_id]
        merged_s = _merged_string(left_s, right_s, config.continuation_prefix)
        new_id = state.intern(merged_s)
        state.flat, state.starts = merge_pair_fn(
            state.flat, state.starts, left_id, right_id, new_id
        )
        history.append(MergeRecord(left_s, right_s, merged_s, score))
        if merged_s not in token_set:
            tokens.append(merged_s)
            token_set.add(merged_s)

    vocab = Vocabulary(
        tokens=tuple(tokens),
        casing=config.casing,
        continuation_prefix=config.continuation_prefix,
    )
    return vocab, history


def train_bpe(
    word_freqs: dict[str, int], config: VocabTrainConfig
) -> tuple[Vocabulary, MergeHistory]:
    """Frequency-scored merge training."""
    if config.scorer != "frequency":
        raise ConfigError("train_bpe requires scorer='frequency'")
    return _train(word_freqs, config)


def train_wordpiece(
    word_freqs: dict[str, int], config: VocabTrainConfig
) -> tuple[Vocabulary, MergeHistory]:
    """Unigram-likelihood-scored merge training."""
    if config.scorer != "unigram_likelihood":
        raise ConfigError("train_wordpiece requires scorer='unigram_likelihood'")
    return _train(word_freqs, config)


def replay_merges(
    word_freqs: dict[str, int],
    history: MergeHistory,
    casing: str = "uncased",
    continuation_prefix: str = "##",
) -> Vocabulary:
    """Rebuild a vocabulary by replaying a merge history from shatter()."""
    state = _TrainState(word_freqs, continuation_prefix)
    _, _, merge_pair_fn = _accel.get_backend(_accel.ACTIVE_BACKEND)
    tokens = list(SPECIAL_TOKENS) + state.alphabet
    token_set = set(tokens)
    for record in history:
        left_id = state.piece_ids.get(record.left)
        right_id = state.piece_ids.get(record.right)
        if left_id is None or right_id is None:
            raise DataError(
                f"merge ({record.left!r}, {record.right!r}) references unknown pieces"
            )
        new_id = state.intern(record.merged)
        state.flat, state.starts = merge_pair_fn(
            state.flat, state.starts, left_id, right_id, new_id
        )
        if record.merged not in token_set:
            tokens.append(record.merged)
            token_set.add(record.merged)
    return Vocabulary(
        tokens=tuple(tokens), casing=casing, continuation_prefix=continuation_prefix
    )


def save_vocab(vocab: Vocabulary, path: str | Path) -> None:
    """One token per line; the id of a token is its zero-based line index."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for token in vocab.tokens:
            fh.write(token + "\n")


def load_vocab(
    path: str | Path,
    casing: str = "uncased",
    continuation_prefix: str = "##",
) -> Vocabulary:
    tokens: list[str] = []
    seen: dict[str, int] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            token = line.rstrip("\n").rstrip("\r")
            if not token:
                raise VocabFormatError(f"{path}:{lineno}: empty token line")
            if token in seen:
                raise VocabFormatError(
                    f"{path}:{lineno}: duplicate token {token!r} (first at line {seen[token]})"
                )
            seen[token] = lineno
            tokens.append(token)
    return Vocabulary(
        tokens=tuple(tokens), casing=casing, continuation_prefix=continuation_prefix
    )


def save_merges(history: MergeHistory, path: str | Path) -> None:
    """``left<TAB>right<TAB>score`` lines in merge order."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for record in history:
            fh.write(f"{record.left}\t{record.right}\t{record.score!r}\n")


def load_merges(path: str | Path, continuation_prefix: str = "##") -> MergeHistory:
    history: MergeHistory = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected 'left<TAB>right<TAB>score'")
            left, right, score = parts
            history.append(
                MergeRecord(
                    left, right, _merged_string(left, right, continuation_prefix), float(score)
                )
            )
    return history
