"""Masked-language-model example generation and NSP pair construction.

A masking plan selects units (pieces, or whole words when whole-word
masking is on) uniformly without replacement until the selected piece
count reaches ``max(1, floor(rate * n + 0.5))`` for ``n`` non-special
pieces; whole-word selection may overshoot by at most one word. Each
selected unit draws one action: MASK below 0.80, KEEP below 0.90, RANDOM
otherwise; RANDOM positions draw independent replacement ids uniformly
over non-special vocabulary ids.

All draws come from the portable PCG32 stream of
``rng.derive_rng(seed, ordinal)`` in a fixed order (unit shuffle, then
per selected unit the action draw, then per-piece replacement draws), so
any implementation of the same generator reproduces plans bit for bit.

The label vector holds the original id at selected positions and
``IGNORE_INDEX`` elsewhere.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .corpus import Document
from .errors import ConfigError, DataError
from .rng import derive_rng
from .tokenizer import SPECIAL_WORD_INDEX, Encoding
from .vocab import Vocabulary

IGNORE_INDEX = -100

MASK_ACTION = "MASK"
KEEP_ACTION = "KEEP"
RANDOM_ACTION = "RANDOM"


@dataclass(frozen=True)
class MaskingSchedule:
    """Stepwise masking-rate ramp over training progress."""

    start_rate: float = 0.05
    end_rate: float = 0.25
    step: float = 0.05
    epoch_fraction_per_step: float = 0.20

    def __post_init__(self):
        if self.step <= 0 or self.epoch_fraction_per_step <= 0:
            raise ConfigError("schedule step sizes must be positive")
        if self.end_rate < self.start_rate:
            raise ConfigError("end_rate must be >= start_rate")

    def rates(self) -> list[float]:
        n = int(round((self.end_rate - self.start_rate) / self.step)) + 1
        return [round(self.start_rate + k * self.step, 12) for k in range(n)]


def masking_rate(progress: float, schedule: MaskingSchedule = MaskingSchedule()) -> float:
    """Rate in effect at ``progress`` (fraction of training done).

    The rate starts at ``start_rate`` and rises by ``step`` after every
    ``epoch_fraction_per_step`` of progress, clamped to ``end_rate``.
    Window boundaries belong to the upper window (progress 0.2 already
    uses the second rate); a small epsilon guards against float noise in
    the division.
    """
    if not 0.0 <= progress <= 1.0:
        raise DataError(f"progress must be in [0, 1], got {progress}")
    k = int(math.floor(progress / schedule.epoch_fraction_per_step + 1e-9))
    rate = round(schedule.start_rate + k * schedule.step, 12)
    return min(rate, schedule.end_rate)


@dataclass(frozen=True)
class MaskedPosition:
    position: int
    action: str
    label: int
    replacement: int | None = None


@dataclass
class MaskingPlan:
    selected: list[MaskedPosition]

    @property
    def positions(self) -> list[int]:
        return [s.position for s in self.selected]


def _candidate_units(encoding: Encoding, wwm: bool) -> list[list[int]]:
    positions = encoding.non_special_positions()
    if not wwm:
        return [[p] for p in positions]
    units: list[list[int]] = []
    current_word = None
    for p in positions:
        w = encoding.word_index[p]
        if w != current_word:
            units.append([])
            current_word = w
        units[-1].append(p)
    return units


def select_targets(
    encoding: Encoding,
    rate: float,
    wwm: bool,
    seed: int,
    ordinal: int = 0,
    vocab: Vocabulary | None = None,
) -> MaskingPlan:
    """Draw a masking plan for one encoding.

    ``vocab`` is required to draw RANDOM replacements; pass the
    vocabulary the encoding was produced with.
    """
    if vocab is None:
        raise ConfigError("select_targets requires the vocabulary")
    if not 0.0 <= rate <= 1.0:
        raise DataError(f"rate must be in [0, 1], got {rate}")
    units = _candidate_units(encoding, wwm)
    n_candidates = sum(len(u) for u in units)
    if n_candidates == 0:
        raise DataError("encoding has no non-special pieces to mask")

    budget = max(1, int(math.floor(rate * n_candidates + 0.5)))
    rng = derive_rng(seed, ordinal)
    order = list(range(len(units)))
    rng.shuffle(order)

    special_ids = vocab.special_ids
    replacement_pool = [i for i in range(len(vocab)) if i not in special_ids]

    selected: list[MaskedPosition] = []
    taken = 0
    for unit_idx in order:
        if taken >= budget:
            break
        unit = units[unit_idx]
        r = rng.next_float()
        if r < 0.80:
            action = MASK_ACTION
        elif r < 0.90:
            action = KEEP_ACTION
        else:
            action = RANDOM_ACTION
        for p in unit:
            replacement = None
            if action == RANDOM_ACTION:
                replacement = replacement_pool[rng.next_below(len(replacement_pool))]
            selected.append(
                MaskedPosition(p, action, label=encoding.ids[p], replacement=replacement)
            )
        taken += len(unit)
    selected.sort(key=lambda s: s.position)
    return MaskingPlan(selected)


def apply_plan(
    encoding: Encoding, plan: MaskingPlan, vocab: Vocabulary
) -> tuple[list[int], list[int]]:
    """Masked id sequence plus the aligned label vector."""
    n = len(encoding.ids)
    masked = list(encoding.ids)
    labels = [IGNORE_INDEX] * n
    special_positions = {
        i for i, w in enumerate(encoding.word_index) if w == SPECIAL_WORD_INDEX
    }
    seen: set[int] = set()
    for entry in plan.selected:
        p = entry.position
        if not 0 <= p < n:
            raise DataError(f"plan position {p} outside sequence of length {n}")
        if p in special_positions:
            raise DataError(f"plan selects special-token position {p}")
        if p in seen:
            raise DataError(f"plan selects position {p} twice")
        seen.add(p)
        if entry.label != encoding.ids[p]:
            raise DataError(f"plan label at {p} does not match the encoding")
        labels[p] = encoding.ids[p]
        if entry.action == MASK_ACTION:
            masked[p] = vocab.mask_id
        elif entry.action == RANDOM_ACTION:
            if entry.replacement is None:
                raise DataError(f"RANDOM action at {p} has no replacement id")
            if entry.replacement in vocab.special_ids:
                raise DataError(f"RANDOM replacement at {p} is a special token id")
            masked[p] = entry.replacement
        elif entry.action != KEEP_ACTION:
            raise DataError(f"unknown action {entry.action!r}")
    return masked, labels


@dataclass(frozen=True)
class NspPair:
    first: str
    second: str
    is_next: bool
    first_doc: str
    second_doc: str


def build_nsp_pairs(
    documents: Iterable[Document],
    seed: int,
    false_fraction: float = 0.5,
) -> list[NspPair]:
    """Sentence pairs for next-sentence prediction.

    Every adjacent sentence pair in a document yields one example; with
    probability ``false_fraction`` the second sentence is replaced by a
    random sentence from a different document. ``false_fraction=0``
    produces adjacent (true) pairs only.
    """
    if not 0.0 <= false_fraction <= 1.0:
        raise ConfigError("false_fraction must be in [0, 1]")
    docs = [d for d in documents if d.sentences]
    if false_fraction > 0 and len(docs) < 2:
        raise DataError("negative pairs need at least 2 documents")
    rng = derive_rng(seed, 0)
    pairs: list[NspPair] = []
    for doc_idx, doc in enumerate(docs):
        for i in range(len(doc.sentences) - 1):
            first = doc.sentences[i].text
            if false_fraction > 0 and rng.next_float() < false_fraction:
                other_idx = rng.next_below(len(docs) - 1)
                if other_idx >= doc_idx:
                    other_idx += 1
                other = docs[other_idx]
                sent_idx = rng.next_below(len(other.sentences))
                pairs.append(
                    NspPair(first, other.sentences[sent_idx].text, False, doc.id, other.id)
                )
            else:
                pairs.append(
                    NspPair(first, doc.sentences[i + 1].text, True, doc.id, doc.id)
                )
    return pairs


@dataclass
class MaskedExample:
    ids: list[int]
    masked_ids: list[int]
    labels: list[int]
    segment_ids: list[int]
    is_next: bool | None = None

    def to_json(self) -> str:
        record = {
            "ids": self.ids,
            "masked_ids": self.masked_ids,
            "labels": self.labels,
            "segments": self.segment_ids,
        }
        if self.is_next is not None:
            record["is_next"] = self.is_next
        return json.dumps(record, ensure_ascii=False)


def make_masked_example(
    encoding: Encoding,
    rate: float,
    wwm: bool,
    seed: int,
    ordinal: int,
    vocab: Vocabulary,
    is_next: bool | None = None,
) -> MaskedExample:
    plan = select_targets(encoding, rate, wwm, seed, ordinal, vocab)
    masked, labels = apply_plan(encoding, plan, vocab)
    return MaskedExample(
        ids=list(encoding.ids),
        masked_ids=masked,
        labels=labels,
        segment_ids=list(encoding.segment_ids),
        is_next=is_next,
    )


def write_examples_binary(examples: Iterable[MaskedExample], fh) -> int:
    """Length-prefixed little-endian binary stream of examples.

    Record layout: u32 length ``n``, u8 has_is_next, u8 is_next, then
    ``n`` i32 ids, ``n`` i32 masked ids, ``n`` i32 labels, ``n`` u8
    segment ids. Returns the record count.
    """
    count = 0
    for ex in examples:
        n = len(ex.ids)
        fh.write(struct.pack("<IBB", n, ex.is_next is not None, bool(ex.is_next)))
        fh.write(struct.pack(f"<{n}i", *ex.ids))
        fh.write(struct.pack(f"<{n}i", *ex.masked_ids))
        fh.write(struct.pack(f"<{n}i", *ex.labels))
        fh.write(struct.pack(f"<{n}B", *ex.segment_ids))
        count += 1
    return count


def read_examples_binary(fh) -> Iterator[MaskedExample]:
    header = struct.Struct("<IBB")
    while True:
        head = fh.read(header.size)
        if not head:
            return
        n, has_next, is_next = header.unpack(head)
        ids = list(struct.unpack(f"<{n}i", fh.read(4 * n)))
        masked = list(struct.unpack(f"<{n}i", fh.read(4 * n)))
        labels = list(struct.unpack(f"<{n}i", fh.read(4 * n)))
        segments = list(struct.unpack(f"<{n}B", fh.read(n)))
        yield MaskedExample(ids, masked, labels, segments, bool(is_next) if has_next else None)
