"""Vocabulary quality reports: term fragmentation and encoded length.

Fragmentation tokenizes a term list and reports how many pieces each
term shatters into and whether it survives whole. Length reports
measure mean non-special pieces per task record *before* truncation, so
numbers are comparable across vocabularies.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import DataError
from .taskprep import DUMMIFY, prepare_task_encoding, relation_from_json, transform_relation
from .tokenizer import TokenizerConfig, WordPieceTokenizer
from .vocab import UNK, Vocabulary


@dataclass
class TermFragmentation:
    term: str
    pieces: list[str]
    piece_count: int
    in_vocab_whole: bool


@dataclass
class FragmentationReport:
    vocab_id: str
    terms: list[TermFragmentation]
    mean_piece_count: float
    whole_fraction: float

    def to_dict(self) -> dict:
        return {
            "vocab": self.vocab_id,
            "terms": [
                {
                    "term": t.term,
                    "pieces": t.pieces,
                    "piece_count": t.piece_count,
                    "whole": t.in_vocab_whole,
                }
                for t in self.terms
            ],
            "mean_piece_count": self.mean_piece_count,
            "whole_fraction": self.whole_fraction,
        }


def fragmentation_report(
    vocab: Vocabulary, terms: Sequence[str], vocab_id: str = "vocab"
) -> FragmentationReport:
    """Tokenize each term under the vocabulary's casing and report how
    it fragments. A term is whole when it maps to a single piece equal
    to its normalized form ([UNK] never counts as whole)."""
    if not terms:
        raise DataError("term list is empty")
    tok = WordPieceTokenizer(vocab)
    rows: list[TermFragmentation] = []
    for term in terms:
        pieces = tok.tokenize(term)
        normalized_words = tok.words_of(term)
        whole = (
            len(pieces) == 1
            and pieces[0] != UNK
            and len(normalized_words) == 1
            and pieces[0] == normalized_words[0]
        )
        rows.append(TermFragmentation(term, pieces, max(len(pieces), 1), whole))
    mean = math.fsum(r.piece_count for r in rows) / len(rows)
    whole_fraction = sum(r.in_vocab_whole for r in rows) / len(rows)
    return FragmentationReport(vocab_id, rows, mean, whole_fraction)


@dataclass
class LengthReport:
    corpus_id: str
    vocab_id: str
    mean_pieces: float
    record_count: int
    empty_records: int = 0

    def to_dict(self) -> dict:
        return {
            "corpus": self.corpus_id,
            "vocab": self.vocab_id,
            "mean_pieces": self.mean_pieces,
            "records": self.record_count,
            "empty_records": self.empty_records,
        }


def _record_pieces(task: str, record: dict, vocab: Vocabulary, tok: WordPieceTokenizer) -> int:
    task = task.lower()
    if task in ("ner", "pico"):
        return len(tok.tokenize(" ".join(record["words"])))
    if task in ("chemprot", "ddi", "gad"):
        inst = relation_from_json(record, task) if not hasattr(record, "sentence") else record
        return len(tok.tokenize(transform_relation(inst, DUMMIFY).text))
    if task == "biosses":
        return len(tok.tokenize(record["a"])) + len(tok.tokenize(record["b"]))
    if task in ("pubmedqa", "bioasq"):
        return len(tok.tokenize(record["question"])) + len(tok.tokenize(record["text"]))
    # plain text records (hoc, raw corpus lines)
    return len(tok.tokenize(record["text"]))


def avg_length(
    vocab: Vocabulary,
    records: Iterable[dict],
    task: str = "hoc",
    corpus_id: str = "corpus",
    vocab_id: str = "vocab",
) -> LengthReport:
    """Mean non-special pieces per record after the task's input
    transform, measured without truncation."""
    tok = WordPieceTokenizer(vocab)
    total = 0.0
    count = 0
    empty = 0
    for record in records:
        n = _record_pieces(task, record, vocab, tok)
        if n == 0:
            empty += 1
        total = math.fsum((total, float(n)))
        count += 1
    mean = total / count if count else 0.0
    return LengthReport(corpus_id, vocab_id, mean, count, empty)


@dataclass
class VocabComparison:
    fragmentation_a: FragmentationReport
    fragmentation_b: FragmentationReport
    length_a: LengthReport | None
    length_b: LengthReport | None

    def to_dict(self) -> dict:
        out = {
            "fragmentation": {
                "a": self.fragmentation_a.to_dict(),
                "b": self.fragmentation_b.to_dict(),
                "delta_mean_piece_count": (
                    self.fragmentation_b.mean_piece_count - self.fragmentation_a.mean_piece_count
                ),
                "delta_whole_fraction": (
                    self.fragmentation_b.whole_fraction - self.fragmentation_a.whole_fraction
                ),
            }
        }
        if self.length_a and self.length_b:
            out["length"] = {
                "a": self.length_a.to_dict(),
                "b": self.length_b.to_dict(),
                "delta_mean_pieces": self.length_b.mean_pieces - self.length_a.mean_pieces,
            }
        return out

    def table(self) -> str:
        """Aligned plain-text per-term table."""
        width = max(len(t.term) for t in self.fragmentation_a.terms)
        lines = [f"{'term':<{width}}  {self.fragmentation_a.vocab_id:<24}  {self.fragmentation_b.vocab_id}"]
        for ta, tb in zip(self.fragmentation_a.terms, self.fragmentation_b.terms):
            fa = "whole" if ta.in_vocab_whole else "-".join(p.lstrip("#") for p in ta.pieces)
            fb = "whole" if tb.in_vocab_whole else "-".join(p.lstrip("#") for p in tb.pieces)
            lines.append(f"{ta.term:<{width}}  {fa:<24}  {fb}")
        return "\n".join(lines)


def compare_vocabs(
    vocab_a: Vocabulary,
    vocab_b: Vocabulary,
    terms: Sequence[str],
    records: Sequence[dict] | None = None,
    task: str = "hoc",
    ids: tuple[str, str] = ("vocab_a", "vocab_b"),
) -> VocabComparison:
    """Side-by-side fragmentation (and optional length) comparison."""
    frag_a = fragmentation_report(vocab_a, terms, ids[0])
    frag_b = fragmentation_report(vocab_b, terms, ids[1])
    length_a = length_b = None
    if records is not None:
        records = list(records)
        length_a = avg_length(vocab_a, records, task, vocab_id=ids[0])
        length_b = avg_length(vocab_b, records, task, vocab_id=ids[1])
    return VocabComparison(frag_a, frag_b, length_a, length_b)
