"""Corpus ingestion: document loading, sentence splitting, word counting.

Corpora are newline-delimited UTF-8 text, one document per line, with an
optional leading ``id<TAB>`` prefix. Documents shorter than a word-count
threshold are counted and skipped, never treated as errors.
"""

from __future__ import annotations

import logging
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import DataError

logger = logging.getLogger(__name__)

# Sentence boundary: terminal punctuation run, whitespace, then an
# upper-case letter or digit (optionally behind quotes/brackets).
_BOUNDARY = re.compile(r'[.?!]+(?=(\s+)["\'(\[]?[A-Z0-9])')

# Words whose trailing period never ends a sentence. Compared against the
# last whitespace-delimited token (casefolded, leading brackets stripped).
DEFAULT_ABBREVIATIONS = frozenset({
    "e.g.", "i.e.", "vs.", "fig.", "figs.", "al.", "etc.", "cf.",
    "dr.", "prof.", "no.", "st.", "ca.", "approx.", "a.m.", "p.m.",
    "ref.", "refs.",
})

# Uppercase initials ("E. coli", "J. Smith") never end a sentence;
# a lone lowercase letter before a period does.
_SINGLE_INITIAL = re.compile(r"^[A-Z]\.$")


@dataclass(frozen=True)
class Sentence:
    """One sentence slice of a document, with UTF-8 byte offsets."""

    text: str
    byte_offsets: tuple[int, int]


@dataclass(frozen=True)
class Document:
    id: str
    sentences: tuple[Sentence, ...]
    word_count: int

    @property
    def text(self) -> str:
        return " ".join(s.text for s in self.sentences)


@dataclass
class CorpusStats:
    """Accounting for one load_corpus pass."""

    emitted: int = 0
    skipped_short: int = 0
    skipped_malformed: int = 0

    def summary(self) -> str:
        return (
            f"{self.emitted} documents emitted, "
            f"{self.skipped_short} below word threshold, "
            f"{self.skipped_malformed} malformed records skipped"
        )


def split_sentences(
    document_text: str,
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS,
) -> list[Sentence]:
    """Split text into sentences with a rule-based boundary detector.

    A boundary is a run of ``.?!`` followed by whitespace and an
    upper-case letter or digit, unless the token ending in the period is
    a known abbreviation or a single-letter initial ("E." in "E. coli").
    Sentence slices joined with the intervening whitespace reconstruct
    the input exactly.
    """
    text = unicodedata.normalize("NFC", document_text)
    if not text.strip():
        return []

    cut_points = []
    for m in _BOUNDARY.finditer(text):
        end = m.end()
        token_start = end
        while token_start > 0 and not text[token_start - 1].isspace():
            token_start -= 1
        token = text[token_start:end].lstrip("(['\"")
        if token.casefold() in abbreviations or _SINGLE_INITIAL.match(token):
            continue
        cut_points.append(end)

    byte_pos = [0]
    for ch in text:
        byte_pos.append(byte_pos[-1] + len(ch.encode("utf-8")))

    sentences = []
    start = 0
    for cut in cut_points + [len(text)]:
        chunk = text[start:cut]
        lead = len(chunk) - len(chunk.lstrip())
        trail = len(chunk) - len(chunk.rstrip())
        s, e = start + lead, cut - trail
        if e > s:
            sentences.append(Sentence(text[s:e], (byte_pos[s], byte_pos[e])))
        start = cut
    return sentences


def _parse_record(line: str) -> tuple[str | None, str]:
    if "\t" in line:
        doc_id, text = line.split("\t", 1)
        return doc_id, text
    return None, line


def load_corpus(
    path: str | Path,
    min_words: int = 0,
    stats: CorpusStats | None = None,
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS,
) -> Iterator[Document]:
    """Stream documents from a newline-delimited corpus file.

    Documents with fewer than ``min_words`` whitespace-delimited words
    are skipped and counted in ``stats``; blank or id-only records log a
    warning with their line number and are skipped.
    """
    stats = stats if stats is not None else CorpusStats()
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            doc_id, text = _parse_record(line)
            if not text.strip():
                if line.strip():
                    logger.warning("%s:%d: record has no text, skipped", path, lineno)
                    stats.skipped_malformed += 1
                continue
            sentences = split_sentences(text, abbreviations)
            word_count = sum(len(s.text.split()) for s in sentences)
            if word_count < min_words:
                stats.skipped_short += 1
                continue
            stats.emitted += 1
            yield Document(
                id=doc_id if doc_id is not None else f"doc{lineno}",
                sentences=tuple(sentences),
                word_count=word_count,
            )


def build_word_frequencies(
    documents: Iterable[Document],
    casing: str = "uncased",
) -> dict[str, int]:
    """Count normalized, pre-tokenized words over a document stream.

    Words are normalized and split exactly as the tokenizer pipeline
    does (punctuation becomes standalone words), so a vocabulary trained
    on this table segments real encoder input consistently.
    """
    from .tokenizer import normalize, pre_tokenize

    freqs: dict[str, int] = {}
    for doc in documents:
        for sentence in doc.sentences:
            for word, _ in pre_tokenize(normalize(sentence.text, casing)):
                freqs[word] = freqs.get(word, 0) + 1
    return freqs


def save_word_frequencies(freqs: dict[str, int], path: str | Path) -> None:
    """Write ``word<TAB>count`` lines sorted by (count desc, word asc)."""
    items = sorted(freqs.items(), key=lambda kv: (-kv[1], kv[0]))
    with Path(path).open("w", encoding="utf-8") as fh:
        for word, count in items:
            fh.write(f"{word}\t{count}\n")


def load_word_frequencies(path: str | Path) -> dict[str, int]:
    freqs: dict[str, int] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                word, count = line.split("\t")
                freqs[word] = int(count)
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: expected 'word<TAB>count'") from exc
    return freqs
