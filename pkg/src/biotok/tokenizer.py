"""Text normalization, pre-tokenization and WordPiece encoding.

The pipeline mirrors the original BERT tokenizer so that encodings
against the published uncased vocabulary match the public reference
implementation id-for-id: NFC + control-character cleanup, CJK isolation,
whitespace split, per-word lower/accent handling, punctuation isolation,
then greedy longest-match WordPiece with an [UNK] escape.

An :class:`Encoding` carries parallel lists (pieces, ids, word_index,
segment_ids, offsets). Offsets are UTF-8 byte ranges into
``Encoding.text``, the normalized text reconstructed as the
space-joined pre-token sequence; pieces of one word tile its span.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field

from .errors import ConfigError, DataError
from .vocab import CLS, SEP, UNK, Vocabulary

SPECIAL_WORD_INDEX = -1

_CJK_RANGES = (
    (0x4E00, 0x9FFF),
    (0x3400, 0x4DBF),
    (0x20000, 0x2A6DF),
    (0x2A700, 0x2B73F),
    (0x2B740, 0x2B81F),
    (0x2B820, 0x2CEAF),
    (0xF900, 0xFAFF),
    (0x2F800, 0x2FA1F),
)


@dataclass(frozen=True)
class TokenizerConfig:
    casing: str | None = None
    max_word_chars: int = 100
    max_seq_len: int = 512
    strip_accents: bool | None = None

    def __post_init__(self):
        if self.max_seq_len < 3:
            raise ConfigError("max_seq_len must be at least 3 ([CLS] + piece + [SEP])")
        if self.max_word_chars < 1:
            raise ConfigError("max_word_chars must be positive")


@dataclass
class Encoding:
    pieces: list[str]
    ids: list[int]
    word_index: list[int]
    segment_ids: list[int]
    offsets: list[tuple[int, int]]
    text: str

    def __post_init__(self):
        n = len(self.pieces)
        if not (len(self.ids) == len(self.word_index) == len(self.segment_ids) == len(self.offsets) == n):
            raise DataError("encoding lists have unequal lengths")

    def __len__(self) -> int:
        return len(self.pieces)

    def non_special_positions(self) -> list[int]:
        return [i for i, w in enumerate(self.word_index) if w != SPECIAL_WORD_INDEX]


def _is_whitespace(ch: str) -> bool:
    return ch in " \t\n\r" or unicodedata.category(ch) == "Zs"


def _is_control(ch: str) -> bool:
    if ch in "\t\n\r":
        return False
    return unicodedata.category(ch).startswith("C")


def _is_punctuation(ch: str) -> bool:
    cp = ord(ch)
    if 33 <= cp <= 47 or 58 <= cp <= 64 or 91 <= cp <= 96 or 123 <= cp <= 126:
        return True
    return unicodedata.category(ch).startswith("P")


def _is_cjk(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _CJK_RANGES)


def _clean(text: str) -> str:
    out = []
    for ch in text:
        if ord(ch) == 0 or ord(ch) == 0xFFFD or _is_control(ch):
            continue
        out.append(" " if _is_whitespace(ch) else ch)
    return "".join(out)


def _pad_cjk(text: str) -> str:
    out = []
    for ch in text:
        if _is_cjk(ch):
            out.append(f" {ch} ")
        else:
            out.append(ch)
    return "".join(out)


def _case_fold(word: str, strip_accents: bool) -> str:
    word = word.lower()
    if strip_accents:
        word = "".join(
            ch for ch in unicodedata.normalize("NFD", word)
            if unicodedata.category(ch) != "Mn"
        )
    return word


def normalize(text: str, casing: str = "uncased", strip_accents: bool | None = None) -> str:
    """NFC-normalize, drop control characters, unify whitespace, case-fold.

    Under ``uncased`` the text is lowercased; combining marks are removed
    unless ``strip_accents=False`` (the default follows the public
    reference tokenizer, which strips them when lowercasing).
    """
    if casing not in ("cased", "uncased"):
        raise ConfigError(f"casing must be 'cased' or 'uncased', got {casing!r}")
    text = _pad_cjk(_clean(unicodedata.normalize("NFC", text)))
    if casing == "uncased":
        strip = True if strip_accents is None else strip_accents
        text = _case_fold(text, strip)
    return text


def _split_punct(word: str) -> list[str]:
    parts: list[str] = []
    current: list[str] = []
    for ch in word:
        if _is_punctuation(ch):
            if current:
                parts.append("".join(current))
                current = []
            parts.append(ch)
        else:
            current.append(ch)
    if current:
        parts.append("".join(current))
    return parts


def pre_tokenize(text: str) -> list[tuple[str, tuple[int, int]]]:
    """Split normalized text into words with UTF-8 byte offsets.

    Whitespace separates words and every punctuation character becomes a
    standalone word; offsets cover each non-whitespace byte exactly once.
    """
    words: list[tuple[str, tuple[int, int]]] = []
    byte_pos = 0
    char_buf: list[str] = []
    buf_start = 0

    def flush(end_byte: int):
        if char_buf:
            words.append(("".join(char_buf), (buf_start, end_byte)))
            char_buf.clear()

    for ch in text:
        width = len(ch.encode("utf-8"))
        if _is_whitespace(ch):
            flush(byte_pos)
        elif _is_punctuation(ch):
            flush(byte_pos)
            words.append((ch, (byte_pos, byte_pos + width)))
        else:
            if not char_buf:
                buf_start = byte_pos
            char_buf.append(ch)
        byte_pos += width
    flush(byte_pos)
    return words


def wordpiece_tokenize(
    word: str, vocab: Vocabulary, max_word_chars: int = 100
) -> list[str]:
    """Greedy longest-match-first segmentation of one word.

    Returns ``[UNK]`` when the word exceeds ``max_word_chars`` or some
    position has no matching vocabulary entry.
    """
    if not word:
        raise DataError("cannot tokenize an empty word")
    if len(word) > max_word_chars:
        return [UNK]
    prefix = vocab.continuation_prefix
    pieces: list[str] = []
    start = 0
    while start < len(word):
        end = len(word)
        match = None
        while start < end:
            candidate = word[start:end]
            if start > 0:
                candidate = prefix + candidate
            if candidate in vocab.token_to_id:
                match = candidate
                break
            end -= 1
        if match is None:
            return [UNK]
        pieces.append(match)
        start = end
    return pieces


class WordPieceTokenizer:
    """Immutable tokenizer over one vocabulary; caches word segmentations."""

    def __init__(self, vocab: Vocabulary, config: TokenizerConfig | None = None):
        self.vocab = vocab
        config = config or TokenizerConfig()
        casing = config.casing if config.casing is not None else vocab.casing
        if casing not in ("cased", "uncased"):
            raise ConfigError(f"casing must be 'cased' or 'uncased', got {casing!r}")
        self.casing = casing
        self.config = config
        self._strip_accents = (
            config.strip_accents if config.strip_accents is not None else casing == "uncased"
        )
        self._cache: dict[str, list[str]] = {}

    def words_of(self, text: str) -> list[str]:
        """Normalized pre-token sequence, keeping reserved tokens atomic."""
        base = _pad_cjk(_clean(unicodedata.normalize("NFC", text)))
        words: list[str] = []
        for token in base.split():
            if token in self.vocab.reserved_tokens:
                words.append(token)
                continue
            if self.casing == "uncased":
                token = _case_fold(token, self._strip_accents)
            words.extend(_split_punct(token))
        return words

    def pieces_of(self, word: str) -> list[str]:
        pieces = self._cache.get(word)
        if pieces is None:
            pieces = wordpiece_tokenize(word, self.vocab, self.config.max_word_chars)
            self._cache[word] = pieces
        return pieces

    def tokenize(self, text: str) -> list[str]:
        """Pieces of ``text`` with no special tokens and no truncation."""
        out: list[str] = []
        for word in self.words_of(text):
            out.extend(self.pieces_of(word))
        return out

    def _body(self, text: str) -> tuple[list[str], list[int], list[tuple[int, int]], str]:
        """Pieces, per-piece word ordinals and byte offsets for one span."""
        words = self.words_of(text)
        normalized = " ".join(words)
        pieces: list[str] = []
        word_index: list[int] = []
        offsets: list[tuple[int, int]] = []
        byte_pos = 0
        prefix = self.vocab.continuation_prefix
        for ordinal, word in enumerate(words):
            if ordinal:
                byte_pos += 1  # the joining space
            word_bytes = len(word.encode("utf-8"))
            segs = self.pieces_of(word)
            if segs == [UNK]:
                spans = [(byte_pos, byte_pos + word_bytes)]
            else:
                spans = []
                cursor = byte_pos
                for piece in segs:
                    body = piece[len(prefix):] if piece.startswith(prefix) else piece
                    width = len(body.encode("utf-8"))
                    spans.append((cursor, cursor + width))
                    cursor += width
            pieces.extend(segs)
            word_index.extend([ordinal] * len(segs))
            offsets.extend(spans)
            byte_pos += word_bytes
        return pieces, word_index, offsets, normalized

    def encode(self, text: str) -> Encoding:
        """``[CLS] body [SEP]`` encoding, truncated to ``max_seq_len``."""
        pieces, word_index, offsets, normalized = self._body(text)
        keep = self.config.max_seq_len - 2
        pieces, word_index, offsets = pieces[:keep], word_index[:keep], offsets[:keep]
        vocab = self.vocab
        all_pieces = [CLS] + pieces + [SEP]
        return Encoding(
            pieces=all_pieces,
            ids=[vocab.token_to_id[p] for p in all_pieces],
            word_index=[SPECIAL_WORD_INDEX] + word_index + [SPECIAL_WORD_INDEX],
            segment_ids=[0] * (len(pieces) + 2),
            offsets=[(0, 0)] + offsets + [(0, 0)],
            text=normalized,
        )

    def encode_pair(self, first: str, second: str) -> Encoding:
        """``[CLS] A [SEP] B [SEP]`` with longest-first pair truncation.

        While the total length exceeds ``max_seq_len``, one piece is
        removed from the end of the currently longer segment (ties trim
        the second segment).
        """
        a_pieces, a_words, a_offsets, a_text = self._body(first)
        b_pieces, b_words, b_offsets, b_text = self._body(second)
        budget = self.config.max_seq_len - 3
        while len(a_pieces) + len(b_pieces) > budget:
            if len(a_pieces) > len(b_pieces):
                a_pieces.pop(), a_words.pop(), a_offsets.pop()
            else:
                b_pieces.pop(), b_words.pop(), b_offsets.pop()

        n_a_words = len(a_text.split())
        shift = len(a_text.encode("utf-8")) + 1 if a_text else 0
        text = (a_text + " " + b_text) if a_text else b_text
        vocab = self.vocab
        pieces = [CLS] + a_pieces + [SEP] + b_pieces + [SEP]
        word_index = (
            [SPECIAL_WORD_INDEX]
            + a_words
            + [SPECIAL_WORD_INDEX]
            + [w + n_a_words for w in b_words]
            + [SPECIAL_WORD_INDEX]
        )
        offsets = (
            [(0, 0)]
            + a_offsets
            + [(0, 0)]
            + [(s + shift, e + shift) for s, e in b_offsets]
            + [(0, 0)]
        )
        segments = [0] * (len(a_pieces) + 2) + [1] * (len(b_pieces) + 1)
        return Encoding(
            pieces=pieces,
            ids=[vocab.token_to_id[p] for p in pieces],
            word_index=word_index,
            segment_ids=segments,
            offsets=offsets,
            text=text,
        )


def encode(text: str, vocab: Vocabulary, config: TokenizerConfig | None = None) -> Encoding:
    return WordPieceTokenizer(vocab, config).encode(text)


def encode_pair(
    first: str, second: str, vocab: Vocabulary, config: TokenizerConfig | None = None
) -> Encoding:
    return WordPieceTokenizer(vocab, config).encode_pair(first, second)


def decode(ids: list[int], vocab: Vocabulary) -> str:
    """Join pieces back into text; continuation pieces attach without a
    space and special tokens are dropped."""
    special = set(vocab.special_tokens)
    prefix = vocab.continuation_prefix
    words: list[str] = []
    for token_id in ids:
        if not (0 <= token_id < len(vocab.tokens)):
            raise DataError(f"id {token_id} is out of vocabulary range")
        token = vocab.tokens[token_id]
        if token in special:
            continue
        if token.startswith(prefix) and words:
            words[-1] += token[len(prefix):]
        else:
            words.append(token)
    return " ".join(words)
