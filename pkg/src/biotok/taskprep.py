"""Task-specific input preparation for the six benchmark task types.

Covers span/tag conversions for NER (BIO, BIOUL, IO schemes), per-element
binary sequences for PICO, entity dummification and marker insertion for
relation extraction, chemical-protein negative expansion, and projection
of word-level labels onto piece-level label vectors for encoder input.

BIOUL letters follow the common convention (U marks a single-word entity,
L the last word); ``biuol_paper_letters=True`` swaps the two letters.
Decoded span sets are identical under either convention.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ConfigError, DataError
from .tokenizer import Encoding, TokenizerConfig, WordPieceTokenizer
from .vocab import Vocabulary

SCHEMES = ("BIO", "BIOUL", "IO")

# Dataset-specific input budgets (pieces including special tokens).
TASK_MAX_LEN = {
    "gad": 128,
    "chemprot": 256,
    "ddi": 256,
    "pubmedqa": 512,
    "bioasq": 512,
}

DATASET_LABELS = {
    "chemprot": frozenset({"CPR:3", "CPR:4", "CPR:5", "CPR:6", "CPR:9", "false"}),
    "ddi": frozenset({"DDI-advise", "DDI-effect", "DDI-int", "DDI-mechanism", "false"}),
    "gad": frozenset({"0", "1"}),
}

PIECE_LABEL_IGNORE = None  # continuation pieces and specials carry no label


@dataclass(frozen=True, order=True)
class EntitySpan:
    """Inclusive word-ordinal span of one entity mention."""

    start_word: int
    end_word: int
    entity_type: str

    def __post_init__(self):
        if self.start_word < 0 or self.end_word < self.start_word:
            raise DataError(f"invalid span ({self.start_word}, {self.end_word})")


@dataclass
class TagSequence:
    scheme: str
    tags: list[str]

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")


@dataclass
class PicoLabels:
    """Word-level binary labels for the P, I and O elements of one abstract.

    The three sequences are independent: a word may be positive in more
    than one element.
    """

    p: list[int]
    i: list[int]
    o: list[int]

    def __post_init__(self):
        if not (len(self.p) == len(self.i) == len(self.o)):
            raise DataError("PICO label sequences have unequal lengths")
        for seq in (self.p, self.i, self.o):
            if any(v not in (0, 1) for v in seq):
                raise DataError("PICO labels must be binary")

    def __len__(self) -> int:
        return len(self.p)


@dataclass
class RelationInstance:
    sentence: str
    e1: EntitySpan
    e2: EntitySpan
    label: str
    dataset: str | None = None

    def __post_init__(self):
        if _spans_overlap(self.e1, self.e2):
            raise DataError(f"entity spans overlap: {self.e1} vs {self.e2}")
        n_words = len(self.sentence.split())
        for span in (self.e1, self.e2):
            if span.end_word >= n_words:
                raise DataError(f"span {span} exceeds sentence of {n_words} words")
        if self.dataset is not None:
            allowed = DATASET_LABELS.get(self.dataset.lower())
            if allowed is not None and self.label not in allowed:
                raise DataError(
                    f"label {self.label!r} not in the {self.dataset} label set"
                )


def _spans_overlap(a: EntitySpan, b: EntitySpan) -> bool:
    return a.start_word <= b.end_word and b.start_word <= a.end_word


def _check_non_overlapping(spans: Sequence[EntitySpan]) -> None:
    ordered = sorted(spans, key=lambda s: (s.start_word, s.end_word))
    for prev, cur in zip(ordered, ordered[1:]):
        if _spans_overlap(prev, cur):
            raise DataError(f"overlapping spans: {prev} and {cur}")


def spans_to_tags(
    spans: Sequence[EntitySpan],
    n_words: int,
    scheme: str = "BIO",
    biuol_paper_letters: bool = False,
) -> TagSequence:
    """Render non-overlapping spans as a word-aligned tag sequence."""
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}")
    for span in spans:
        if span.end_word >= n_words:
            raise DataError(f"span {span} exceeds {n_words} words")
    _check_non_overlapping(spans)
    unit, last = ("L", "U") if biuol_paper_letters else ("U", "L")
    tags = ["O"] * n_words
    for span in spans:
        t = span.entity_type
        if scheme == "IO":
            for w in range(span.start_word, span.end_word + 1):
                tags[w] = f"I-{t}"
        elif scheme == "BIO":
            tags[span.start_word] = f"B-{t}"
            for w in range(span.start_word + 1, span.end_word + 1):
                tags[w] = f"I-{t}"
        else:  # BIOUL
            if span.start_word == span.end_word:
                tags[span.start_word] = f"{unit}-{t}"
            else:
                tags[span.start_word] = f"B-{t}"
                for w in range(span.start_word + 1, span.end_word):
                    tags[w] = f"I-{t}"
                tags[span.end_word] = f"{last}-{t}"
    return TagSequence(scheme, tags)


def _parse_tag(tag: str) -> tuple[str, str | None]:
    if tag == "O":
        return "O", None
    if len(tag) < 3 or tag[1] != "-":
        raise DataError(f"malformed tag {tag!r}")
    return tag[0], tag[2:]


def tags_to_spans(
    tag_seq: TagSequence,
    repair: str = "strict",
    biuol_paper_letters: bool = False,
) -> list[EntitySpan]:
    """Decode a tag sequence back into entity spans.

    ``strict`` raises on the first grammar violation; ``conll`` applies
    the standard repair (a continuation tag with no matching open entity
    starts a new one).
    """
    if repair not in ("strict", "conll"):
        raise ConfigError(f"repair must be 'strict' or 'conll', got {repair!r}")
    scheme = tag_seq.scheme
    unit, last = ("L", "U") if biuol_paper_letters else ("U", "L")

    valid_letters = {"BIO": {"B", "I"}, "BIOUL": {"B", "I", "U", "L"}, "IO": {"I"}}[scheme]
    spans: list[EntitySpan] = []
    open_start: int | None = None
    open_type: str | None = None

    def close(end: int):
        nonlocal open_start, open_type
        if open_start is not None:
            spans.append(EntitySpan(open_start, end, open_type))
            open_start, open_type = None, None

    for idx, tag in enumerate(tag_seq.tags):
        letter, etype = _parse_tag(tag)
        if letter != "O" and letter not in valid_letters:
            raise DataError(f"tag {tag!r} at index {idx} is invalid under {scheme}")

        if letter == "O":
            if scheme == "BIOUL" and open_start is not None and repair == "strict":
                raise DataError(f"entity left open before index {idx}")
            close(idx - 1)
            continue

        if scheme == "IO":
            if open_type == etype:
                continue
            close(idx - 1)
            open_start, open_type = idx, etype
            continue

        if letter == "B":
            if scheme == "BIOUL" and open_start is not None and repair == "strict":
                raise DataError(f"B-{etype} at index {idx} while an entity is open")
            close(idx - 1)
            open_start, open_type = idx, etype
        elif letter == "I":
            if open_type != etype:
                if repair == "strict":
                    raise DataError(f"I-{etype} at index {idx} has no matching begin")
                close(idx - 1)
                open_start, open_type = idx, etype
        elif letter == unit:  # single-word entity
            if scheme == "BIOUL" and open_start is not None and repair == "strict":
                raise DataError(f"{tag} at index {idx} while an entity is open")
            close(idx - 1)
            spans.append(EntitySpan(idx, idx, etype))
        elif letter == last:  # closes the open entity
            if open_type != etype:
                if repair == "strict":
                    raise DataError(f"{tag} at index {idx} has no matching begin")
                close(idx - 1)
                spans.append(EntitySpan(idx, idx, etype))
            else:
                open_start_saved = open_start
                open_start, open_type = None, None
                spans.append(EntitySpan(open_start_saved, idx, etype))

    if open_start is not None:
        if scheme == "BIOUL" and repair == "strict":
            raise DataError("entity left open at end of sequence")
        close(len(tag_seq.tags) - 1)
    return spans


def convert_scheme(
    tag_seq: TagSequence,
    to_scheme: str,
    biuol_paper_letters: bool = False,
) -> tuple[TagSequence, bool]:
    """Re-render tags under another scheme.

    Returns the converted sequence and a flag reporting whether adjacent
    same-type entities were merged (only possible when converting to IO,
    which cannot represent the boundary between them).
    """
    spans = tags_to_spans(tag_seq, repair="strict", biuol_paper_letters=biuol_paper_letters)
    merged = False
    if to_scheme == "IO":
        ordered = sorted(spans)
        merged = any(
            prev.end_word + 1 == cur.start_word and prev.entity_type == cur.entity_type
            for prev, cur in zip(ordered, ordered[1:])
        )
    out = spans_to_tags(
        spans, len(tag_seq.tags), to_scheme, biuol_paper_letters=biuol_paper_letters
    )
    return out, merged


@dataclass
class RelationText:
    """Transformed relation input plus provenance of surviving words."""

    text: str
    source_word_indices: list[int | None]


DUMMIFY = "DUMMIFY"
MARKERS = "MARKERS"
ORIGINAL = "ORIGINAL"


def transform_relation(instance: RelationInstance, mode: str = DUMMIFY) -> RelationText:
    """Rewrite the sentence around the two entity mentions.

    DUMMIFY replaces each mention by a single ``$TYPE`` token, MARKERS
    wraps the mentions in ``<e1>...</e1>`` / ``<e2>...</e2>``, ORIGINAL
    returns the sentence unchanged.
    """
    if mode not in (DUMMIFY, MARKERS, ORIGINAL):
        raise ConfigError(f"unknown relation transform mode {mode!r}")
    words = instance.sentence.split()
    out_words: list[str] = []
    source: list[int | None] = []
    spans = {id(instance.e1): ("<e1>", "</e1>"), id(instance.e2): ("<e2>", "</e2>")}

    w = 0
    while w < len(words):
        span = None
        for cand in (instance.e1, instance.e2):
            if cand.start_word == w:
                span = cand
                break
        if span is None:
            out_words.append(words[w])
            source.append(w)
            w += 1
            continue
        mention = words[span.start_word : span.end_word + 1]
        if mode == DUMMIFY:
            out_words.append(f"${span.entity_type}")
            source.append(None)
        elif mode == MARKERS:
            open_tag, close_tag = spans[id(span)]
            out_words.append(open_tag)
            source.append(None)
            out_words.extend(mention)
            source.extend(range(span.start_word, span.end_word + 1))
            out_words.append(close_tag)
            source.append(None)
        else:
            out_words.extend(mention)
            source.extend(range(span.start_word, span.end_word + 1))
        w = span.end_word + 1
    return RelationText(" ".join(out_words), source)


def relation_reserved_tokens(instance_or_types, mode: str) -> list[str]:
    """Tokens the vocabulary must keep atomic for a transform mode."""
    if mode == MARKERS:
        return ["<e1>", "</e1>", "<e2>", "</e2>"]
    if mode == DUMMIFY:
        if isinstance(instance_or_types, RelationInstance):
            types = [instance_or_types.e1.entity_type, instance_or_types.e2.entity_type]
        else:
            types = list(instance_or_types)
        return [f"${t}" for t in dict.fromkeys(types)]
    return []


@dataclass(frozen=True)
class Mention:
    span: EntitySpan
    text: str | None = None


def expand_negatives(
    sentences: Sequence[tuple[str, Sequence[EntitySpan], Sequence[EntitySpan]]],
    labeled: Sequence[RelationInstance],
    dataset: str = "chemprot",
) -> list[RelationInstance]:
    """Add ``false`` instances for every unlabeled chemical-protein pair.

    ``sentences`` holds (sentence, chemical spans, protein spans); each
    cross-product pair in a sentence that carries no explicit label
    becomes one ``false`` instance. Labeled instances must reference
    mentions present in their sentence.
    """
    by_sentence: dict[str, list[RelationInstance]] = {}
    for inst in labeled:
        by_sentence.setdefault(inst.sentence, []).append(inst)

    known_sentences = {sent for sent, _, _ in sentences}
    for inst in labeled:
        if inst.sentence not in known_sentences:
            raise DataError(f"labeled instance references unknown sentence: {inst.sentence!r}")

    out: list[RelationInstance] = []
    seen: set[tuple[str, EntitySpan, EntitySpan]] = set()
    for sent, chemicals, proteins in sentences:
        mention_spans = set(chemicals) | set(proteins)
        for inst in by_sentence.get(sent, ()):
            for span in (inst.e1, inst.e2):
                if span not in mention_spans:
                    raise DataError(f"labeled instance references unknown mention {span}")
            key = (sent, inst.e1, inst.e2)
            if key not in seen:
                seen.add(key)
                out.append(inst)
        for chem in chemicals:
            for prot in proteins:
                key = (sent, chem, prot)
                if key in seen:
                    continue
                seen.add(key)
                out.append(RelationInstance(sent, chem, prot, "false", dataset=dataset))
    return out


@dataclass
class PreparedExample:
    """Model-ready encoding plus the task's aligned label structure."""

    encoding: Encoding
    piece_labels: list | None = None
    label: object = None
    extra: dict = field(default_factory=dict)


def project_word_labels(
    encoding: Encoding, word_labels: Sequence, n_words: int
) -> list:
    """First piece of a word carries its label; the rest carry the
    ignore sentinel (None), as do special tokens."""
    if len(word_labels) != n_words:
        raise DataError(
            f"{len(word_labels)} labels for {n_words} words"
        )
    out: list = []
    prev_word = None
    for w in encoding.word_index:
        if w == -1:
            out.append(PIECE_LABEL_IGNORE)
        elif w != prev_word:
            out.append(word_labels[w])
            prev_word = w
        else:
            out.append(PIECE_LABEL_IGNORE)
    return out


def recover_word_labels(encoding: Encoding, piece_labels: Sequence) -> dict[int, object]:
    """Inverse of project_word_labels for the words present in the
    encoding (truncation can drop trailing words)."""
    out: dict[int, object] = {}
    for pos, w in enumerate(encoding.word_index):
        if w != -1 and w not in out:
            out[w] = piece_labels[pos]
    return out


def _tokenizer_for(task: str, vocab: Vocabulary, config: TokenizerConfig) -> WordPieceTokenizer:
    max_len = TASK_MAX_LEN.get(task, config.max_seq_len)
    if max_len != config.max_seq_len:
        config = TokenizerConfig(
            casing=config.casing,
            max_word_chars=config.max_word_chars,
            max_seq_len=max_len,
            strip_accents=config.strip_accents,
        )
    return WordPieceTokenizer(vocab, config)


def prepare_task_encoding(
    task: str,
    record: dict,
    vocab: Vocabulary,
    config: TokenizerConfig | None = None,
    relation_mode: str = DUMMIFY,
) -> PreparedExample:
    """Apply a task's input transform and encode at its input budget.

    ``task`` is one of ner, pico, chemprot, ddi, gad, biosses, hoc,
    pubmedqa, bioasq. Record keys follow the task file formats (see the
    module JSONL/CoNLL helpers).
    """
    task = task.lower()
    config = config or TokenizerConfig()

    if task == "ner":
        words = record["words"]
        tags = record["tags"]
        tok = _tokenizer_for(task, vocab, config)
        enc = tok.encode(" ".join(words))
        labels = project_word_labels(enc, tags, len(words))
        return PreparedExample(enc, piece_labels=labels)

    if task == "pico":
        words = record["words"]
        pico: PicoLabels = record["labels"]
        if len(pico) != len(words):
            raise DataError(f"{len(pico)} PICO labels for {len(words)} words")
        tok = _tokenizer_for(task, vocab, config)
        enc = tok.encode(" ".join(words))
        labels = {
            "p": project_word_labels(enc, pico.p, len(words)),
            "i": project_word_labels(enc, pico.i, len(words)),
            "o": project_word_labels(enc, pico.o, len(words)),
        }
        return PreparedExample(enc, piece_labels=None, label=None, extra={"pico": labels})

    if task in ("chemprot", "ddi", "gad"):
        inst = record if isinstance(record, RelationInstance) else relation_from_json(record, task)
        transformed = transform_relation(inst, relation_mode)
        reserved = relation_reserved_tokens(inst, relation_mode)
        task_vocab = vocab.with_reserved(reserved) if reserved else vocab
        tok = _tokenizer_for(task, task_vocab, config)
        enc = tok.encode(transformed.text)
        return PreparedExample(
            enc, label=inst.label, extra={"source_word_indices": transformed.source_word_indices}
        )

    if task == "biosses":
        tok = _tokenizer_for(task, vocab, config)
        enc = tok.encode_pair(record["a"], record["b"])
        return PreparedExample(enc, label=record.get("score"))

    if task == "hoc":
        labels = record["labels"]
        if len(labels) != 10:
            raise DataError(f"HoC records carry 10 binary labels, got {len(labels)}")
        tok = _tokenizer_for(task, vocab, config)
        enc = tok.encode(record["text"])
        return PreparedExample(enc, label=[bool(v) for v in labels])

    if task in ("pubmedqa", "bioasq"):
        tok = _tokenizer_for(task, vocab, config)
        enc = tok.encode_pair(record["question"], record["text"])
        return PreparedExample(enc, label=record.get("label"))

    raise ConfigError(f"unknown task {task!r}")


def relation_from_json(record: dict, dataset: str | None = None) -> RelationInstance:
    def span_of(obj: dict) -> EntitySpan:
        return EntitySpan(int(obj["start"]), int(obj["end"]), str(obj["type"]))

    return RelationInstance(
        sentence=record["text"],
        e1=span_of(record["e1"]),
        e2=span_of(record["e2"]),
        label=str(record["label"]),
        dataset=dataset,
    )


def read_conll(path: str | Path) -> list[tuple[list[str], list[str]]]:
    """CoNLL-style TSV: ``word<TAB>tag`` lines, blank line between
    sentences."""
    sentences: list[tuple[list[str], list[str]]] = []
    words: list[str] = []
    tags: list[str] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                if words:
                    sentences.append((words, tags))
                    words, tags = [], []
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected 'word<TAB>tag'")
            words.append(parts[0])
            tags.append(parts[1])
    if words:
        sentences.append((words, tags))
    return sentences


def write_conll(sentences: Iterable[tuple[Sequence[str], Sequence[str]]], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for words, tags in sentences:
            if len(words) != len(tags):
                raise DataError("word/tag count mismatch")
            for word, tag in zip(words, tags):
                fh.write(f"{word}\t{tag}\n")
            fh.write("\n")


def read_pico_conll(path: str | Path) -> list[tuple[list[str], PicoLabels]]:
    """PICO TSV: ``word<TAB>elements`` where elements is a ``|``-joined
    subset of {P, I, O} or ``-`` for none."""
    out: list[tuple[list[str], PicoLabels]] = []
    for words, tags in read_conll(path):
        p, i, o = [], [], []
        for tag in tags:
            elems = set() if tag == "-" else set(tag.split("|"))
            unknown = elems - {"P", "I", "O"}
            if unknown:
                raise DataError(f"unknown PICO elements {sorted(unknown)}")
            p.append(int("P" in elems))
            i.append(int("I" in elems))
            o.append(int("O" in elems))
        out.append((words, PicoLabels(p, i, o)))
    return out
