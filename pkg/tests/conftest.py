from __future__ import annotations

import json
from pathlib import Path

import pytest

from biotok.corpus import CorpusStats, build_word_frequencies, load_corpus
from biotok.vocab import VocabTrainConfig, Vocabulary, load_vocab, train_bpe

import synthcorpus

FIXTURES = Path(__file__).parent / "fixtures"

TRAIN_CORPUS_SEED = 11
TRAIN_CORPUS_SIZE = 5000
HELDOUT_SEED = 77
HELDOUT_SIZE = 300


@pytest.fixture(scope="session")
def bert_vocab_path() -> Path:
    return FIXTURES / "bert_base_uncased_vocab.txt"


@pytest.fixture(scope="session")
def bert_vocab(bert_vocab_path) -> Vocabulary:
    return load_vocab(bert_vocab_path, casing="uncased")


@pytest.fixture(scope="session")
def table_terms() -> list[str]:
    return (FIXTURES / "biomedical_terms.txt").read_text().split()


@pytest.fixture(scope="session")
def reference_encodings() -> list[dict]:
    return json.loads((FIXTURES / "reference_encodings_100.json").read_text())


@pytest.fixture(scope="session")
def synth_corpus_path(tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("corpus") / "abstracts.txt"
    synthcorpus.write_corpus(path, TRAIN_CORPUS_SIZE, TRAIN_CORPUS_SEED)
    return path


@pytest.fixture(scope="session")
def heldout_records() -> list[dict]:
    lines = synthcorpus.make_corpus_lines(HELDOUT_SIZE, HELDOUT_SEED)
    return [{"id": l.split("\t")[0], "text": l.split("\t", 1)[1]} for l in lines]


@pytest.fixture(scope="session")
def synth_word_freqs(synth_corpus_path) -> dict[str, int]:
    docs = load_corpus(synth_corpus_path, min_words=128, stats=CorpusStats())
    return build_word_frequencies(docs, casing="uncased")


@pytest.fixture(scope="session")
def trained_vocab(synth_word_freqs) -> Vocabulary:
    vocab, _ = train_bpe(synth_word_freqs, VocabTrainConfig(target_size=3000))
    return vocab
