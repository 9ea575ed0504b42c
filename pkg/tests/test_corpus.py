import json
import logging
from collections import Counter
from pathlib import Path

import pytest

from biotok.corpus import (
    CorpusStats,
    build_word_frequencies,
    load_corpus,
    load_word_frequencies,
    save_word_frequencies,
    split_sentences,
)

FIXTURES = Path(__file__).parent / "fixtures"


def _write_corpus(tmp_path, lines, name="corpus.txt"):
    path = tmp_path / name
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return path


def _doc_of_n_words(n):
    return " ".join(f"w{i}" for i in range(n))


class TestLoadCorpus:
    def test_127_word_abstract_skipped_at_128(self, tmp_path):
        path = _write_corpus(tmp_path, [_doc_of_n_words(127), _doc_of_n_words(128)])
        stats = CorpusStats()
        docs = list(load_corpus(path, min_words=128, stats=stats))
        assert len(docs) == 1
        assert docs[0].word_count == 128
        assert stats.skipped_short == 1

    def test_empty_file_yields_empty_stream(self, tmp_path):
        path = _write_corpus(tmp_path, [])
        stats = CorpusStats()
        assert list(load_corpus(path, min_words=0, stats=stats)) == []
        assert stats.emitted == 0

    def test_word_count_filter_matches_independent_split(self, tmp_path):
        sizes = [2, 3, 4, 128, 1]
        lines = [_doc_of_n_words(n) for n in sizes]
        path = _write_corpus(tmp_path, lines)
        docs = list(load_corpus(path, min_words=3))
        # independent oracle: plain whitespace split per record
        expected = [line for line in lines if len(line.split()) >= 3]
        assert len(docs) == len(expected) == 3
        assert [d.word_count for d in docs] == [len(e.split()) for e in expected]

    def test_id_prefix_parsed(self, tmp_path):
        path = _write_corpus(tmp_path, ["PMID7\tInsulin works. It helps."])
        (doc,) = load_corpus(path)
        assert doc.id == "PMID7"
        assert len(doc.sentences) == 2

    def test_malformed_record_warns_and_skips(self, tmp_path, caplog):
        path = _write_corpus(tmp_path, ["id-only\t", "good doc here"])
        stats = CorpusStats()
        with caplog.at_level(logging.WARNING, logger="biotok.corpus"):
            docs = list(load_corpus(path, stats=stats))
        assert len(docs) == 1
        assert stats.skipped_malformed == 1
        assert any(":1:" in rec.message for rec in caplog.records)

    def test_missing_file_raises(self, tmp_path):
        with pytest.raises(OSError):
            list(load_corpus(tmp_path / "nope.txt"))

    def test_filter_monotonicity(self, tmp_path):
        lines = [_doc_of_n_words(n) for n in (1, 5, 9, 13, 50, 128, 2, 7)]
        path = _write_corpus(tmp_path, lines)
        counts = [
            sum(1 for _ in load_corpus(path, min_words=m)) for m in range(0, 140, 10)
        ]
        assert counts == sorted(counts, reverse=True)

    def test_determinism(self, tmp_path):
        lines = ["alpha beta. Gamma delta.", "x\tShort one here."]
        path = _write_corpus(tmp_path, lines)
        a = [(d.id, d.word_count, tuple(s.text for s in d.sentences)) for d in load_corpus(path)]
        b = [(d.id, d.word_count, tuple(s.text for s in d.sentences)) for d in load_corpus(path)]
        assert a == b

    def test_word_count_equals_sentence_sum(self, tmp_path):
        text = "Insulin lowers glucose. Glucagon raises it. Fin."
        path = _write_corpus(tmp_path, [text])
        (doc,) = load_corpus(path)
        assert doc.word_count == sum(len(s.text.split()) for s in doc.sentences)
        assert doc.word_count == len(text.split())


class TestSplitSentences:
    def test_two_terminal_periods(self):
        assert [s.text for s in split_sentences("A b. C d.")] == ["A b.", "C d."]

    def test_empty(self):
        assert split_sentences("") == []

    def test_abbreviation_protection(self):
        got = [s.text for s in split_sentences("E. coli grows. It divides.")]
        assert got == ["E. coli grows.", "It divides."]

    def test_hand_segmented_fixture(self):
        cases = json.loads((FIXTURES / "sentence_segmentation_50.json").read_text())
        assert len(cases) == 50
        failures = []
        for case in cases:
            got = [s.text for s in split_sentences(case["text"])]
            if got != case["sentences"]:
                failures.append((case["text"], got, case["sentences"]))
        assert not failures, failures

    def test_offsets_reconstruct_input(self):
        cases = json.loads((FIXTURES / "sentence_segmentation_50.json").read_text())
        for case in cases:
            text = case["text"]
            raw = text.encode("utf-8")
            sentences = split_sentences(text)
            cursor = 0
            for s in sentences:
                start, end = s.byte_offsets
                assert raw[start:end].decode("utf-8") == s.text
                assert raw[cursor:start].strip() == b""
                cursor = end
            assert raw[cursor:].strip() == b""

    def test_no_empty_sentences(self):
        for text in ("...", "a.  b.", " . ", "Hi.  "):
            assert all(s.text for s in split_sentences(text))


class TestWordFrequencies:
    def _docs(self, tmp_path, lines):
        path = _write_corpus(tmp_path, lines)
        return list(load_corpus(path))

    def test_uncased_folds(self, tmp_path):
        docs = self._docs(tmp_path, ["Insulin insulin"])
        assert build_word_frequencies(docs, casing="uncased") == {"insulin": 2}

    def test_cased_keeps_case(self, tmp_path):
        docs = self._docs(tmp_path, ["Insulin insulin"])
        freqs = build_word_frequencies(docs, casing="cased")
        assert freqs == {"Insulin": 1, "insulin": 1}

    def test_three_document_fixture_matches_shell_style_oracle(self, tmp_path):
        lines = [
            "insulin lowers glucose glucose",
            "glucose rises after meals meals meals",
            "insulin insulin therapy works",
        ]
        docs = self._docs(tmp_path, lines)
        freqs = build_word_frequencies(docs, casing="uncased")
        # oracle: lowercase + whitespace split + count, per record
        oracle = Counter(w for line in lines for w in line.lower().split())
        assert freqs == dict(oracle)

    def test_frequency_conservation(self, tmp_path):
        from biotok.tokenizer import normalize, pre_tokenize

        lines = ["Insulin, glucose rise. Fast!", "x\tA second (short) doc."]
        docs = self._docs(tmp_path, lines)
        freqs = build_word_frequencies(docs, casing="uncased")
        pretoken_total = sum(
            len(pre_tokenize(normalize(s.text, "uncased"))) for d in docs for s in d.sentences
        )
        assert sum(freqs.values()) == pretoken_total

    def test_punctuation_becomes_standalone_words(self, tmp_path):
        docs = self._docs(tmp_path, ["type 2 diabetes, insulin."])
        freqs = build_word_frequencies(docs, casing="uncased")
        assert freqs == {"type": 1, "2": 1, "diabetes": 1, ",": 1, "insulin": 1, ".": 1}

    def test_save_load_round_trip_sorted(self, tmp_path):
        freqs = {"b": 3, "a": 3, "zz": 10, "q": 1}
        path = tmp_path / "freqs.tsv"
        save_word_frequencies(freqs, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "zz\t10"
        assert lines[1] == "a\t3"  # count ties sort by word
        assert load_word_frequencies(path) == freqs
