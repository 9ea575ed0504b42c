import json

import pytest

from biotok.errors import ConfigError, DataError
from biotok.rng import Pcg32
from biotok.tokenizer import (
    Encoding,
    TokenizerConfig,
    WordPieceTokenizer,
    decode,
    encode,
    encode_pair,
    normalize,
    pre_tokenize,
    wordpiece_tokenize,
)
from biotok.vocab import SPECIAL_TOKENS, VocabTrainConfig, Vocabulary, shatter, train_bpe

from oracles import random_word_freqs


def _vocab(*extra: str) -> Vocabulary:
    return Vocabulary(tokens=SPECIAL_TOKENS + tuple(extra))


class TestNormalize:
    def test_uncased_lowercases(self):
        assert normalize("Insulin", "uncased") == "insulin"

    def test_cased_is_identity_on_ascii(self):
        assert normalize("DNA", "cased") == "DNA"

    def test_uncased_strips_accents_by_default(self):
        # matches the public reference tokenizer's uncased behavior
        assert normalize("Naïve", "uncased") == "naive"

    def test_strip_accents_flag_keeps_marks(self):
        assert normalize("Naïve", "uncased", strip_accents=False) == "naïve"

    def test_control_chars_removed_whitespace_unified(self):
        assert normalize("a\x00b\tc d", "cased") == "ab c d"

    def test_bad_casing_rejected(self):
        with pytest.raises(ConfigError):
            normalize("x", "mixed")


class TestPreTokenize:
    def test_punctuation_isolation(self):
        assert [w for w, _ in pre_tokenize("a-b c")] == ["a", "-", "b", "c"]

    def test_empty(self):
        assert pre_tokenize("") == []

    def test_hand_split(self):
        words = [w for w, _ in pre_tokenize("type 2 diabetes, insulin.")]
        assert words == ["type", "2", "diabetes", ",", "insulin", "."]

    def test_offsets_cover_non_whitespace_bytes_exactly_once(self):
        text = "naïve a-b,  c"
        raw = text.encode("utf-8")
        covered = bytearray(len(raw))
        for _, (start, end) in pre_tokenize(text):
            for i in range(start, end):
                assert not covered[i]
                covered[i] = 1
        for i, flag in enumerate(covered):
            assert bool(flag) == (raw[i : i + 1] not in (b" ",))


class TestWordpieceTokenize:
    def test_naloxone_four_pieces(self, bert_vocab):
        assert wordpiece_tokenize("naloxone", bert_vocab) == ["na", "##lo", "##xon", "##e"]

    def test_acetyltransferase_seven_pieces(self, bert_vocab):
        assert wordpiece_tokenize("acetyltransferase", bert_vocab) == [
            "ace", "##ty", "##lt", "##ran", "##sf", "##eras", "##e",
        ]

    def test_in_domain_word_stays_whole(self, trained_vocab):
        assert wordpiece_tokenize("insulin", trained_vocab) == ["insulin"]

    def test_unknown_word_maps_to_unk(self):
        vocab = _vocab("a", "##a")
        assert wordpiece_tokenize("ab", vocab) == ["[UNK]"]

    def test_overlong_word_maps_to_unk(self, bert_vocab):
        assert wordpiece_tokenize("a" * 101, bert_vocab) == ["[UNK]"]
        assert wordpiece_tokenize("a" * 100, bert_vocab) != ["[UNK]"]

    def test_empty_word_rejected(self, bert_vocab):
        with pytest.raises(DataError):
            wordpiece_tokenize("", bert_vocab)


class TestEncode:
    def test_empty_text(self, bert_vocab):
        enc = encode("", bert_vocab)
        assert enc.pieces == ["[CLS]", "[SEP]"]
        assert enc.segment_ids == [0, 0]

    def test_forced_truncation(self, bert_vocab):
        config = TokenizerConfig(max_seq_len=4)
        enc = encode("one two three four five six", bert_vocab, config)
        assert len(enc) == 4
        assert enc.pieces[0] == "[CLS]" and enc.pieces[-1] == "[SEP]"
        assert enc.pieces[1:3] == ["one", "two"]

    def test_matches_frozen_reference(self, bert_vocab, reference_encodings):
        tok = WordPieceTokenizer(bert_vocab, TokenizerConfig(max_seq_len=4096))
        mismatches = [
            rec["text"]
            for rec in reference_encodings
            if tok.encode(rec["text"]).ids != rec["ids"]
        ]
        assert mismatches == []

    def test_live_reference_cross_check(self, bert_vocab_path, reference_encodings):
        transformers = pytest.importorskip("transformers")
        tok = transformers.BertTokenizer(str(bert_vocab_path), do_lower_case=True)
        for rec in reference_encodings[:10]:
            pieces = tok.tokenize(rec["text"])
            assert tok.convert_tokens_to_ids(["[CLS]"] + pieces + ["[SEP]"]) == rec["ids"]

    def test_offsets_tile_their_word(self, bert_vocab):
        enc = encode("naloxone reverses overdose.", bert_vocab)
        by_word: dict[int, list[tuple[int, int]]] = {}
        for w, span in zip(enc.word_index, enc.offsets):
            if w != -1:
                by_word.setdefault(w, []).append(span)
        raw = enc.text.encode("utf-8")
        words = enc.text.split()
        for w, spans in by_word.items():
            assert all(a[1] == b[0] for a, b in zip(spans, spans[1:]))
            assert raw[spans[0][0] : spans[-1][1]].decode("utf-8") == words[w]

    def test_continuation_prefix_structure(self, bert_vocab):
        enc = encode("naloxone", bert_vocab)
        flags = [p.startswith("##") for p in enc.pieces[1:-1]]
        assert flags == [False, True, True, True]


class TestEncodePair:
    def test_both_empty(self, bert_vocab):
        enc = encode_pair("", "", bert_vocab)
        assert enc.pieces == ["[CLS]", "[SEP]", "[SEP]"]
        assert enc.segment_ids == [0, 0, 1]

    def test_qa_budget_exact(self, bert_vocab):
        config = TokenizerConfig(max_seq_len=512)
        question = " ".join(["what"] * 100)
        text = " ".join(["finding"] * 500)
        enc = encode_pair(question, text, bert_vocab, config)
        assert len(enc) == 512

    def test_longest_first_truncation(self, bert_vocab):
        # 3-piece a, 9-piece b, budget 10 - 3 specials = 7 -> b keeps 4
        config = TokenizerConfig(max_seq_len=10)
        enc = encode_pair("one two three", " ".join(["word"] * 9), bert_vocab, config)
        a_len = enc.segment_ids.index(1) - 2  # pieces before first [SEP]
        b_len = len(enc) - a_len - 3
        assert (a_len, b_len) == (3, 4)
        assert len(enc) == 10

    def test_tie_trims_second_segment(self, bert_vocab):
        # budget 6: tie drops from b, then a is longer, then done -> (3, 3)
        config = TokenizerConfig(max_seq_len=9)
        enc = encode_pair("a b c d", "w x y z", bert_vocab, config)
        a_len = enc.segment_ids.index(1) - 2
        b_len = len(enc) - a_len - 3
        assert (a_len, b_len) == (3, 3)

    def test_segments_and_word_index(self, bert_vocab):
        enc = encode_pair("insulin works", "glucose falls", bert_vocab)
        sep1 = enc.pieces.index("[SEP]")
        assert all(s == 0 for s in enc.segment_ids[: sep1 + 1])
        assert all(s == 1 for s in enc.segment_ids[sep1 + 1 :])
        words = [w for w in enc.word_index if w != -1]
        assert words == sorted(words)


class TestDecode:
    def test_join_rule(self, bert_vocab):
        ids = [bert_vocab.token_to_id[p] for p in
               ["[CLS]", "na", "##lo", "##xon", "##e", "[SEP]"]]
        assert decode(ids, bert_vocab) == "naloxone"

    def test_specials_only(self, bert_vocab):
        assert decode([bert_vocab.cls_id, bert_vocab.sep_id], bert_vocab) == ""

    def test_unknown_id_rejected(self, bert_vocab):
        with pytest.raises(DataError):
            decode([len(bert_vocab)], bert_vocab)

    def test_round_trip_on_heldout_sentences(self, trained_vocab, heldout_records):
        tok = WordPieceTokenizer(trained_vocab, TokenizerConfig(max_seq_len=4096))
        from biotok.tokenizer import normalize as norm

        checked = 0
        for record in heldout_records[:100]:
            text = " ".join(record["text"].split()[:40])
            enc = tok.encode(text)
            if "[UNK]" in enc.pieces:
                continue
            normalized = " ".join(w for w, _ in pre_tokenize(norm(text, "uncased")))
            assert decode(enc.ids, trained_vocab) == normalized
            checked += 1
        assert checked >= 90


class TestFragmentationMonotonicity:
    def test_nested_training_growth_never_fragments_more(self):
        rng = Pcg32(808, 3)
        for _ in range(30):
            freqs = random_word_freqs(rng)
            floor = len(SPECIAL_TOKENS) + len(shatter(freqs)[1])
            small, _ = train_bpe(freqs, VocabTrainConfig(target_size=floor + 4, min_pair_frequency=1))
            big, _ = train_bpe(freqs, VocabTrainConfig(target_size=floor + 18, min_pair_frequency=1))
            assert big.tokens[: len(small.tokens)] == small.tokens
            for word in freqs:
                assert len(wordpiece_tokenize(word, big)) <= len(
                    wordpiece_tokenize(word, small)
                )

    def test_adversarial_addition_can_fragment_more(self):
        # Greedy longest-match is not monotone under arbitrary token
        # addition: a longer first match can strand the tail. Pinned so
        # the boundary of the growth property above stays documented.
        base = _vocab("ab", "##cde", "##f", "a", "b", "c", "d", "e", "f",
                      "##a", "##b", "##c", "##d", "##e")
        grown = Vocabulary(tokens=base.tokens + ("abc",))
        assert wordpiece_tokenize("abcdef", base) == ["ab", "##cde", "##f"]
        assert wordpiece_tokenize("abcdef", grown) == ["abc", "##d", "##e", "##f"]


class TestReservedTokens:
    def test_reserved_token_survives_uncased_pipeline(self, bert_vocab):
        vocab = bert_vocab.with_reserved(["$CHEMICAL", "<e1>", "</e1>"])
        tok = WordPieceTokenizer(vocab)
        assert tok.tokenize("$CHEMICAL inhibits <e1> it </e1>")[:1] == ["$CHEMICAL"]
        assert "<e1>" in tok.tokenize("<e1> aspirin </e1>")

    def test_unreserved_marker_shatters(self, bert_vocab):
        tok = WordPieceTokenizer(bert_vocab)
        assert tok.tokenize("<e1>") == ["<", "e", "##1", ">"]


class TestConfig:
    def test_max_seq_len_floor(self):
        with pytest.raises(ConfigError):
            TokenizerConfig(max_seq_len=2)

    def test_casing_defaults_to_vocab(self, bert_vocab):
        tok = WordPieceTokenizer(bert_vocab)
        assert tok.casing == "uncased"
