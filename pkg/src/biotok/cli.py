"""Command-line front end.

Every subcommand is a pure function of its input files, flags and seed:
repeated runs produce byte-identical outputs. Stochastic subcommands
(mask, nsp) require an explicit --seed. File outputs are written to a
temp file and renamed into place, and each output gets a
``<output>.config.json`` echo of the resolved run configuration.

Exit codes: 0 success, 1 usage/configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import __version__, analysis, corpus, metrics, pretrain, taskprep, vocab as vocab_mod
from .errors import ConfigError, DataError
from .tokenizer import TokenizerConfig, WordPieceTokenizer


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _atomic_write(path: Path, write_fn, binary: bool = False) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        mode = "wb" if binary else "w"
        kwargs = {} if binary else {"encoding": "utf-8", "newline": "\n"}
        with os.fdopen(fd, mode, **kwargs) as fh:
            write_fn(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _echo_config(output: Path, args: argparse.Namespace) -> None:
    resolved = {k: str(v) if isinstance(v, Path) else v for k, v in vars(args).items() if k != "func"}
    resolved["toolkit_version"] = __version__
    _atomic_write(
        Path(str(output) + ".config.json"),
        lambda fh: fh.write(json.dumps(resolved, indent=2, sort_keys=True) + "\n"),
    )


def _load_vocab(args) -> vocab_mod.Vocabulary:
    return vocab_mod.load_vocab(args.vocab, casing=args.casing)


def _tokenizer_config(args) -> TokenizerConfig:
    return TokenizerConfig(casing=args.casing, max_seq_len=args.max_seq_len)


def cmd_train_vocab(args) -> int:
    stats = corpus.CorpusStats()
    docs = corpus.load_corpus(args.corpus, min_words=args.min_words, stats=stats)
    freqs = corpus.build_word_frequencies(docs, casing=args.casing)
    if not freqs:
        raise DataError("corpus produced an empty word frequency table")
    config = vocab_mod.VocabTrainConfig(
        target_size=args.size,
        min_pair_frequency=args.min_pair_frequency,
        scorer=args.scorer,
        casing=args.casing,
    )
    trainer = vocab_mod.train_bpe if args.scorer == "frequency" else vocab_mod.train_wordpiece
    voc, history = trainer(freqs, config)

    out_vocab = Path(args.out_vocab)
    _atomic_write(out_vocab, lambda fh: [fh.write(t + "\n") for t in voc.tokens])
    if args.out_merges:
        _atomic_write(
            Path(args.out_merges),
            lambda fh: [fh.write(f"{m.left}\t{m.right}\t{m.score!r}\n") for m in history],
        )
    _echo_config(out_vocab, args)
    print(
        f"corpus: {stats.summary()}\n"
        f"distinct words: {len(freqs)}, total words: {sum(freqs.values())}\n"
        f"merges performed: {len(history)}, final vocabulary size: {len(voc)}"
    )
    return 0


def _iter_jsonl(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON: {exc}") from exc


def cmd_tokenize(args) -> int:
    voc = _load_vocab(args)
    tok = WordPieceTokenizer(voc, _tokenizer_config(args))
    rows = []
    for lineno, record in _iter_jsonl(args.input):
        if "text" in record:
            enc = tok.encode(record["text"])
        elif "a" in record and "b" in record:
            enc = tok.encode_pair(record["a"], record["b"])
        else:
            raise DataError(f"{args.input}:{lineno}: record needs 'text' or 'a'+'b'")
        rows.append(
            {
                "id": record.get("id", str(lineno)),
                "pieces": enc.pieces,
                "ids": enc.ids,
                "segments": enc.segment_ids,
                "word_index": enc.word_index,
            }
        )
    out = Path(args.output)
    _atomic_write(out, lambda fh: [fh.write(json.dumps(r, ensure_ascii=False) + "\n") for r in rows])
    _echo_config(out, args)
    return 0


def _word_index_from(record: dict, lineno: int, prefix: str = "##") -> list[int]:
    if "word_index" in record:
        return record["word_index"]
    pieces = record.get("pieces")
    if pieces is None:
        raise DataError(f"record {lineno}: need 'word_index' or 'pieces' for masking")
    word_index = []
    word = -1
    for piece in pieces:
        if piece in vocab_mod.SPECIAL_TOKENS:
            word_index.append(-1)
        elif piece.startswith(prefix):
            word_index.append(max(word, 0))
        else:
            word += 1
            word_index.append(word)
    return word_index


def cmd_mask(args) -> int:
    from .tokenizer import Encoding

    voc = _load_vocab(args)
    examples = []
    for ordinal, (lineno, record) in enumerate(_iter_jsonl(args.input)):
        ids = record["ids"]
        word_index = _word_index_from(record, lineno, voc.continuation_prefix)
        segments = record.get("segments", [0] * len(ids))
        enc = Encoding(
            pieces=[voc.tokens[i] for i in ids],
            ids=ids,
            word_index=word_index,
            segment_ids=segments,
            offsets=[(0, 0)] * len(ids),
            text="",
        )
        examples.append(
            pretrain.make_masked_example(
                enc, args.rate, args.wwm, args.seed, ordinal, voc,
                is_next=record.get("is_next"),
            )
        )
    out = Path(args.output)
    if args.format == "binary":
        _atomic_write(out, lambda fh: pretrain.write_examples_binary(examples, fh), binary=True)
    else:
        _atomic_write(out, lambda fh: [fh.write(ex.to_json() + "\n") for ex in examples])
    _echo_config(out, args)
    return 0


def cmd_nsp(args) -> int:
    stats = corpus.CorpusStats()
    docs = list(corpus.load_corpus(args.corpus, min_words=args.min_words, stats=stats))
    pairs = pretrain.build_nsp_pairs(docs, args.seed, false_fraction=args.false_fraction)
    out = Path(args.output)
    _atomic_write(
        out,
        lambda fh: [
            fh.write(
                json.dumps(
                    {
                        "first": p.first,
                        "second": p.second,
                        "is_next": p.is_next,
                        "first_doc": p.first_doc,
                        "second_doc": p.second_doc,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
            for p in pairs
        ],
    )
    _echo_config(out, args)
    print(f"{len(pairs)} pairs from {stats.emitted} documents")
    return 0


def cmd_prep(args) -> int:
    voc = _load_vocab(args)
    config = _tokenizer_config(args)
    rows = []
    if args.task in ("ner", "pico"):
        if args.task == "ner":
            sentences = taskprep.read_conll(args.input)
            for idx, (words, tags) in enumerate(sentences):
                if args.scheme != "BIO":
                    converted, _ = taskprep.convert_scheme(
                        taskprep.TagSequence("BIO", tags), args.scheme
                    )
                    tags = converted.tags
                ex = taskprep.prepare_task_encoding(
                    "ner", {"words": words, "tags": tags}, voc, config
                )
                rows.append(
                    {
                        "id": str(idx),
                        "ids": ex.encoding.ids,
                        "pieces": ex.encoding.pieces,
                        "segments": ex.encoding.segment_ids,
                        "word_index": ex.encoding.word_index,
                        "piece_labels": ex.piece_labels,
                    }
                )
        else:
            for idx, (words, pico) in enumerate(taskprep.read_pico_conll(args.input)):
                ex = taskprep.prepare_task_encoding(
                    "pico", {"words": words, "labels": pico}, voc, config
                )
                rows.append(
                    {
                        "id": str(idx),
                        "ids": ex.encoding.ids,
                        "segments": ex.encoding.segment_ids,
                        "word_index": ex.encoding.word_index,
                        "piece_labels": ex.extra["pico"],
                    }
                )
    else:
        records = [record for _, record in _iter_jsonl(args.input)]
        if args.task in ("chemprot", "ddi", "gad"):
            # extend the vocabulary once for the whole file so reserved
            # token ids are consistent across records
            if args.relation_mode == taskprep.DUMMIFY:
                types = sorted(
                    {record["e1"]["type"] for record in records}
                    | {record["e2"]["type"] for record in records}
                )
                reserved = taskprep.relation_reserved_tokens(types, args.relation_mode)
            else:
                reserved = taskprep.relation_reserved_tokens([], args.relation_mode)
            if reserved:
                extended = voc.with_reserved(reserved)
                if len(extended) != len(voc):
                    _atomic_write(
                        Path(str(args.output) + ".vocab.txt"),
                        lambda fh: [fh.write(t + "\n") for t in extended.tokens],
                    )
                voc = extended
        for lineno, record in enumerate(records, start=1):
            ex = taskprep.prepare_task_encoding(
                args.task, record, voc, config, relation_mode=args.relation_mode
            )
            rows.append(
                {
                    "id": record.get("id", str(lineno)),
                    "ids": ex.encoding.ids,
                    "segments": ex.encoding.segment_ids,
                    "word_index": ex.encoding.word_index,
                    "label": ex.label,
                }
            )
    out = Path(args.output)
    _atomic_write(out, lambda fh: [fh.write(json.dumps(r, ensure_ascii=False) + "\n") for r in rows])
    _echo_config(out, args)
    return 0


def cmd_score(args) -> int:
    if args.what == "blurb":
        with open(args.scores, "r", encoding="utf-8") as fh:
            per_dataset = json.load(fh)
        result = metrics.blurb_score(per_dataset)
        if args.output:
            out = Path(args.output)
            _atomic_write(out, lambda fh: fh.write(json.dumps(result.to_dict(), indent=2) + "\n"))
            _echo_config(out, args)
        for task, value in result.per_task_avg.items():
            print(f"{task}: {value:.2f}")
        print(f"BLURB score: {result.score_rounded:.2f}")
        return 0

    gold, pred = [], []
    for _, record in _iter_jsonl(args.predictions):
        gold.append(record["label"])
        pred.append(record["pred"])
    if args.what == "accuracy":
        report = metrics.accuracy(gold, pred)
    elif args.what == "pearson":
        report = metrics.pearson([float(g) for g in gold], [float(p) for p in pred])
    elif args.what == "micro-f1":
        report = metrics.micro_f1(gold, pred, negative_label=args.negative_label)
    else:
        raise ConfigError(f"unknown score target {args.what!r}")
    print(json.dumps(report.to_dict()))
    return 0


def _read_terms(path: str) -> list[str]:
    with open(path, "r", encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]


def cmd_analyze(args) -> int:
    voc = _load_vocab(args)
    result: dict = {}
    if args.terms:
        result["fragmentation"] = analysis.fragmentation_report(
            voc, _read_terms(args.terms), vocab_id=str(args.vocab)
        ).to_dict()
    if args.records:
        records = [record for _, record in _iter_jsonl(args.records)]
        result["length"] = analysis.avg_length(
            voc, records, task=args.task, corpus_id=str(args.records), vocab_id=str(args.vocab)
        ).to_dict()
    if not result:
        raise ConfigError("analyze needs --terms and/or --records")
    out = Path(args.output)
    _atomic_write(out, lambda fh: fh.write(json.dumps(result, indent=2, ensure_ascii=False) + "\n"))
    if args.csv:
        if "fragmentation" not in result:
            raise ConfigError("--csv requires --terms")
        rows = result["fragmentation"]["terms"]
        _atomic_write(
            Path(args.csv),
            lambda fh: fh.write(
                "term,piece_count,whole,pieces\n"
                + "".join(
                    f"{r['term']},{r['piece_count']},{int(r['whole'])},{' '.join(r['pieces'])}\n"
                    for r in rows
                )
            ),
        )
    _echo_config(out, args)
    print(json.dumps(result, indent=2, ensure_ascii=False))
    return 0


def cmd_compare_vocabs(args) -> int:
    voc_a = vocab_mod.load_vocab(args.vocab_a, casing=args.casing)
    voc_b = vocab_mod.load_vocab(args.vocab_b, casing=args.casing)
    records = None
    if args.records:
        records = [record for _, record in _iter_jsonl(args.records)]
    comparison = analysis.compare_vocabs(
        voc_a,
        voc_b,
        _read_terms(args.terms),
        records=records,
        task=args.task,
        ids=(str(args.vocab_a), str(args.vocab_b)),
    )
    out = Path(args.output)
    _atomic_write(
        out, lambda fh: fh.write(json.dumps(comparison.to_dict(), indent=2, ensure_ascii=False) + "\n")
    )
    _echo_config(out, args)
    print(comparison.table())
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="biotok", description=__doc__)
    parser.add_argument("--version", action="version", version=f"biotok {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-vocab", help="train a subword vocabulary from a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--scorer", choices=["frequency", "unigram_likelihood"], default="frequency")
    p.add_argument("--casing", choices=["cased", "uncased"], default="uncased")
    p.add_argument("--min-pair-frequency", type=int, default=2)
    p.add_argument("--min-words", type=int, default=0)
    p.add_argument("--out-vocab", required=True)
    p.add_argument("--out-merges")
    p.add_argument("--workers", type=int, default=1, help="parallelism bound; never affects output")
    p.set_defaults(func=cmd_train_vocab)

    p = sub.add_parser("tokenize", help="encode JSONL text records")
    p.add_argument("--vocab", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--casing", choices=["cased", "uncased"], default="uncased")
    p.add_argument("--max-seq-len", type=int, default=512)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("mask", help="generate masked-LM examples from tokenized records")
    p.add_argument("--vocab", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--rate", type=float, default=0.15)
    p.add_argument("--wwm", action="store_true")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--casing", choices=["cased", "uncased"], default="uncased")
    p.add_argument("--format", choices=["jsonl", "binary"], default="jsonl")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("nsp", help="build next-sentence-prediction pairs")
    p.add_argument("--corpus", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--false-fraction", type=float, default=0.5)
    p.add_argument("--min-words", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_nsp)

    p = sub.add_parser("prep", help="prepare task records for the encoder")
    p.add_argument("--task", required=True,
                   choices=["ner", "pico", "chemprot", "ddi", "gad", "biosses", "hoc", "pubmedqa", "bioasq"])
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--scheme", choices=list(taskprep.SCHEMES), default="BIO")
    p.add_argument("--relation-mode", choices=[taskprep.DUMMIFY, taskprep.MARKERS, taskprep.ORIGINAL],
                   default=taskprep.DUMMIFY)
    p.add_argument("--casing", choices=["cased", "uncased"], default="uncased")
    p.add_argument("--max-seq-len", type=int, default=512)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_prep)

    p = sub.add_parser("score", help="compute evaluation metrics")
    p.add_argument("what", choices=["blurb", "accuracy", "pearson", "micro-f1"])
    p.add_argument("--scores", help="JSON file of per-dataset scores (blurb)")
    p.add_argument("--predictions", help="JSONL with 'label' and 'pred' keys")
    p.add_argument("--negative-label", default=None)
    p.add_argument("--output")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("analyze", help="fragmentation / length reports for one vocabulary")
    p.add_argument("--vocab", required=True)
    p.add_argument("--terms")
    p.add_argument("--records")
    p.add_argument("--task", default="hoc")
    p.add_argument("--casing", choices=["cased", "uncased"], default="uncased")
    p.add_argument("--output", required=True)
    p.add_argument("--csv", help="also write the per-term fragmentation table as CSV")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare-vocabs", help="side-by-side vocabulary comparison")
    p.add_argument("--vocab-a", required=True)
    p.add_argument("--vocab-b", required=True)
    p.add_argument("--terms", required=True)
    p.add_argument("--records")
    p.add_argument("--task", default="hoc")
    p.add_argument("--casing", choices=["cased", "uncased"], default="uncased")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_compare_vocabs)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "score" and args.what == "blurb" and not args.scores:
        parser.error("score blurb requires --scores")
    if args.command == "score" and args.what != "blurb" and not args.predictions:
        parser.error(f"score {args.what} requires --predictions")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
