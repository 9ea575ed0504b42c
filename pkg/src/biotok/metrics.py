"""Evaluation metrics for the six task types and the benchmark summary.

All metrics run in double precision; display rounding (two decimals for
the benchmark score) happens only at serialization. F1 uses the 0/0 -> 0
convention and flags such reports as degenerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import DataError
from .taskprep import EntitySpan, PicoLabels

# The thirteen benchmark datasets grouped by task type; the summary
# score is the macro average of the per-task means.
TASK_GROUPS: dict[str, tuple[str, ...]] = {
    "ner": ("BC5-chem", "BC5-disease", "NCBI-disease", "BC2GM", "JNLPBA"),
    "pico": ("EBM PICO",),
    "relation_extraction": ("ChemProt", "DDI", "GAD"),
    "sentence_similarity": ("BIOSSES",),
    "document_classification": ("HoC",),
    "question_answering": ("PubMedQA", "BioASQ"),
}

ALL_DATASETS = tuple(name for names in TASK_GROUPS.values() for name in names)

_CANONICAL = {name.lower().replace(" ", "-").replace("_", "-"): name for name in ALL_DATASETS}


def canonical_dataset(name: str) -> str:
    key = name.strip().lower().replace(" ", "-").replace("_", "-")
    if key not in _CANONICAL:
        raise DataError(f"unknown benchmark dataset {name!r}")
    return _CANONICAL[key]


@dataclass
class MetricReport:
    metric_name: str
    value: float
    support: dict[str, float] = field(default_factory=dict)
    dataset: str | None = None
    degenerate: bool = False

    def to_dict(self) -> dict:
        out = {"metric": self.metric_name, "value": self.value, "support": self.support}
        if self.dataset:
            out["dataset"] = self.dataset
        if self.degenerate:
            out["degenerate"] = True
        return out


def _f1(tp: int, fp: int, fn: int) -> tuple[float, float, float, bool]:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    if precision + recall == 0.0:
        return 0.0, precision, recall, True
    return 2 * precision * recall / (precision + recall), precision, recall, False


def entity_f1(
    gold: Sequence[EntitySpan], pred: Sequence[EntitySpan], dataset: str | None = None
) -> MetricReport:
    """Exact-match span F1: a prediction counts iff (start, end, type)
    all agree with a gold span."""
    gold_set, pred_set = set(gold), set(pred)
    tp = len(gold_set & pred_set)
    fp = len(pred_set) - tp
    fn = len(gold_set) - tp
    value, precision, recall, degenerate = _f1(tp, fp, fn)
    return MetricReport(
        "entity_f1",
        value,
        {"tp": tp, "fp": fp, "fn": fn, "precision": precision, "recall": recall},
        dataset,
        degenerate,
    )


def entity_f1_dataset(
    gold: Sequence[Sequence[EntitySpan]],
    pred: Sequence[Sequence[EntitySpan]],
    dataset: str | None = None,
) -> MetricReport:
    """Span F1 pooled over sentences."""
    if len(gold) != len(pred):
        raise DataError("gold and pred have different sentence counts")
    tp = fp = fn = 0
    for g, p in zip(gold, pred):
        g_set, p_set = set(g), set(p)
        inter = len(g_set & p_set)
        tp += inter
        fp += len(p_set) - inter
        fn += len(g_set) - inter
    value, precision, recall, degenerate = _f1(tp, fp, fn)
    return MetricReport(
        "entity_f1",
        value,
        {"tp": tp, "fp": fp, "fn": fn, "precision": precision, "recall": recall},
        dataset,
        degenerate,
    )


def word_macro_f1_pico(
    gold: Sequence[PicoLabels], pred: Sequence[PicoLabels], dataset: str | None = None
) -> MetricReport:
    """Word-level binary F1 per P/I/O element, averaged over elements."""
    if len(gold) != len(pred):
        raise DataError("gold and pred have different abstract counts")
    counts = {elem: [0, 0, 0] for elem in ("p", "i", "o")}  # tp, fp, fn
    for g, p in zip(gold, pred):
        if len(g) != len(p):
            raise DataError("gold/pred word counts differ within an abstract")
        for elem in ("p", "i", "o"):
            for gv, pv in zip(getattr(g, elem), getattr(p, elem)):
                if gv and pv:
                    counts[elem][0] += 1
                elif pv:
                    counts[elem][1] += 1
                elif gv:
                    counts[elem][2] += 1
    per_element = {}
    degenerate = False
    for elem, (tp, fp, fn) in counts.items():
        value, _, _, deg = _f1(tp, fp, fn)
        per_element[elem] = value
        degenerate |= deg
    value = sum(per_element.values()) / 3.0
    support = {f"f1_{k}": v for k, v in per_element.items()}
    return MetricReport("word_macro_f1", value, support, dataset, degenerate)


def micro_f1(
    gold: Sequence, pred: Sequence, negative_label=None, dataset: str | None = None
) -> MetricReport:
    """Micro-averaged F1 with tp/fp/fn pooled over classes.

    When ``negative_label`` is given, that class contributes no tp and
    predictions/golds of it count only through the other classes'
    fp/fn (the shared-task convention for relation extraction).
    """
    if len(gold) != len(pred):
        raise DataError("gold and pred have different lengths")
    tp = fp = fn = 0
    for g, p in zip(gold, pred):
        if g == p:
            if g != negative_label:
                tp += 1
        else:
            if p != negative_label:
                fp += 1
            if g != negative_label:
                fn += 1
    value, precision, recall, degenerate = _f1(tp, fp, fn)
    return MetricReport(
        "micro_f1",
        value,
        {"tp": tp, "fp": fp, "fn": fn, "precision": precision, "recall": recall},
        dataset,
        degenerate,
    )


def hoc_micro_f1(
    gold: Sequence[Sequence[bool]], pred: Sequence[Sequence[bool]], dataset: str | None = "HoC"
) -> MetricReport:
    """Abstract-level micro F1 pooled over the ten binary hallmark labels."""
    flat_gold: list[int] = []
    flat_pred: list[int] = []
    for g, p in zip(gold, pred):
        if len(g) != len(p):
            raise DataError("gold/pred label vectors differ in length")
        flat_gold.extend(int(v) for v in g)
        flat_pred.extend(int(v) for v in p)
    if len(gold) != len(pred):
        raise DataError("gold and pred have different abstract counts")
    return micro_f1(flat_gold, flat_pred, negative_label=0, dataset=dataset)


def pearson(x: Sequence[float], y: Sequence[float], dataset: str | None = None) -> MetricReport:
    """Sample Pearson correlation coefficient."""
    if len(x) != len(y):
        raise DataError("x and y have different lengths")
    n = len(x)
    if n < 2:
        raise DataError("pearson needs at least 2 points")
    mean_x = math.fsum(x) / n
    mean_y = math.fsum(y) / n
    dx = [v - mean_x for v in x]
    dy = [v - mean_y for v in y]
    var_x = math.fsum(d * d for d in dx)
    var_y = math.fsum(d * d for d in dy)
    if var_x == 0.0 or var_y == 0.0:
        raise DataError("pearson is undefined for zero-variance input")
    cov = math.fsum(a * b for a, b in zip(dx, dy))
    return MetricReport("pearson", cov / math.sqrt(var_x * var_y), {"n": n}, dataset)


def accuracy(gold: Sequence, pred: Sequence, dataset: str | None = None) -> MetricReport:
    if len(gold) != len(pred):
        raise DataError("gold and pred have different lengths")
    if not gold:
        raise DataError("accuracy is undefined on empty input")
    correct = sum(1 for g, p in zip(gold, pred) if g == p)
    return MetricReport("accuracy", correct / len(gold), {"n": len(gold)}, dataset)


@dataclass
class BlurbScore:
    per_dataset: dict[str, float]
    per_task_avg: dict[str, float]
    score: float

    @property
    def score_rounded(self) -> float:
        return round(self.score, 2)

    def to_dict(self) -> dict:
        return {
            "per_dataset": self.per_dataset,
            "per_task_avg": self.per_task_avg,
            "score": self.score,
            "score_rounded": self.score_rounded,
        }


def blurb_score(per_dataset: dict[str, float]) -> BlurbScore:
    """Benchmark summary: mean score per task type, then the macro mean
    over the six task types. Scores are on the percent scale."""
    scores = {canonical_dataset(name): float(v) for name, v in per_dataset.items()}
    if len(scores) != len(per_dataset):
        raise DataError("duplicate dataset names after canonicalization")
    missing = [name for name in ALL_DATASETS if name not in scores]
    if missing:
        raise DataError(f"missing dataset scores: {missing}")
    per_task = {
        task: math.fsum(scores[name] for name in names) / len(names)
        for task, names in TASK_GROUPS.items()
    }
    macro = math.fsum(per_task.values()) / len(per_task)
    return BlurbScore(scores, per_task, macro)


def mean_score(values: Sequence[float]) -> float:
    """Plain arithmetic mean, for averaging repeated-run scores."""
    if not values:
        raise DataError("cannot average an empty score list")
    return math.fsum(values) / len(values)
