"""Intrinsic word-level evaluation of normalization output.

All comparison happens per token position against the gold per-token
assignments, with whitespace runs collapsed and (by default) case folded.
ERR is the error reduction rate over the leave-as-is baseline:

    err = (acc_system - acc_lai) / (1 - acc_lai)

where acc_lai is the accuracy of leaving every token unchanged.  1.0 means
every needed change was made, 0.0 means no better than doing nothing, and
negative values mean the system damaged the text.  On data where nothing
needs normalizing (acc_lai == 1) ERR is undefined and reported as None;
macro-averaging skips undefined languages.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from statistics import mean
from typing import Sequence

from .corpus import Corpus


class LengthMismatch(ValueError):
    pass


class EmptyInput(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


def compare(a: str, b: str, fold_case: bool = True) -> bool:
    """Equality after whitespace-run collapsing and optional case folding."""
    a = " ".join(a.split())
    b = " ".join(b.split())
    if fold_case:
        a, b = a.casefold(), b.casefold()
    return a == b


def word_accuracy(
    gold: Sequence[str], pred: Sequence[str], fold_case: bool = True
) -> float:
    if len(gold) != len(pred):
        raise LengthMismatch(f"{len(gold)} gold vs {len(pred)} predicted")
    if not gold:
        raise EmptyInput("no tokens to score")
    return sum(compare(g, p, fold_case) for g, p in zip(gold, pred)) / len(gold)


def err(
    gold: Sequence[str],
    raw: Sequence[str],
    pred: Sequence[str],
    fold_case: bool = True,
) -> float | None:
    """Error reduction rate; None when the raw text is already all-correct."""
    if not (len(gold) == len(raw) == len(pred)):
        raise LengthMismatch(
            f"lengths differ: gold {len(gold)}, raw {len(raw)}, pred {len(pred)}"
        )
    acc_lai = word_accuracy(gold, raw, fold_case)
    if acc_lai == 1.0:
        return None
    acc_sys = word_accuracy(gold, pred, fold_case)
    return (acc_sys - acc_lai) / (1.0 - acc_lai)


def precision_recall(
    gold: Sequence[str],
    raw: Sequence[str],
    pred: Sequence[str],
    fold_case: bool = True,
) -> tuple[float | None, float | None]:
    """Precision/recall over normalization decisions (positions the system
    changed).  Either is None when its denominator is zero."""
    counts = EvalCounts()
    counts.add_sentence(gold, raw, pred, fold_case)
    return counts.precision, counts.recall


@dataclass
class EvalCounts:
    """Accumulable per-position tallies; all metrics derive from these."""

    n_tokens: int = 0
    n_correct: int = 0
    n_needing_norm: int = 0
    n_lai_correct: int = 0
    tp: int = 0  # changed, and matches gold
    fp: int = 0  # changed, and does not match gold
    fn_: int = 0  # left unchanged where gold wanted a change

    def add_position(self, gold: str, raw: str, pred: str, fold_case: bool = True):
        self.n_tokens += 1
        lai_ok = compare(raw, gold, fold_case)
        sys_ok = compare(pred, gold, fold_case)
        changed = not compare(pred, raw, fold_case)
        self.n_correct += sys_ok
        self.n_lai_correct += lai_ok
        self.n_needing_norm += not lai_ok
        if changed:
            if sys_ok:
                self.tp += 1
            else:
                self.fp += 1
        elif not lai_ok:
            self.fn_ += 1

    def add_sentence(
        self,
        gold: Sequence[str],
        raw: Sequence[str],
        pred: Sequence[str],
        fold_case: bool = True,
    ):
        if not (len(gold) == len(raw) == len(pred)):
            raise LengthMismatch(
                f"lengths differ: gold {len(gold)}, raw {len(raw)}, pred {len(pred)}"
            )
        for g, r, p in zip(gold, raw, pred):
            self.add_position(g, r, p, fold_case)

    def merge(self, other: "EvalCounts") -> "EvalCounts":
        return EvalCounts(
            self.n_tokens + other.n_tokens,
            self.n_correct + other.n_correct,
            self.n_needing_norm + other.n_needing_norm,
            self.n_lai_correct + other.n_lai_correct,
            self.tp + other.tp,
            self.fp + other.fp,
            self.fn_ + other.fn_,
        )

    @property
    def accuracy(self) -> float | None:
        return self.n_correct / self.n_tokens if self.n_tokens else None

    @property
    def err(self) -> float | None:
        if self.n_tokens == 0 or self.n_needing_norm == 0:
            return None
        acc_lai = self.n_lai_correct / self.n_tokens
        return (self.accuracy - acc_lai) / (1.0 - acc_lai)

    @property
    def precision(self) -> float | None:
        denom = self.tp + self.fp
        return self.tp / denom if denom else None

    @property
    def recall(self) -> float | None:
        denom = self.tp + self.fn_
        return self.tp / denom if denom else None

    def to_dict(self) -> dict:
        return {
            "n_tokens": self.n_tokens,
            "n_correct": self.n_correct,
            "n_needing_norm": self.n_needing_norm,
            "n_lai_correct": self.n_lai_correct,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn_,
        }


@dataclass
class EvalReport:
    per_lang: dict[str, EvalCounts] = field(default_factory=dict)

    @property
    def macro_err(self) -> float | None:
        defined = [c.err for c in self.per_lang.values() if c.err is not None]
        return mean(defined) if defined else None

    def merge(self, other: "EvalReport") -> "EvalReport":
        merged = {lang: counts for lang, counts in self.per_lang.items()}
        for lang, counts in other.per_lang.items():
            merged[lang] = merged[lang].merge(counts) if lang in merged else counts
        return EvalReport(merged)

    def to_dict(self) -> dict:
        return {
            "per_lang": {
                lang: {
                    "accuracy": c.accuracy,
                    "err": c.err,
                    "precision": c.precision,
                    "recall": c.recall,
                    "counts": c.to_dict(),
                }
                for lang, c in sorted(self.per_lang.items())
            },
            "macro_err": self.macro_err,
        }


def _prediction_tokens(prediction) -> Sequence[str]:
    # Accepts an align.Alignment or a plain list of per-token strings.
    return getattr(prediction, "assignments", prediction)


def evaluate_corpus(
    gold_corpus: Corpus, predictions: Sequence, fold_case: bool = True
) -> EvalReport:
    """Score per-token predictions against a gold corpus.

    ``predictions`` holds one entry per sentence: either an Alignment or a
    list of per-token assignment strings.  Counts are micro-aggregated within
    the corpus language.
    """
    if len(predictions) != len(gold_corpus.sentences):
        raise ShapeMismatch(
            f"{len(gold_corpus.sentences)} sentences vs {len(predictions)} predictions"
        )
    counts = EvalCounts()
    for idx, (sentence, prediction) in enumerate(
        zip(gold_corpus.sentences, predictions)
    ):
        pred_tokens = _prediction_tokens(prediction)
        if len(pred_tokens) != len(sentence.tokens):
            raise ShapeMismatch(
                f"sentence {idx}: {len(sentence.tokens)} tokens vs "
                f"{len(pred_tokens)} predicted assignments"
            )
        for token, pred in zip(sentence.tokens, pred_tokens):
            counts.add_position(token.norm, token.raw, pred, fold_case)
    return EvalReport({gold_corpus.lang: counts})


def evaluate_corpora(
    items: Sequence[tuple[Corpus, Sequence]], fold_case: bool = True
) -> EvalReport:
    """Evaluate several corpora and merge counts per language."""
    report = EvalReport()
    for corpus, predictions in items:
        report = report.merge(evaluate_corpus(corpus, predictions, fold_case))
    return report
