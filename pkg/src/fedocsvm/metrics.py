"""Confusion counting and F-score. Positive class = healthy (+1)."""

from __future__ import annotations

from dataclasses import dataclass

from .data import Label


@dataclass(frozen=True)
class Confusion:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0


def confusion(predictions, truths) -> Confusion:
    """predictions are +1/-1 classifier signs; truths are Labels."""
    predictions = list(predictions)
    truths = list(truths)
    if len(predictions) != len(truths):
        raise ValueError("predictions and truths differ in length")
    tp = fp = fn = tn = 0
    for pred, truth in zip(predictions, truths):
        healthy = truth is Label.HEALTHY
        if pred == 1:
            tp += healthy
            fp += not healthy
        else:
            fn += healthy
            tn += not healthy
    return Confusion(tp=tp, fp=fp, fn=fn, tn=tn)


def precision(c: Confusion) -> float:
    return c.tp / (c.tp + c.fp) if (c.tp + c.fp) > 0 else 0.0


def recall(c: Confusion) -> float:
    return c.tp / (c.tp + c.fn) if (c.tp + c.fn) > 0 else 0.0


def f_score(c: Confusion) -> float:
    p, r = precision(c), recall(c)
    return 2 * p * r / (p + r) if (p + r) > 0 else 0.0
