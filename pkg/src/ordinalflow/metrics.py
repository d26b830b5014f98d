"""Ordinal-aware evaluation over the fixed 1..5 level scale:
accuracy, MAE, macro-F1, quadratic weighted kappa, confusion matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

N_CLASSES = 5


def _check_series(truth: Sequence[int], pred: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    t = np.asarray(truth)
    p = np.asarray(pred)
    if t.ndim != 1 or p.ndim != 1 or t.shape != p.shape:
        raise ValueError("truth and pred must be 1-D sequences of equal length")
    if t.size == 0:
        raise ValueError("empty label series")
    t = t.astype(int)
    p = p.astype(int)
    for name, arr in (("truth", t), ("pred", p)):
        if np.any(arr < 1) or np.any(arr > N_CLASSES):
            raise ValueError(f"{name} labels must be in 1..{N_CLASSES}")
    return t, p


def accuracy(truth, pred) -> float:
    t, p = _check_series(truth, pred)
    return float((t == p).mean())


def mae(truth, pred) -> float:
    t, p = _check_series(truth, pred)
    return float(np.abs(t - p).mean())


def confusion_matrix(truth, pred) -> np.ndarray:
    """5x5 count matrix, rows = truth, columns = prediction."""
    t, p = _check_series(truth, pred)
    cm = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    np.add.at(cm, (t - 1, p - 1), 1)
    return cm


def macro_f1(truth, pred) -> float:
    """Per-class F1 averaged over classes present in truth or pred.

    A class with zero precision+recall contributes F1 = 0; classes
    absent from both series are excluded from the average.
    """
    cm = confusion_matrix(truth, pred)
    present = (cm.sum(axis=1) + cm.sum(axis=0)) > 0
    f1s = []
    for c in np.nonzero(present)[0]:
        tp = cm[c, c]
        denom = 2 * tp + (cm[c, :].sum() - tp) + (cm[:, c].sum() - tp)
        f1s.append(0.0 if denom == 0 else 2 * tp / denom)
    return float(np.mean(f1s))


def qwk(truth, pred) -> float:
    """Cohen's kappa with quadratic weights on the fixed 5x5 grid.

    With zero expected disagreement (both series constant and equal)
    returns 1.0 for a diagonal observed matrix, else 0.0.
    """
    cm = confusion_matrix(truth, pred).astype(np.float64)
    n = cm.sum()
    i = np.arange(N_CLASSES)
    weights = (i[:, None] - i[None, :]) ** 2 / (N_CLASSES - 1) ** 2
    expected = np.outer(cm.sum(axis=1), cm.sum(axis=0)) / n
    den = (weights * expected).sum()
    if den == 0.0:
        return 1.0 if np.trace(cm) == n else 0.0
    return float(1.0 - (weights * cm).sum() / den)


@dataclass
class EvalReport:
    accuracy: float
    mae: float
    macro_f1: float
    qwk: float
    confusion: np.ndarray
    n: int

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "mae": self.mae,
            "macro_f1": self.macro_f1,
            "qwk": self.qwk,
            "confusion": self.confusion.tolist(),
            "n": self.n,
        }


def evaluate(truth, pred) -> EvalReport:
    t, p = _check_series(truth, pred)
    return EvalReport(
        accuracy=accuracy(t, p),
        mae=mae(t, p),
        macro_f1=macro_f1(t, p),
        qwk=qwk(t, p),
        confusion=confusion_matrix(t, p),
        n=int(t.size),
    )
