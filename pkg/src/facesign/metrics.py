"""Confusion-matrix evaluation: accuracy, precision, recall, F1.

Conventions: confusion rows are true classes, columns predictions.
Per-class precision = TP/column-sum, recall = TP/row-sum, F1 their harmonic
mean; any zero denominator yields 0.0 and is flagged in the report. Headline
("weighted") metrics are support-weighted means; weighted recall is computed
as trace/n, the same arithmetic as accuracy, to which it is identically
equal. Macro (unweighted) means are exposed as a derived property.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import EmptyDataset
from .nn import NUM_CLASSES

LABEL_ORDER = ("affirmative", "yes_no_question", "wh_question")


def confusion_matrix(
    y_true: Sequence[int], y_pred: Sequence[int], num_classes: int = NUM_CLASSES
) -> np.ndarray:
    """Accumulate an integer confusion matrix in sample order."""
    true = np.asarray(y_true, dtype=np.intp)
    pred = np.asarray(y_pred, dtype=np.intp)
    if true.shape != pred.shape or true.ndim != 1:
        raise ValueError(f"label arrays must be 1-D and equal length, got {true.shape} / {pred.shape}")
    if true.size and (true.min() < 0 or true.max() >= num_classes):
        raise ValueError("true labels out of range")
    if pred.size and (pred.min() < 0 or pred.max() >= num_classes):
        raise ValueError("predicted labels out of range")
    cm = np.zeros((num_classes, num_classes), dtype=np.int64)
    for t, p in zip(true, pred):
        cm[t, p] += 1
    return cm


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float

    def to_json_dict(self) -> Dict[str, float]:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


@dataclass(frozen=True, eq=False)
class EvalReport:
    """Four-metric evaluation summary over one dataset split."""

    confusion: np.ndarray
    accuracy: float
    per_class: Tuple[ClassMetrics, ...]
    weighted: ClassMetrics
    n: int
    zero_division: Tuple[str, ...] = ()

    @property
    def macro(self) -> ClassMetrics:
        """Unweighted means of the per-class metrics."""
        k = len(self.per_class)
        return ClassMetrics(
            precision=sum(c.precision for c in self.per_class) / k,
            recall=sum(c.recall for c in self.per_class) / k,
            f1=sum(c.f1 for c in self.per_class) / k,
        )

    def to_json_dict(self) -> dict:
        return {
            "confusion": self.confusion.tolist(),
            "accuracy": self.accuracy,
            "per_class": [c.to_json_dict() for c in self.per_class],
            "weighted": self.weighted.to_json_dict(),
            "n": self.n,
            "zero_division": list(self.zero_division),
        }


def report_from_confusion(cm: np.ndarray) -> EvalReport:
    """Compute the full report from a confusion matrix."""
    cm = np.asarray(cm)
    if cm.ndim != 2 or cm.shape[0] != cm.shape[1]:
        raise ValueError(f"confusion matrix must be square, got shape {cm.shape}")
    if (cm < 0).any():
        raise ValueError("confusion matrix entries must be >= 0")
    cm = cm.astype(np.int64)
    k = cm.shape[0]
    n = int(cm.sum())
    if n == 0:
        raise EmptyDataset("confusion matrix is empty")

    rows = cm.sum(axis=1)
    cols = cm.sum(axis=0)
    trace = int(np.trace(cm))
    flags: List[str] = []

    per_class = []
    for c in range(k):
        tp = int(cm[c, c])
        if cols[c] > 0:
            precision = tp / int(cols[c])
        else:
            precision = 0.0
            flags.append(f"precision[{c}]")
        if rows[c] > 0:
            recall = tp / int(rows[c])
        else:
            recall = 0.0
            flags.append(f"recall[{c}]")
        if precision + recall > 0.0:
            f1 = 2.0 * precision * recall / (precision + recall)
        else:
            f1 = 0.0
            flags.append(f"f1[{c}]")
        per_class.append(ClassMetrics(precision, recall, f1))

    accuracy = trace / n
    weighted = ClassMetrics(
        precision=sum(int(rows[c]) * per_class[c].precision for c in range(k)) / n,
        recall=trace / n,  # identical arithmetic to accuracy by construction
        f1=sum(int(rows[c]) * per_class[c].f1 for c in range(k)) / n,
    )
    return EvalReport(
        confusion=cm,
        accuracy=accuracy,
        per_class=tuple(per_class),
        weighted=weighted,
        n=n,
        zero_division=tuple(flags),
    )


def format_percent(value: float) -> str:
    """Render a rate as a percentage, round-half-up to 2 decimals."""
    return str((Decimal(value) * 100).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def format_report_table(report: EvalReport) -> str:
    """Human-readable summary table (weighted headline metrics, percent)."""
    rows = [
        ("Accuracy", report.accuracy),
        ("Precision", report.weighted.precision),
        ("Recall", report.weighted.recall),
        ("F1 Score", report.weighted.f1),
    ]
    lines = [f"n = {report.n}", f"{'Metric':<12}{'Value(%)':>10}"]
    for name, value in rows:
        lines.append(f"{name:<12}{format_percent(value):>10}")
    return "\n".join(lines)
