"""Per-class precision/recall/F1 from a confusion matrix, and macro averaging."""

import logging
import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sklearn.metrics import confusion_matrix as sk_confusion_matrix

from src.errors import EmptyInput, LengthMismatch, UnknownLabel

logger = logging.getLogger(__name__)

DECIMALS = 3


def label_name(label) -> str:
    return label.value if isinstance(label, Enum) else str(label)


def round_half_even(value: float, decimals: int = DECIMALS) -> float:
    """Round the way the published tables do (0.8875 -> 0.888, 0.8865 -> 0.886)."""
    quantum = Decimal(1).scaleb(-decimals)
    return float(Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_EVEN))


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are gold labels, columns are predicted labels."""

    matrix: np.ndarray
    labels: Tuple[str, ...]

    @property
    def total(self) -> int:
        return int(self.matrix.sum())

    def true_positives(self) -> np.ndarray:
        return np.diag(self.matrix)

    def false_positives(self) -> np.ndarray:
        return self.matrix.sum(axis=0) - np.diag(self.matrix)

    def false_negatives(self) -> np.ndarray:
        return self.matrix.sum(axis=1) - np.diag(self.matrix)

    def to_list(self) -> List[List[int]]:
        return self.matrix.astype(int).tolist()


@dataclass
class MetricReport:
    """Per-class scores plus macro-F1 for one evaluation view."""

    labels: List[str]
    precision: Dict[str, float]
    recall: Dict[str, float]
    f1: Dict[str, float]
    support: Dict[str, int]
    macro_f1: float
    macro_f1_rounded: float
    confusion: Optional[List[List[int]]] = None
    entropy: Dict[str, float] = field(default_factory=dict)
    manifest_ref: str = ''

    def to_dict(self) -> Dict:
        return {
            'labels': list(self.labels),
            'per_class': {
                label: {
                    'precision': self.precision[label],
                    'recall': self.recall[label],
                    'f1': self.f1[label],
                    'support': self.support[label],
                }
                for label in self.labels
            },
            'macro_f1': self.macro_f1,
            'macro_f1_rounded': self.macro_f1_rounded,
            'confusion_matrix': self.confusion,
            'entropy': dict(self.entropy),
            'manifest_ref': self.manifest_ref,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'MetricReport':
        labels = list(data['labels'])
        per_class = data['per_class']
        return cls(
            labels=labels,
            precision={label: per_class[label]['precision'] for label in labels},
            recall={label: per_class[label]['recall'] for label in labels},
            f1={label: per_class[label]['f1'] for label in labels},
            support={label: int(per_class[label]['support']) for label in labels},
            macro_f1=data['macro_f1'],
            macro_f1_rounded=data['macro_f1_rounded'],
            confusion=data.get('confusion_matrix'),
            entropy=dict(data.get('entropy') or {}),
            manifest_ref=data.get('manifest_ref', ''),
        )


def confusion_matrix(gold: Sequence, predicted: Sequence, labels: Sequence) -> ConfusionMatrix:
    """Confusion matrix over a fixed label order.

    Raises:
        LengthMismatch: gold and predicted differ in length
        UnknownLabel: a label outside the given order
    """
    gold = [label_name(g) for g in gold]
    predicted = [label_name(p) for p in predicted]
    names = tuple(label_name(label) for label in labels)
    if len(gold) != len(predicted):
        raise LengthMismatch(f"{len(gold)} gold labels vs {len(predicted)} predictions")
    unknown = (set(gold) | set(predicted)) - set(names)
    if unknown:
        raise UnknownLabel(f"Labels outside {names}: {sorted(unknown)}")
    if not gold:
        return ConfusionMatrix(np.zeros((len(names), len(names)), dtype=np.int64), names)
    return ConfusionMatrix(sk_confusion_matrix(gold, predicted, labels=list(names)), names)


def _safe_ratio(numerator: float, denominator: float) -> float:
    return numerator / denominator if denominator > 0 else 0.0


def macro_f1(per_class: Sequence[float]) -> float:
    """Unweighted mean of per-class F1.

    Raises:
        EmptyInput
    """
    values = list(per_class)
    if not values:
        raise EmptyInput("macro_f1 needs at least one class")
    return math.fsum(values) / len(values)


def f1_scores(gold: Sequence, predicted: Sequence, labels: Sequence, warn_zero_division: bool = True) -> MetricReport:
    """Precision, recall and F1 per class; zero-division cells are 0.

    Args:
        gold: Gold labels (enums or names)
        predicted: Predicted labels, same length
        labels: Label order of the report

    Returns:
        MetricReport
    """
    cm = confusion_matrix(gold, predicted, labels)
    tp = cm.true_positives().astype(float)
    fp = cm.false_positives().astype(float)
    fn = cm.false_negatives().astype(float)

    precision, recall, f1, support = {}, {}, {}, {}
    zero_cells = []
    for i, label in enumerate(cm.labels):
        p = _safe_ratio(tp[i], tp[i] + fp[i])
        r = _safe_ratio(tp[i], tp[i] + fn[i])
        if tp[i] + fp[i] == 0 or tp[i] + fn[i] == 0:
            zero_cells.append(label)
        precision[label] = p
        recall[label] = r
        f1[label] = _safe_ratio(2 * p * r, p + r)
        support[label] = int(tp[i] + fn[i])

    if zero_cells and warn_zero_division:
        logger.warning(f"Zero division for {zero_cells}; those precision/recall cells are set to 0")

    macro = macro_f1([f1[label] for label in cm.labels])
    return MetricReport(
        labels=list(cm.labels),
        precision=precision,
        recall=recall,
        f1=f1,
        support=support,
        macro_f1=macro,
        macro_f1_rounded=macro_f1([round_half_even(f1[label]) for label in cm.labels]),
        confusion=cm.to_list(),
    )
