"""Class distributions, paraphrase multiplier plans and entropy balance."""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable

import numpy as np
from scipy.stats import entropy

from src.corpus.schema import DEBT_TYPES, BinaryLabel, LabeledInstance, SatdLabel
from src.errors import DegenerateDistribution, EmptyDistribution

logger = logging.getLogger(__name__)

DEBT_NAMES = tuple(label.value for label in DEBT_TYPES)


class PlanScope(str, Enum):
    """Which classes a plan balances."""

    TYPES_ONLY = 'TYPES_ONLY'
    BINARY = 'BINARY'


@dataclass(frozen=True)
class ClassDistribution:
    """Label name -> count over a fixed label universe.

    Zero-count entries stay in the universe: k counts them.
    """

    counts: Dict[str, int]

    def __post_init__(self):
        if any(c < 0 for c in self.counts.values()):
            raise ValueError(f"Counts must be non-negative: {self.counts}")

    @property
    def k(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @classmethod
    def from_instances(cls, dataset: Iterable[LabeledInstance], universe: Iterable[str] = None) -> 'ClassDistribution':
        counts: Dict[str, int] = {name: 0 for name in (universe or [])}
        for inst in dataset:
            counts[inst.label.value] = counts.get(inst.label.value, 0) + 1
        return cls(counts=counts)

    def restrict(self, labels: Iterable[str]) -> 'ClassDistribution':
        return ClassDistribution({name: self.counts.get(name, 0) for name in labels})

    def binary(self) -> 'ClassDistribution':
        """Merge debt types into SATD."""
        satd = sum(c for name, c in self.counts.items() if name in DEBT_NAMES or name == BinaryLabel.SATD.value)
        return ClassDistribution({
            BinaryLabel.SATD.value: satd,
            SatdLabel.NOT_SATD.value: self.counts.get(SatdLabel.NOT_SATD.value, 0),
        })


@dataclass(frozen=True)
class AugmentationPlan:
    """Per-class paraphrase multipliers and the counts they lead to."""

    multipliers: Dict[str, int]
    target: str
    original_counts: Dict[str, int]
    expected_final: Dict[str, int]
    scope: PlanScope = PlanScope.TYPES_ONLY

    def multiplier(self, label: str) -> int:
        return self.multipliers.get(label, 0)

    @property
    def is_noop(self) -> bool:
        return all(n == 0 for n in self.multipliers.values())

    def to_dict(self) -> Dict:
        return {
            'scope': self.scope.value,
            'target': self.target,
            'multipliers': dict(self.multipliers),
            'original_counts': dict(self.original_counts),
            'expected_final': dict(self.expected_final),
        }


def plan_augmentation(
    distribution: ClassDistribution,
    scope: PlanScope = PlanScope.TYPES_ONLY,
) -> AugmentationPlan:
    """Compute n_i = floor(C_max / C_i) - 1 for every minority class.

    Args:
        distribution: Class counts (usually of the training split)
        scope: TYPES_ONLY balances the four debt types, BINARY balances SATD vs Not-SATD

    Returns:
        AugmentationPlan

    Raises:
        EmptyDistribution: majority count is zero
    """
    scope = PlanScope(scope)
    if scope == PlanScope.TYPES_ONLY:
        scoped = distribution.restrict(DEBT_NAMES)
    else:
        scoped = distribution.binary()

    if not scoped.counts or max(scoped.counts.values()) <= 0:
        raise EmptyDistribution(f"No instances to balance in scope {scope.value}")

    c_max = max(scoped.counts.values())
    target = next(name for name, c in scoped.counts.items() if c == c_max)

    multipliers = {}
    expected = {}
    for name, count in scoped.counts.items():
        if count == 0 or count == c_max:
            n = 0
        else:
            n = c_max // count - 1
        multipliers[name] = n
        expected[name] = count * (n + 1)

    logger.info(f"Augmentation plan ({scope.value}): target {target}={c_max}, multipliers {multipliers}")
    return AugmentationPlan(
        multipliers=multipliers,
        target=target,
        original_counts=dict(scoped.counts),
        expected_final=expected,
        scope=scope,
    )


def entropy_balance(distribution: ClassDistribution) -> float:
    """Normalized Shannon entropy H / log(k) in [0, 1].

    Raises:
        DegenerateDistribution: fewer than two classes in the universe
        EmptyDistribution: all counts are zero
    """
    if distribution.k < 2:
        raise DegenerateDistribution(f"Entropy balance needs k >= 2, got {distribution.k}")
    counts = np.array(list(distribution.counts.values()), dtype=float)
    if counts.sum() <= 0:
        raise EmptyDistribution("Entropy balance needs a positive total count")
    # scipy normalizes the counts and treats 0*log(0) as 0
    h = entropy(counts)
    return float(h / math.log(distribution.k))
