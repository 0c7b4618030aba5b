"""Seeded per-class stratified splitting."""

import logging
import math
from collections import defaultdict
from typing import Dict, List, Sequence, Tuple

import numpy as np

from src.corpus.schema import LabeledInstance, SplitBundle
from src.errors import ClassTooSmall, LeakageError

logger = logging.getLogger(__name__)

PARTS = ('train', 'validation', 'test')


def _allocate(count: int, ratios: Sequence[float]) -> List[int]:
    """Largest-remainder allocation of one class over the three parts.

    Ties on the remainder go to the earlier part, so train wins first.
    """
    exact = [count * r for r in ratios]
    sizes = [math.floor(x) for x in exact]
    leftover = count - sum(sizes)
    order = sorted(range(len(ratios)), key=lambda i: (-(exact[i] - sizes[i]), i))
    for i in order[:leftover]:
        sizes[i] += 1
    return sizes


def _check_ratios(ratios: Sequence[float]) -> Tuple[float, float, float]:
    if len(ratios) != 3:
        raise ValueError(f"Need three ratios, got {len(ratios)}")
    if any(r < 0 for r in ratios) or not math.isclose(sum(ratios), 1.0, abs_tol=1e-9):
        raise ValueError(f"Ratios must be non-negative and sum to 1, got {ratios}")
    return tuple(float(r) for r in ratios)


def stratified_split(
    dataset: Sequence[LabeledInstance],
    ratios: Sequence[float] = (0.8, 0.1, 0.1),
    seed: int = 42,
) -> SplitBundle:
    """Split a dataset into train/validation/test preserving class proportions.

    Each class is shuffled with a seeded generator and sliced by ratio; the
    leftover instances are assigned by largest remainder. Within each part the
    original dataset order is kept.

    Args:
        dataset: Instances to split
        ratios: (train, validation, test) fractions
        seed: Shuffle seed

    Returns:
        SplitBundle

    Raises:
        ClassTooSmall: a class has fewer than 3 instances while all ratios are nonzero
    """
    ratios = _check_ratios(ratios)
    by_class: Dict[str, List[int]] = defaultdict(list)
    for index, inst in enumerate(dataset):
        by_class[inst.label.value].append(index)

    if all(r > 0 for r in ratios):
        for label, indices in sorted(by_class.items()):
            if len(indices) < 3:
                raise ClassTooSmall(label, len(indices))

    rng = np.random.default_rng(seed)
    assignment: Dict[int, int] = {}
    for label in sorted(by_class):
        indices = by_class[label]
        shuffled = [indices[i] for i in rng.permutation(len(indices))]
        sizes = _allocate(len(indices), ratios)
        start = 0
        for part, size in enumerate(sizes):
            for index in shuffled[start:start + size]:
                assignment[index] = part
            start += size

    parts: List[List[LabeledInstance]] = [[], [], []]
    for index, inst in enumerate(dataset):
        parts[assignment[index]].append(inst)

    bundle = SplitBundle(train=parts[0], validation=parts[1], test=parts[2], seed=seed, ratios=ratios)
    check_partition(dataset, bundle)
    logger.info(
        f"Split {len(dataset)} instances: train {len(bundle.train)}, "
        f"validation {len(bundle.validation)}, test {len(bundle.test)}"
    )
    return bundle


def check_partition(dataset: Sequence[LabeledInstance], bundle: SplitBundle) -> None:
    """Assert the bundle partitions the dataset by id."""
    seen = set()
    for part in PARTS:
        for inst in getattr(bundle, part):
            if inst.id in seen:
                raise LeakageError(f"Instance {inst.id} appears in more than one split part")
            seen.add(inst.id)
    if seen != {inst.id for inst in dataset}:
        raise LeakageError("Split parts do not cover the dataset")
