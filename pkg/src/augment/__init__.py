"""Paraphrase-based class balancing of the training split."""

from src.augment.augmenter import (
    AugmentationResult,
    AugmentedInstance,
    augment_training_set,
    check_leakage,
    load_augmented,
    write_augmented,
)
from src.augment.planner import (
    AugmentationPlan,
    ClassDistribution,
    PlanScope,
    entropy_balance,
    plan_augmentation,
)
from src.augment.prompt import build_prompt

__all__ = [
    'AugmentationPlan',
    'AugmentationResult',
    'AugmentedInstance',
    'ClassDistribution',
    'PlanScope',
    'augment_training_set',
    'build_prompt',
    'check_leakage',
    'entropy_balance',
    'load_augmented',
    'plan_augmentation',
    'write_augmented',
]
