"""Identification gate followed by type categorization."""

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from src.categorizer.trainer import TrainedCategorizer, predict_type
from src.corpus.schema import BinaryLabel, SatdLabel
from src.identifier.trainer import TrainedIdentifier, predict_binary


@dataclass(frozen=True)
class TwoStepPrediction:
    label: SatdLabel
    identifier_score: float
    type_probabilities: Optional[np.ndarray] = None


def two_step_predict(
    identifier: TrainedIdentifier,
    categorizer: TrainedCategorizer,
    texts: Sequence[str],
    categorizer_texts: Optional[Sequence[str]] = None,
) -> List[TwoStepPrediction]:
    """Run step 2 only on the texts step 1 accepts.

    Args:
        identifier: Step 1 model
        categorizer: Step 2 model trained on the same artifact source
        texts: Preprocessed texts for the identifier
        categorizer_texts: Texts fed to the categorizer (defaults to texts)
    """
    categorizer_texts = texts if categorizer_texts is None else categorizer_texts
    if len(categorizer_texts) != len(texts):
        raise ValueError("categorizer_texts must align with texts")

    gate = predict_binary(identifier, texts)
    accepted = [i for i, (label, _) in enumerate(gate) if label == BinaryLabel.SATD]
    typed = dict(zip(accepted, predict_type(categorizer, [categorizer_texts[i] for i in accepted])))

    predictions = []
    for i, (label, score) in enumerate(gate):
        if i in typed:
            debt_type, probs = typed[i]
            predictions.append(TwoStepPrediction(debt_type, score, probs))
        else:
            predictions.append(TwoStepPrediction(SatdLabel.NOT_SATD, score))
    return predictions


def two_step_classify(
    identifier: TrainedIdentifier,
    categorizer: TrainedCategorizer,
    texts: Sequence[str],
    categorizer_texts: Optional[Sequence[str]] = None,
) -> List[SatdLabel]:
    """Final five-way label per text: NOT_SATD or one of the debt types."""
    return [p.label for p in two_step_predict(identifier, categorizer, texts, categorizer_texts)]
