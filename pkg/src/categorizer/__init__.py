"""Step 2: SATD type categorization with a fine-tuned transformer encoder."""

from src.categorizer.model import LABEL_ORDER, CategorizerConfig, TypeClassifier, load_encoder
from src.categorizer.trainer import TrainedCategorizer, predict_type, train_categorizer
from src.categorizer.two_step import TwoStepPrediction, two_step_classify, two_step_predict

__all__ = [
    'LABEL_ORDER',
    'CategorizerConfig',
    'TrainedCategorizer',
    'TwoStepPrediction',
    'TypeClassifier',
    'load_encoder',
    'predict_type',
    'train_categorizer',
    'two_step_classify',
    'two_step_predict',
]
