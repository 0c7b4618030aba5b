"""Step 1: binary SATD identification with a stacked BiLSTM."""

from src.identifier.embeddings import EmbeddingMatrix, build_embedding_matrix
from src.identifier.model import BiLSTMIdentifier, IdentifierConfig
from src.identifier.trainer import TrainedIdentifier, predict_binary, train_identifier
from src.identifier.vocab import Vocabulary, build_vocabulary, encode

__all__ = [
    'BiLSTMIdentifier',
    'EmbeddingMatrix',
    'IdentifierConfig',
    'TrainedIdentifier',
    'Vocabulary',
    'build_embedding_matrix',
    'build_vocabulary',
    'encode',
    'predict_binary',
    'train_identifier',
]
