"""Text embedders for keyword extraction."""

import logging
from typing import Optional, Sequence

import numpy as np
from sklearn.feature_extraction.text import HashingVectorizer

logger = logging.getLogger(__name__)

DEFAULT_MODEL = 'all-MiniLM-L6-v2'


class HashingEmbedder:
    """Offline bag-of-words embedder (L2-normalized hashed term counts).

    Similarity to a group vector grows with how often a phrase's words occur
    in the group, which keeps the dominant terms on top without a download.
    """

    name = 'hashing'

    def __init__(self, n_features: int = 2 ** 16):
        self.vectorizer = HashingVectorizer(
            n_features=n_features,
            alternate_sign=False,
            norm='l2',
            token_pattern=r'(?u)\b\w+\b',
        )

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        return self.vectorizer.transform(list(texts)).toarray()


class SentenceTransformerEmbedder:
    """Dense sentence embeddings, loaded on first use."""

    name = 'sentence-transformers'

    def __init__(self, model_name: str = DEFAULT_MODEL, cache_dir: Optional[str] = None):
        self.model_name = model_name
        self.cache_dir = cache_dir
        self._model = None

    @property
    def model(self):
        if self._model is None:
            from sentence_transformers import SentenceTransformer

            logger.info(f"Loading sentence embedder {self.model_name}")
            self._model = SentenceTransformer(self.model_name, cache_folder=self.cache_dir)
        return self._model

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        return np.asarray(self.model.encode(list(texts), show_progress_bar=False))


def build_embedder(section: dict):
    """Embedder named by the keywords config section."""
    kind = (section or {}).get('embedder', SentenceTransformerEmbedder.name)
    if kind == HashingEmbedder.name:
        return HashingEmbedder()
    if kind == SentenceTransformerEmbedder.name:
        return SentenceTransformerEmbedder(section.get('model') or DEFAULT_MODEL, section.get('cache_dir'))
    raise ValueError(f"Unknown keyword embedder: {kind}")
