"""Pretrained static word embeddings (GloVe text format)."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np
from tqdm import tqdm

from src.identifier.vocab import PAD_INDEX, Vocabulary

logger = logging.getLogger(__name__)

INIT_RANGE = 0.05
RANDOM_SOURCE = 'random-uniform'


@dataclass(frozen=True)
class EmbeddingMatrix:
    """V x d matrix aligned with a vocabulary."""

    matrix: np.ndarray
    vocabulary: Vocabulary
    source: str
    coverage: float

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])


def load_pretrained_table(path: Union[str, Path], vocabulary: Optional[Vocabulary] = None) -> Dict[str, np.ndarray]:
    """Read "token v1 ... vd" lines; keeps only vocabulary tokens when one is given."""
    table = {}
    dim = None
    with open(path, 'r', encoding='utf-8', errors='ignore') as f:
        for line in tqdm(f, desc='embeddings', disable=None):
            parts = line.rstrip().split(' ')
            if len(parts) < 2:
                continue
            token, values = parts[0], parts[1:]
            if vocabulary is not None and token not in vocabulary:
                continue
            if dim is None:
                dim = len(values)
            elif len(values) != dim:
                logger.warning(f"Skipping {token!r}: expected {dim} values, got {len(values)}")
                continue
            table[token] = np.asarray(values, dtype=np.float32)
    return table


def build_embedding_matrix(
    vocabulary: Vocabulary,
    dim: int = 100,
    path: Optional[Union[str, Path]] = None,
    seed: int = 42,
) -> EmbeddingMatrix:
    """Align a pretrained table with the vocabulary.

    Rows of in-table tokens are copied, other rows are drawn from a seeded
    uniform(-0.05, 0.05); row 0 (padding) is zero. Without a table file every
    row is random.
    """
    rng = np.random.default_rng(seed)
    matrix = rng.uniform(-INIT_RANGE, INIT_RANGE, size=(vocabulary.size, dim)).astype(np.float32)
    source = RANDOM_SOURCE
    hits = 0

    if path is not None and Path(path).exists():
        table = load_pretrained_table(path, vocabulary)
        if table:
            table_dim = len(next(iter(table.values())))
            if table_dim != dim:
                raise ValueError(f"Embedding file has dimension {table_dim}, config says {dim}")
            for token, index in vocabulary.token_to_index.items():
                vector = table.get(token)
                if vector is not None and index != PAD_INDEX:
                    matrix[index] = vector
                    hits += 1
        source = str(path)
    elif path is not None:
        logger.warning(f"Embedding file {path} not found, using random table")

    matrix[PAD_INDEX] = 0.0
    coverage = hits / max(1, vocabulary.size - 2)
    logger.info(f"Embedding matrix {matrix.shape} from {source}, coverage {coverage:.1%}")
    return EmbeddingMatrix(matrix=matrix, vocabulary=vocabulary, source=source, coverage=coverage)
