"""Token vocabulary and fixed-length integer encoding."""

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Union

import numpy as np

from src.errors import EmptyCorpus

PAD_INDEX = 0
UNK_INDEX = 1
PAD_TOKEN = '<pad>'
UNK_TOKEN = '<unk>'


@dataclass(frozen=True)
class Vocabulary:
    """token -> index; 0 is padding, 1 is unknown."""

    token_to_index: Dict[str, int]

    @property
    def size(self) -> int:
        return len(self.token_to_index)

    def __len__(self) -> int:
        return self.size

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_index

    def index(self, token: str) -> int:
        return self.token_to_index.get(token, UNK_INDEX)

    def tokens(self) -> List[str]:
        """Tokens in index order."""
        return sorted(self.token_to_index, key=self.token_to_index.get)

    def save(self, path: Union[str, Path]):
        with open(path, 'w', encoding='utf-8') as f:
            json.dump({'tokens': self.tokens()}, f, ensure_ascii=False)

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'Vocabulary':
        with open(path, 'r', encoding='utf-8') as f:
            tokens = json.load(f)['tokens']
        return cls({token: i for i, token in enumerate(tokens)})


def build_vocabulary(texts: Iterable[str], min_frequency: int = 1) -> Vocabulary:
    """Build a vocabulary from preprocessed training texts.

    Tokens are ordered by frequency (descending) then lexicographically;
    tokens below min_frequency fall back to the unknown index.

    Raises:
        EmptyCorpus: no token in any text
    """
    counts = Counter(token for text in texts for token in text.split())
    if not counts:
        raise EmptyCorpus("Cannot build a vocabulary from an empty corpus")

    kept = [tok for tok, c in counts.items() if c >= min_frequency]
    kept.sort(key=lambda tok: (-counts[tok], tok))
    mapping = {PAD_TOKEN: PAD_INDEX, UNK_TOKEN: UNK_INDEX}
    for token in kept:
        mapping[token] = len(mapping)
    return Vocabulary(mapping)


def encode(texts: Sequence[str], vocabulary: Vocabulary, max_length: int) -> np.ndarray:
    """Right-padded, truncated index matrix of shape (len(texts), max_length)."""
    if max_length < 1:
        raise ValueError(f"max_length must be >= 1, got {max_length}")
    batch = np.full((len(texts), max_length), PAD_INDEX, dtype=np.int64)
    for row, text in enumerate(texts):
        indices = [vocabulary.index(tok) for tok in text.split()][:max_length]
        batch[row, :len(indices)] = indices
    return batch
