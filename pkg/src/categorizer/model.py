"""Transformer encoder with a two-layer ReLU head over the four debt types."""

import logging
from dataclasses import asdict, dataclass
from typing import Dict, Mapping, Optional, Tuple

import torch
import torch.nn as nn
from transformers import AutoModel, AutoTokenizer

from src.corpus.schema import DEBT_TYPES
from src.errors import InvalidConfig

logger = logging.getLogger(__name__)

LABEL_ORDER: Tuple[str, ...] = tuple(label.value for label in DEBT_TYPES)


@dataclass(frozen=True)
class CategorizerConfig:
    """Fine-tuning recipe; defaults follow the published setup."""

    encoder: str = 'bert-base-uncased'
    cache_dir: Optional[str] = None
    head_hidden: int = 256
    num_labels: int = 4
    learning_rate: float = 5e-5
    epsilon: float = 1e-8
    batch_size: int = 32
    max_length: int = 128
    max_epochs: int = 4
    seed: int = 42

    def __post_init__(self):
        if self.num_labels != len(LABEL_ORDER):
            raise InvalidConfig(f"Categorizer output dimension must be {len(LABEL_ORDER)}, got {self.num_labels}")
        if self.max_epochs < 1:
            raise InvalidConfig(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.head_hidden < 1 or self.batch_size < 1 or self.max_length < 1:
            raise InvalidConfig("head_hidden, batch_size and max_length must be >= 1")

    @classmethod
    def from_config(cls, section: Mapping, seed: int = 42) -> 'CategorizerConfig':
        known = {k: v for k, v in section.items() if k in cls.__dataclass_fields__}
        known.setdefault('seed', seed)
        return cls(**known)

    def to_dict(self) -> Dict:
        return asdict(self)


def load_encoder(name_or_path: str, cache_dir: Optional[str] = None):
    """Tokenizer and encoder from a local directory or the model hub."""
    logger.info(f"Loading encoder {name_or_path}")
    tokenizer = AutoTokenizer.from_pretrained(name_or_path, cache_dir=cache_dir)
    encoder = AutoModel.from_pretrained(name_or_path, cache_dir=cache_dir)
    return tokenizer, encoder


class TypeClassifier(nn.Module):
    """[CLS] representation -> linear(hidden -> H) -> ReLU -> linear(H -> 4)."""

    def __init__(self, encoder: nn.Module, head_hidden: int = 256, num_labels: int = 4):
        super().__init__()
        self.encoder = encoder
        hidden = encoder.config.hidden_size
        self.head = nn.Sequential(
            nn.Linear(hidden, head_hidden),
            nn.ReLU(),
            nn.Linear(head_hidden, num_labels),
        )

    def forward(self, input_ids: torch.Tensor, attention_mask: torch.Tensor) -> torch.Tensor:
        outputs = self.encoder(input_ids=input_ids, attention_mask=attention_mask)
        cls = outputs.last_hidden_state[:, 0]
        return self.head(cls)
