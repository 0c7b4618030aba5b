"""Stacked bidirectional LSTM for SATD identification."""

from dataclasses import asdict, dataclass, field
from typing import Dict, Mapping, Tuple

import numpy as np
import torch
import torch.nn as nn

from src.errors import InvalidConfig
from src.identifier.vocab import PAD_INDEX


@dataclass(frozen=True)
class IdentifierConfig:
    """Hyperparameters of the identification network and its training loop."""

    layer_widths: Tuple[int, ...] = (128, 64, 128, 128)
    dropout: float = 0.3
    embedding_dim: int = 100
    min_frequency: int = 1
    max_length: int = 64
    batch_size: int = 32
    max_epochs: int = 30
    patience: int = 5
    learning_rate: float = 1e-3
    seed: int = 42
    embeddings_path: str = field(default='', compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'layer_widths', tuple(int(w) for w in self.layer_widths))
        if not self.layer_widths or any(w < 1 for w in self.layer_widths):
            raise InvalidConfig(f"layer_widths must be positive, got {self.layer_widths}")
        if not 0 <= self.dropout < 1:
            raise InvalidConfig(f"dropout must be in [0, 1), got {self.dropout}")
        if self.max_epochs < 1:
            raise InvalidConfig(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.patience < 1:
            raise InvalidConfig(f"patience must be >= 1, got {self.patience}")
        if self.max_length < 1 or self.batch_size < 1 or self.embedding_dim < 1:
            raise InvalidConfig("max_length, batch_size and embedding_dim must be >= 1")

    @classmethod
    def from_config(cls, section: Mapping, seed: int = 42) -> 'IdentifierConfig':
        known = {k: v for k, v in section.items() if k in cls.__dataclass_fields__}
        known['embeddings_path'] = known.get('embeddings_path') or ''
        known.setdefault('seed', seed)
        return cls(**known)

    def to_dict(self) -> Dict:
        d = asdict(self)
        d['layer_widths'] = list(self.layer_widths)
        return d


class BiLSTMIdentifier(nn.Module):
    """Embedding -> BiLSTM stack -> last state -> one logit.

    Dropout follows every recurrent layer but the last; batch normalization
    follows the first. Each layer sees packed sequences, so padding never
    reaches the recurrent state.
    """

    def __init__(self, vocab_size: int, config: IdentifierConfig, embeddings: np.ndarray = None):
        super().__init__()
        self.config = config
        if embeddings is not None:
            self.embedding = nn.Embedding.from_pretrained(
                torch.as_tensor(embeddings, dtype=torch.float32),
                freeze=False,
                padding_idx=PAD_INDEX,
            )
        else:
            self.embedding = nn.Embedding(vocab_size, config.embedding_dim, padding_idx=PAD_INDEX)

        widths = config.layer_widths
        inputs = (config.embedding_dim, *(2 * w for w in widths[:-1]))
        self.layers = nn.ModuleList(
            nn.LSTM(input_size=i, hidden_size=w, batch_first=True, bidirectional=True)
            for i, w in zip(inputs, widths)
        )
        self.dropout = nn.Dropout(config.dropout)
        self.norm = nn.BatchNorm1d(2 * widths[0])
        self.classifier = nn.Linear(2 * widths[-1], 1)

    def forward(self, input_ids: torch.Tensor) -> torch.Tensor:
        """Logits of shape (batch,)."""
        total_length = input_ids.size(1)
        # empty texts still get one (padding) step
        lengths = (input_ids != PAD_INDEX).sum(dim=1).clamp(min=1).cpu()
        x = self.embedding(input_ids)

        h_n = None
        last = len(self.layers) - 1
        for depth, lstm in enumerate(self.layers):
            packed = nn.utils.rnn.pack_padded_sequence(x, lengths, batch_first=True, enforce_sorted=False)
            packed_out, (h_n, _) = lstm(packed)
            if depth == last:
                break
            x, _ = nn.utils.rnn.pad_packed_sequence(packed_out, batch_first=True, total_length=total_length)
            x = self.dropout(x)
            if depth == 0:
                x = self.norm(x.transpose(1, 2)).transpose(1, 2)

        features = torch.cat([h_n[-2], h_n[-1]], dim=1)
        return self.classifier(features).squeeze(-1)
