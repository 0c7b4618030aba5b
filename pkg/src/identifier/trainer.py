"""Training, early stopping, inference and checkpoints for the identifier."""

import copy
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
import torch
import torch.nn as nn
from torch.utils.data import DataLoader, TensorDataset
from tqdm import tqdm

from src.corpus.schema import BinaryLabel, LabeledInstance, SplitBundle, is_debt
from src.errors import Divergence, EmptyClass
from src.identifier.embeddings import EmbeddingMatrix
from src.identifier.model import BiLSTMIdentifier, IdentifierConfig
from src.identifier.vocab import Vocabulary, encode

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
THRESHOLD = 0.5


@dataclass
class TrainedIdentifier:
    """A fitted identification network with everything needed to reuse it."""

    network: BiLSTMIdentifier
    config: IdentifierConfig
    vocabulary: Vocabulary
    history: List[Dict[str, float]] = field(default_factory=list)
    stopped_epoch: int = 0

    def save(self, directory: Union[str, Path]) -> Path:
        """Write weights.pt, config.json, vocab.json and history.json."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        torch.save(self.network.state_dict(), directory / 'weights.pt')
        self.vocabulary.save(directory / 'vocab.json')
        with open(directory / 'config.json', 'w', encoding='utf-8') as f:
            json.dump({
                'schema_version': SCHEMA_VERSION,
                'config': self.config.to_dict(),
                'vocab_size': self.vocabulary.size,
                'stopped_epoch': self.stopped_epoch,
            }, f, indent=2)
        with open(directory / 'history.json', 'w', encoding='utf-8') as f:
            json.dump(self.history, f, indent=2)
        logger.info(f"Saved identifier checkpoint to {directory}")
        return directory

    @classmethod
    def load(cls, directory: Union[str, Path]) -> 'TrainedIdentifier':
        directory = Path(directory)
        with open(directory / 'config.json', 'r', encoding='utf-8') as f:
            meta = json.load(f)
        if meta.get('schema_version') != SCHEMA_VERSION:
            raise ValueError(f"Unsupported identifier checkpoint version {meta.get('schema_version')}")
        config = IdentifierConfig(**meta['config'])
        vocabulary = Vocabulary.load(directory / 'vocab.json')
        network = BiLSTMIdentifier(vocabulary.size, config)
        network.load_state_dict(torch.load(directory / 'weights.pt', map_location='cpu'))
        network.eval()
        with open(directory / 'history.json', 'r', encoding='utf-8') as f:
            history = json.load(f)
        return cls(network, config, vocabulary, history, meta.get('stopped_epoch', 0))


def _targets(instances: Sequence[LabeledInstance]) -> np.ndarray:
    return np.array([1.0 if is_debt(inst.label) else 0.0 for inst in instances], dtype=np.float32)


def _check_classes(name: str, targets: np.ndarray):
    present = set(targets.tolist())
    if present != {0.0, 1.0}:
        missing = BinaryLabel.SATD.value if 1.0 not in present else BinaryLabel.NOT_SATD.value
        raise EmptyClass(f"{name} split has no {missing} instances")


def _tensors(instances: Sequence[LabeledInstance], vocabulary: Vocabulary, config: IdentifierConfig):
    ids = encode([inst.text for inst in instances], vocabulary, config.max_length)
    return torch.as_tensor(ids), torch.as_tensor(_targets(instances))


def _evaluate_loss(network: nn.Module, loader: DataLoader, loss_fn) -> float:
    network.eval()
    total, count = 0.0, 0
    with torch.no_grad():
        for input_ids, targets in loader:
            loss = loss_fn(network(input_ids), targets)
            total += loss.item() * len(targets)
            count += len(targets)
    return total / max(1, count)


def train_identifier(
    splits: SplitBundle,
    embeddings: EmbeddingMatrix,
    config: IdentifierConfig = IdentifierConfig(),
) -> TrainedIdentifier:
    """Fit the BiLSTM stack with early stopping on validation loss.

    Args:
        splits: Preprocessed bundle; debt types and SATD both count as positive
        embeddings: Matrix aligned with a vocabulary built from splits.train
        config: Network and loop hyperparameters

    Returns:
        TrainedIdentifier holding the weights of the lowest-validation-loss epoch

    Raises:
        EmptyClass: train or validation lacks SATD or NOT_SATD
        Divergence: validation loss became NaN
    """
    vocabulary = embeddings.vocabulary
    train_x, train_y = _tensors(splits.train, vocabulary, config)
    val_x, val_y = _tensors(splits.validation, vocabulary, config)
    _check_classes('train', train_y.numpy())
    _check_classes('validation', val_y.numpy())

    torch.manual_seed(config.seed)
    network = BiLSTMIdentifier(vocabulary.size, config, embeddings.matrix)
    optimizer = torch.optim.Adam(network.parameters(), lr=config.learning_rate)
    loss_fn = nn.BCEWithLogitsLoss()

    generator = torch.Generator().manual_seed(config.seed)
    train_loader = DataLoader(
        TensorDataset(train_x, train_y), batch_size=config.batch_size, shuffle=True, generator=generator
    )
    val_loader = DataLoader(TensorDataset(val_x, val_y), batch_size=config.batch_size)

    history: List[Dict[str, float]] = []
    best_loss = math.inf
    best_epoch = 0
    best_state = None

    epochs = tqdm(range(1, config.max_epochs + 1), desc='identifier', disable=None)
    for epoch in epochs:
        network.train()
        total, count = 0.0, 0
        for input_ids, targets in train_loader:
            optimizer.zero_grad()
            loss = loss_fn(network(input_ids), targets)
            loss.backward()
            optimizer.step()
            total += loss.item() * len(targets)
            count += len(targets)

        train_loss = total / count
        val_loss = _evaluate_loss(network, val_loader, loss_fn)
        if math.isnan(val_loss) or math.isnan(train_loss):
            raise Divergence(f"Loss became NaN at epoch {epoch}")

        history.append({'epoch': epoch, 'train_loss': train_loss, 'val_loss': val_loss})
        logger.debug(f"epoch {epoch}: train_loss={train_loss:.4f} val_loss={val_loss:.4f}")

        # an infinite first validation loss still yields a restorable state
        if best_state is None or val_loss < best_loss:
            best_loss, best_epoch = val_loss, epoch
            best_state = copy.deepcopy(network.state_dict())
        elif epoch - best_epoch >= config.patience:
            logger.info(f"Early stop at epoch {epoch}, best epoch {best_epoch} (val_loss {best_loss:.4f})")
            break

    network.load_state_dict(best_state)
    network.eval()
    return TrainedIdentifier(network, config, vocabulary, history, best_epoch)


def identifier_scores(model: TrainedIdentifier, texts: Sequence[str], batch_size: int = 256) -> np.ndarray:
    """SATD probability per text, in input order."""
    if not texts:
        return np.zeros(0, dtype=np.float32)
    ids = torch.as_tensor(encode(list(texts), model.vocabulary, model.config.max_length))
    model.network.eval()
    scores = []
    with torch.no_grad():
        for start in range(0, len(ids), batch_size):
            scores.append(torch.sigmoid(model.network(ids[start:start + batch_size])).numpy())
    return np.concatenate(scores)


def decide(score: float) -> BinaryLabel:
    """Fixed 0.5 threshold, inclusive."""
    return BinaryLabel.SATD if score >= THRESHOLD else BinaryLabel.NOT_SATD


def predict_binary(
    model: TrainedIdentifier,
    texts: Sequence[str],
    batch_size: int = 256,
) -> List[Tuple[BinaryLabel, float]]:
    """Label and score per preprocessed text, in input order."""
    return [(decide(float(s)), float(s)) for s in identifier_scores(model, texts, batch_size)]
