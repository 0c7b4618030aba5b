"""Fine-tuning, model selection, inference and checkpoints for the categorizer."""

import copy
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import torch
import torch.nn as nn
from torch.utils.data import DataLoader
from tqdm import tqdm
from transformers import AutoModel, AutoTokenizer

from src.categorizer.model import LABEL_ORDER, CategorizerConfig, TypeClassifier, load_encoder
from src.corpus.schema import DEBT_TYPES, LabeledInstance, SatdLabel, SplitBundle
from src.errors import Divergence, EmptyClass, UnknownLabel
from src.metrics.scores import f1_scores

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


@dataclass
class TrainedCategorizer:
    """Fine-tuned encoder + head, with its tokenizer and fixed label order."""

    network: TypeClassifier
    tokenizer: object
    config: CategorizerConfig
    labels: Tuple[str, ...] = LABEL_ORDER
    history: List[Dict[str, float]] = field(default_factory=list)
    best_epoch: int = 0

    def save(self, directory: Union[str, Path]) -> Path:
        """Write encoder/ (weights + tokenizer), head.pt, config.json and history.json."""
        directory = Path(directory)
        (directory / 'encoder').mkdir(parents=True, exist_ok=True)
        self.network.encoder.save_pretrained(directory / 'encoder')
        self.tokenizer.save_pretrained(directory / 'encoder')
        torch.save(self.network.head.state_dict(), directory / 'head.pt')
        with open(directory / 'config.json', 'w', encoding='utf-8') as f:
            json.dump({
                'schema_version': SCHEMA_VERSION,
                'config': self.config.to_dict(),
                'labels': list(self.labels),
                'best_epoch': self.best_epoch,
            }, f, indent=2)
        with open(directory / 'history.json', 'w', encoding='utf-8') as f:
            json.dump(self.history, f, indent=2)
        logger.info(f"Saved categorizer checkpoint to {directory}")
        return directory

    @classmethod
    def load(cls, directory: Union[str, Path]) -> 'TrainedCategorizer':
        directory = Path(directory)
        with open(directory / 'config.json', 'r', encoding='utf-8') as f:
            meta = json.load(f)
        if meta.get('schema_version') != SCHEMA_VERSION:
            raise ValueError(f"Unsupported categorizer checkpoint version {meta.get('schema_version')}")
        labels = tuple(meta['labels'])
        if labels != LABEL_ORDER:
            raise UnknownLabel(f"Checkpoint label order {labels} differs from {LABEL_ORDER}")
        config = CategorizerConfig(**meta['config'])
        tokenizer = AutoTokenizer.from_pretrained(directory / 'encoder')
        encoder = AutoModel.from_pretrained(directory / 'encoder')
        network = TypeClassifier(encoder, config.head_hidden, config.num_labels)
        network.head.load_state_dict(torch.load(directory / 'head.pt', map_location='cpu'))
        network.eval()
        with open(directory / 'history.json', 'r', encoding='utf-8') as f:
            history = json.load(f)
        return cls(network, tokenizer, config, labels, history, meta.get('best_epoch', 0))


def _label_indices(instances: Sequence[LabeledInstance]) -> List[int]:
    indices = []
    for inst in instances:
        if inst.label not in DEBT_TYPES:
            raise UnknownLabel(f"Categorizer input {inst.id} has non-debt label {inst.label.value}")
        indices.append(LABEL_ORDER.index(inst.label.value))
    return indices


def _batches(texts: Sequence[str], targets: Optional[Sequence[int]], batch_size: int, shuffle: bool, generator=None):
    order = list(range(len(texts)))
    loader = DataLoader(order, batch_size=batch_size, shuffle=shuffle, generator=generator)
    for batch in loader:
        idx = batch.tolist()
        yield [texts[i] for i in idx], None if targets is None else torch.as_tensor([targets[i] for i in idx])


def _encode(tokenizer, texts: Sequence[str], max_length: int):
    return tokenizer(list(texts), padding=True, truncation=True, max_length=max_length, return_tensors='pt')


def _probabilities(network: TypeClassifier, tokenizer, texts: Sequence[str], config: CategorizerConfig,
                   batch_size: Optional[int] = None) -> np.ndarray:
    if not texts:
        return np.zeros((0, len(LABEL_ORDER)), dtype=np.float64)
    network.eval()
    out = []
    with torch.no_grad():
        for batch_texts, _ in _batches(texts, None, batch_size or config.batch_size, shuffle=False):
            enc = _encode(tokenizer, batch_texts, config.max_length)
            logits = network(enc['input_ids'], enc['attention_mask'])
            out.append(torch.softmax(logits.double(), dim=-1).numpy())
    return np.concatenate(out)


def train_categorizer(
    splits: SplitBundle,
    config: CategorizerConfig = CategorizerConfig(),
    encoder=None,
    tokenizer=None,
) -> TrainedCategorizer:
    """Fine-tune encoder and head jointly; keep the best validation macro-F1 epoch.

    Args:
        splits: Debt-labelled bundle; paraphrases belong in splits.train only
        config: Fine-tuning recipe
        encoder: Preloaded encoder (loaded from config.encoder when None)
        tokenizer: Its tokenizer

    Raises:
        EmptyClass: a debt type is absent from the training split
        Divergence: training loss became NaN
    """
    train_targets = _label_indices(splits.train)
    missing = [LABEL_ORDER[i] for i in range(len(LABEL_ORDER)) if i not in set(train_targets)]
    if missing:
        raise EmptyClass(f"Training split has no instances of {missing}")
    val_targets = _label_indices(splits.validation)

    torch.manual_seed(config.seed)
    if encoder is None or tokenizer is None:
        tokenizer, encoder = load_encoder(config.encoder, config.cache_dir)
    network = TypeClassifier(encoder, config.head_hidden, config.num_labels)
    optimizer = torch.optim.AdamW(network.parameters(), lr=config.learning_rate, eps=config.epsilon)
    loss_fn = nn.CrossEntropyLoss()
    generator = torch.Generator().manual_seed(config.seed)

    train_texts = [inst.text for inst in splits.train]
    val_texts = [inst.text for inst in splits.validation]
    if not val_texts:
        logger.warning("Empty validation split, selecting on training macro-F1")
        val_texts, val_targets = train_texts, train_targets

    history: List[Dict[str, float]] = []
    best_score = -math.inf
    best_epoch = 0
    best_state = None

    for epoch in tqdm(range(1, config.max_epochs + 1), desc='categorizer', disable=None):
        network.train()
        total, count = 0.0, 0
        for batch_texts, targets in _batches(train_texts, train_targets, config.batch_size, True, generator):
            enc = _encode(tokenizer, batch_texts, config.max_length)
            optimizer.zero_grad()
            loss = loss_fn(network(enc['input_ids'], enc['attention_mask']), targets)
            loss.backward()
            optimizer.step()
            total += loss.item() * len(targets)
            count += len(targets)

        train_loss = total / count
        if math.isnan(train_loss):
            raise Divergence(f"Categorizer loss became NaN at epoch {epoch}")

        probs = _probabilities(network, tokenizer, val_texts, config)
        predicted = [LABEL_ORDER[i] for i in probs.argmax(axis=1)]
        gold = [LABEL_ORDER[i] for i in val_targets]
        val_macro = f1_scores(gold, predicted, LABEL_ORDER, warn_zero_division=False).macro_f1
        history.append({'epoch': epoch, 'train_loss': train_loss, 'val_macro_f1': val_macro})
        logger.debug(f"epoch {epoch}: train_loss={train_loss:.4f} val_macro_f1={val_macro:.4f}")

        if val_macro > best_score:
            best_score, best_epoch = val_macro, epoch
            best_state = copy.deepcopy(network.state_dict())

    network.load_state_dict(best_state)
    network.eval()
    logger.info(f"Categorizer best epoch {best_epoch} (validation macro-F1 {best_score:.3f})")
    return TrainedCategorizer(network, tokenizer, config, LABEL_ORDER, history, best_epoch)


def predict_type(
    model: TrainedCategorizer,
    texts: Sequence[str],
    batch_size: Optional[int] = None,
) -> List[Tuple[SatdLabel, np.ndarray]]:
    """Debt type and probability vector per text; argmax ties go to the earlier label."""
    probs = _probabilities(model.network, model.tokenizer, texts, model.config, batch_size)
    # np.argmax returns the first maximum, which is the label-order tie rule
    return [(SatdLabel(model.labels[int(np.argmax(row))]), row) for row in probs]
