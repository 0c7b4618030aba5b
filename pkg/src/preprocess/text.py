"""Noise-removing text normalization and duplicate removal."""

import logging
import re
from dataclasses import asdict, dataclass, fields
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Optional, Sequence

from nltk.tokenize import RegexpTokenizer

from src.corpus.schema import LabeledInstance
from src.errors import InvalidConfig

logger = logging.getLogger(__name__)

RESOURCES = Path(__file__).parent / 'resources'

URL_PATTERN = re.compile(r'\b[a-zA-Z][a-zA-Z0-9+.\-]*://\S+|\bwww\.\S+', re.IGNORECASE)
PUNCT_PATTERN = re.compile(r'[^\w\s]|_')
NUMBER_PATTERN = re.compile(r'\d+')

_tokenizer = RegexpTokenizer(r'\w+|[^\w\s]+')


@dataclass(frozen=True)
class PreprocessConfig:
    """Switches for each normalization rule (all on by default)."""

    lowercase: bool = True
    remove_stopwords: bool = True
    remove_punctuation: bool = True
    lemmatize: bool = True
    min_word_length: int = 3
    remove_numbers: bool = True
    remove_urls: bool = True
    ascii_only: bool = True
    collapse_whitespace: bool = True

    def __post_init__(self):
        if self.min_word_length < 1:
            raise InvalidConfig(f"min_word_length must be >= 1, got {self.min_word_length}")

    @classmethod
    def from_config(cls, section: Optional[Dict[str, Any]]) -> 'PreprocessConfig':
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in (section or {}).items() if k in names})

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@lru_cache(maxsize=None)
def load_stopwords(path: Optional[str] = None) -> FrozenSet[str]:
    """Read the shipped stop-word list (comments start with '#')."""
    path = Path(path) if path else RESOURCES / 'stopwords.txt'
    with open(path, 'r', encoding='utf-8') as f:
        return frozenset(
            line.strip().lower() for line in f
            if line.strip() and not line.startswith('#')
        )


@lru_cache(maxsize=None)
def load_lemmas(path: Optional[str] = None) -> Dict[str, str]:
    """Read the shipped inflected->lemma table."""
    path = Path(path) if path else RESOURCES / 'lemmas.txt'
    table = {}
    with open(path, 'r', encoding='utf-8') as f:
        for line in f:
            if not line.strip() or line.startswith('#'):
                continue
            inflected, lemma = line.rstrip('\n').split('\t')
            table[inflected.strip()] = lemma.strip()
    return table


def preprocess_text(raw: str, config: PreprocessConfig = PreprocessConfig()) -> str:
    """Normalize one text into space-joined tokens.

    Rules run in a fixed order: URLs, case, non-ASCII, punctuation, numbers,
    tokenization, lemmatization, stop words, short words.

    Args:
        raw: Input text
        config: Rule switches

    Returns:
        Normalized text, possibly empty
    """
    if not raw:
        return ''
    text = raw
    if config.remove_urls:
        text = URL_PATTERN.sub(' ', text)
    if config.lowercase:
        text = text.lower()
    if config.ascii_only:
        text = text.encode('ascii', 'ignore').decode('ascii')
    if config.remove_punctuation:
        # contractions collapse ("don't" -> "dont") before the rest is split
        text = text.replace("'", '')
        text = PUNCT_PATTERN.sub(' ', text)
    if config.remove_numbers:
        text = NUMBER_PATTERN.sub(' ', text)

    tokens = _tokenizer.tokenize(text)
    if config.lemmatize:
        lemmas = load_lemmas()
        tokens = [lemmas.get(tok.lower(), tok) for tok in tokens]
    if config.remove_stopwords:
        stopwords = load_stopwords()
        tokens = [tok for tok in tokens if tok.lower() not in stopwords]
    tokens = [tok for tok in tokens if len(tok) >= config.min_word_length]

    # single-space join; collapse_whitespace is implied by tokenization
    return ' '.join(tokens)


def preprocess_dataset(
    dataset: Sequence[LabeledInstance],
    config: PreprocessConfig = PreprocessConfig(),
) -> List[str]:
    """Normalize the text of every instance, keeping order."""
    return [preprocess_text(inst.text, config) for inst in dataset]


def deduplicate(
    dataset: Sequence[LabeledInstance],
    config: PreprocessConfig = PreprocessConfig(),
) -> List[LabeledInstance]:
    """Drop repeated (source, normalized text, label) triples, first occurrence wins.

    Identical normalized text with different labels is kept and logged as a
    label conflict.
    """
    seen = set()
    labels_by_text: Dict[tuple, set] = {}
    kept = []
    for inst in dataset:
        normalized = preprocess_text(inst.text, config)
        key = (inst.source, normalized, inst.label)
        if key in seen:
            continue
        text_key = (inst.source, normalized)
        labels = labels_by_text.setdefault(text_key, set())
        if labels and inst.label not in labels:
            logger.warning(
                f"Label conflict for {inst.id}: normalized text {normalized!r} already seen "
                f"with {sorted(l.value for l in labels)}, now {inst.label.value}"
            )
        labels.add(inst.label)
        seen.add(key)
        kept.append(inst)

    if len(kept) < len(dataset):
        logger.info(f"Removed {len(dataset) - len(kept)} duplicate instances")
    return kept
