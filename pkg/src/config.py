"""Configuration loading and seed fan-out."""

import copy
import hashlib
import logging
from typing import Any, Dict, Optional

import yaml

from src.errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG: Dict[str, Any] = {
    'seed': 42,
    'logging': {
        'level': 'INFO',
        'file': None,
        'console': True,
    },
    'corpus': {
        'format': 'CSV',
        'ratios': [0.8, 0.1, 0.1],
    },
    'preprocess': {
        'lowercase': True,
        'remove_stopwords': True,
        'remove_punctuation': True,
        'lemmatize': True,
        'min_word_length': 3,
        'remove_numbers': True,
        'remove_urls': True,
        'ascii_only': True,
        'collapse_whitespace': True,
        # raw text for the transformer step instead of the aggressive pipeline
        'categorizer_raw_text': False,
    },
    'augment': {
        'scope': 'TYPES_ONLY',
        'max_in_flight': 4,
        'max_retries': 3,
    },
    'gateway': {
        'kind': 'MOCK',
        'endpoint': 'https://api.openai.com/v1/chat/completions',
        'model': 'gpt-3.5-turbo',
        'max_retries': 3,
        'backoff_base_ms': 1000,
        'requests_per_minute': 60,
        'timeout_seconds': 30,
        'temperature': None,
        'top_p': None,
        'max_tokens': None,
    },
    'identifier': {
        'layer_widths': [128, 64, 128, 128],
        'dropout': 0.3,
        'embedding_dim': 100,
        'embeddings_path': None,
        'min_frequency': 1,
        'max_length': 64,
        'batch_size': 32,
        'max_epochs': 30,
        'patience': 5,
        'learning_rate': 1e-3,
    },
    'categorizer': {
        'encoder': 'bert-base-uncased',
        'cache_dir': None,
        'head_hidden': 256,
        'num_labels': 4,
        'learning_rate': 5e-5,
        'epsilon': 1e-8,
        'batch_size': 32,
        'max_length': 128,
        'max_epochs': 4,
    },
    'keywords': {
        'embedder': 'sentence-transformers',
        'model': 'all-MiniLM-L6-v2',
        'ngram_range': [1, 2],
        'top_k': 10,
        'diversity': 0.0,
        'chunk_words': 200,
    },
    'audit': {
        'enabled': False,
        'db_path': 'db/audit.sqlite',
        'redact_text': True,
    },
}


def deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Merge override into a copy of base, recursing into nested mappings."""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def load_config(config_path: Optional[str] = "config.yaml") -> Dict[str, Any]:
    """Load configuration file merged over the defaults.

    Args:
        config_path: Path to YAML config file (None = defaults only)

    Returns:
        Effective configuration dictionary
    """
    if config_path is None:
        return copy.deepcopy(DEFAULT_CONFIG)
    try:
        with open(config_path, 'r') as f:
            loaded = yaml.safe_load(f)
    except FileNotFoundError:
        logger.warning(f"Config file {config_path} not found, using defaults")
        return copy.deepcopy(DEFAULT_CONFIG)
    except yaml.YAMLError as e:
        raise ConfigError(f"Could not parse {config_path}: {e}") from e

    if loaded is None:
        loaded = {}
    if not isinstance(loaded, dict):
        raise ConfigError(f"Top level of {config_path} must be a mapping")
    return deep_merge(DEFAULT_CONFIG, loaded)


def derive_seed(master_seed: int, stage: str) -> int:
    """Derive a stable 31-bit sub-seed for a pipeline stage."""
    digest = hashlib.sha256(f"{master_seed}:{stage}".encode('utf-8')).digest()
    return int.from_bytes(digest[:4], 'big') & 0x7FFFFFFF
