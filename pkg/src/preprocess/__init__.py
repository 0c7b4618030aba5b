"""Text normalization applied before feature extraction."""

from src.preprocess.text import PreprocessConfig, deduplicate, preprocess_dataset, preprocess_text

__all__ = ['PreprocessConfig', 'deduplicate', 'preprocess_dataset', 'preprocess_text']
