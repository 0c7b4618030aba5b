"""Dataset schema, ingestion, label algebra and stratified splitting."""

from src.corpus.schema import (
    ArtifactSource,
    BinaryLabel,
    DEBT_TYPES,
    LabeledInstance,
    SatdLabel,
    SplitBundle,
)
from src.corpus.io import load_dataset, write_dataset
from src.corpus.split import stratified_split

__all__ = [
    'ArtifactSource',
    'BinaryLabel',
    'DEBT_TYPES',
    'LabeledInstance',
    'SatdLabel',
    'SplitBundle',
    'load_dataset',
    'write_dataset',
    'stratified_split',
]
