"""Dataset row types and label algebra."""

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, Iterable, List, Sequence, Tuple, Union

from src.errors import UnknownLabel


class SatdLabel(str, Enum):
    """Gold label of a text snippet."""

    NOT_SATD = 'NOT_SATD'
    CODE_DESIGN = 'CODE_DESIGN'
    DOCUMENTATION = 'DOCUMENTATION'
    TEST = 'TEST'
    REQUIREMENT = 'REQUIREMENT'


class BinaryLabel(str, Enum):
    """Label space of the identification step."""

    NOT_SATD = 'NOT_SATD'
    SATD = 'SATD'


class ArtifactSource(str, Enum):
    """Channel a text came from."""

    CODE_COMMENT = 'CODE_COMMENT'
    ISSUE_SECTION = 'ISSUE_SECTION'
    PULL_SECTION = 'PULL_SECTION'
    COMMIT_MESSAGE = 'COMMIT_MESSAGE'

    @property
    def code(self) -> str:
        return SOURCE_CODES[self]

    @classmethod
    def from_code(cls, code: str) -> 'ArtifactSource':
        """Resolve 'CC'/'IS'/'PS'/'CM' or a full enum name."""
        value = code.strip().upper()
        for source, short in SOURCE_CODES.items():
            if value in (short, source.value):
                return source
        raise ValueError(f"Unknown artifact source: {code}")


SOURCE_CODES = {
    ArtifactSource.CODE_COMMENT: 'CC',
    ArtifactSource.ISSUE_SECTION: 'IS',
    ArtifactSource.PULL_SECTION: 'PS',
    ArtifactSource.COMMIT_MESSAGE: 'CM',
}

# Fixed order; also the categorizer's output order
DEBT_TYPES: Tuple[SatdLabel, ...] = (
    SatdLabel.CODE_DESIGN,
    SatdLabel.DOCUMENTATION,
    SatdLabel.TEST,
    SatdLabel.REQUIREMENT,
)

Label = Union[SatdLabel, BinaryLabel]


def parse_label(value: str, allow_binary: bool = True) -> Label:
    """Parse a serialized label name."""
    name = str(value).strip().upper()
    if name in SatdLabel.__members__:
        return SatdLabel[name]
    if allow_binary and name == BinaryLabel.SATD.value:
        return BinaryLabel.SATD
    raise UnknownLabel(f"Unknown label: {value!r}")


def is_debt(label: Label) -> bool:
    """True for the four debt types and for binary SATD."""
    return label in DEBT_TYPES or label == BinaryLabel.SATD


@dataclass(frozen=True)
class LabeledInstance:
    """One text snippet with its provenance and gold label."""

    id: str
    source: ArtifactSource
    project: str
    text: str
    label: Label

    def to_record(self) -> Dict[str, str]:
        return {
            'id': self.id,
            'source': self.source.value,
            'project': self.project,
            'text': self.text,
            'label': self.label.value,
        }


@dataclass(frozen=True)
class SplitBundle:
    """Train/validation/test partition of one dataset."""

    train: List[LabeledInstance]
    validation: List[LabeledInstance]
    test: List[LabeledInstance]
    seed: int
    ratios: Tuple[float, float, float] = (0.8, 0.1, 0.1)

    def ids(self, part: str) -> set:
        return {inst.id for inst in getattr(self, part)}

    def all_instances(self) -> List[LabeledInstance]:
        return [*self.train, *self.validation, *self.test]


def to_binary(dataset: Iterable[LabeledInstance]) -> List[LabeledInstance]:
    """Merge the four debt types into one SATD class."""
    merged = []
    for inst in dataset:
        if inst.label in DEBT_TYPES:
            inst = replace(inst, label=BinaryLabel.SATD)
        merged.append(inst)
    return merged


def only_debt(dataset: Iterable[LabeledInstance]) -> List[LabeledInstance]:
    """Keep instances labelled with one of the four debt types."""
    return [inst for inst in dataset if inst.label in DEBT_TYPES]


def filter_source(dataset: Iterable[LabeledInstance], source: ArtifactSource) -> List[LabeledInstance]:
    return [inst for inst in dataset if inst.source == source]


def class_counts(dataset: Sequence[LabeledInstance]) -> Dict[str, int]:
    """Label name -> count, in order of first appearance of the label enum."""
    counts = Counter(inst.label.value for inst in dataset)
    ordered = [label.value for label in SatdLabel] + [BinaryLabel.SATD.value]
    return {name: counts[name] for name in ordered if counts.get(name)}


def dataset_fingerprint(dataset: Sequence[LabeledInstance]) -> str:
    """SHA-256 over the canonical JSONL serialisation."""
    digest = hashlib.sha256()
    for inst in dataset:
        digest.update(json.dumps(inst.to_record(), ensure_ascii=False).encode('utf-8'))
        digest.update(b'\n')
    return digest.hexdigest()
