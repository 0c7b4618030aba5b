"""Dataset file reading and writing (CSV and JSONL)."""

import csv
import json
import logging
import re
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import pandas as pd

from src.corpus.schema import ArtifactSource, LabeledInstance, parse_label
from src.errors import DuplicateId, MalformedRow, UnknownLabel

logger = logging.getLogger(__name__)

COLUMNS = ['id', 'source', 'project', 'text', 'label']
FORMATS = ('CSV', 'JSONL')


def _normalize_format(fmt: str, path: Path) -> str:
    if fmt is None:
        fmt = 'JSONL' if path.suffix.lower() in ('.jsonl', '.json') else 'CSV'
    fmt = fmt.upper()
    if fmt not in FORMATS:
        raise ValueError(f"Unsupported dataset format: {fmt}")
    return fmt


def _is_missing(value: Any) -> bool:
    return value is None or (not isinstance(value, str) and pd.isna(value))


def _row_to_instance(row: Dict[str, Any], row_index: int) -> LabeledInstance:
    """Validate one raw row and build the instance."""
    missing = [col for col in COLUMNS if col not in row]
    if missing:
        raise MalformedRow(row_index, f"missing fields {missing}")

    values = {col: '' if _is_missing(row[col]) else str(row[col]) for col in COLUMNS}
    if not values['id'].strip():
        raise MalformedRow(row_index, "empty id")
    if not values['text'].strip():
        raise MalformedRow(row_index, "empty text")
    try:
        source = ArtifactSource(values['source'].strip().upper())
    except ValueError:
        raise MalformedRow(row_index, f"unknown source {values['source']!r}")
    try:
        label = parse_label(values['label'])
    except UnknownLabel as e:
        raise UnknownLabel(f"Row {row_index}: {e}") from e

    return LabeledInstance(
        id=values['id'],
        source=source,
        project=values['project'],
        text=values['text'],
        label=label,
    )


def _read_csv_rows(path: Path) -> List[Dict[str, Any]]:
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, na_filter=False)
    except pd.errors.EmptyDataError:
        logger.warning(f"{path} is empty, returning empty dataset")
        return []
    except pd.errors.ParserError as e:
        # pandas reports 1-based file lines, line 1 being the header
        match = re.search(r'line (\d+)', str(e))
        row_index = int(match.group(1)) - 2 if match else -1
        raise MalformedRow(row_index, str(e)) from e

    missing = [col for col in COLUMNS if col not in frame.columns]
    if missing:
        raise MalformedRow(-1, f"header lacks columns {missing}")
    return frame[COLUMNS].to_dict(orient='records')


def _read_jsonl_rows(path: Path) -> List[Dict[str, Any]]:
    rows = []
    with open(path, 'r', encoding='utf-8') as f:
        for row_index, line in enumerate(f):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise MalformedRow(row_index, f"invalid JSON: {e}") from e
            if not isinstance(record, dict):
                raise MalformedRow(row_index, "JSONL row is not an object")
            rows.append(record)
    return rows


def load_dataset(path: Union[str, Path], format: str = None) -> List[LabeledInstance]:
    """Load a labelled dataset, preserving file order.

    Args:
        path: Dataset file
        format: 'CSV' or 'JSONL' (default: guessed from suffix)

    Returns:
        List of instances

    Raises:
        MalformedRow, UnknownLabel, DuplicateId
    """
    path = Path(path)
    fmt = _normalize_format(format, path)
    rows = _read_csv_rows(path) if fmt == 'CSV' else _read_jsonl_rows(path)

    dataset = []
    seen = set()
    for row_index, row in enumerate(rows):
        inst = _row_to_instance(row, row_index)
        if inst.id in seen:
            raise DuplicateId(f"Duplicate id {inst.id!r} at row {row_index}")
        seen.add(inst.id)
        dataset.append(inst)

    logger.info(f"Loaded {len(dataset)} instances from {path}")
    return dataset


def write_dataset(
    dataset: Sequence[LabeledInstance],
    path: Union[str, Path],
    format: str = None,
) -> Path:
    """Write a dataset in the same layout load_dataset reads."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fmt = _normalize_format(format, path)
    records = [inst.to_record() for inst in dataset]

    if fmt == 'CSV':
        frame = pd.DataFrame(records, columns=COLUMNS)
        frame.to_csv(path, index=False, quoting=csv.QUOTE_MINIMAL, lineterminator='\n')
    else:
        write_jsonl(records, path)
    return path


def write_jsonl(records: Sequence[Dict[str, Any]], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        for record in records:
            f.write(json.dumps(record, ensure_ascii=False))
            f.write('\n')
    return path
