"""Logging configuration for CLI runs."""

import logging
from pathlib import Path
from typing import Any, Dict, Optional

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(config: Optional[Dict[str, Any]] = None) -> None:
    """Configure root logging from the `logging` config section."""
    section = (config or {}).get('logging', {})
    handlers = []

    log_file = section.get('file')
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file))
    if section.get('console', True):
        handlers.append(logging.StreamHandler())

    logging.basicConfig(
        level=getattr(logging, str(section.get('level', 'INFO')).upper(), logging.INFO),
        format=LOG_FORMAT,
        handlers=handlers or [logging.NullHandler()],
        force=True,
    )
