"""Append-only run manifest (manifest.json in the output directory)."""

import hashlib
import json
import logging
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

from src import __version__

logger = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.json'
SCHEMA_VERSION = 1
COMPLETE = 'complete'
INCOMPLETE = 'incomplete'


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def config_run_id(config: Dict[str, Any]) -> str:
    """Stable id of an effective config; equal configs share a run id."""
    canonical = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()[:16]


class RunManifest:
    """Records every stage of a run; existing entries are never rewritten."""

    def __init__(self, out_dir, config: Dict[str, Any], seeds: Dict[str, int], audit=None):
        """Open (or create) the manifest in out_dir.

        Args:
            out_dir: Run output directory
            config: Effective config snapshot (after CLI overrides)
            seeds: Master seed and per-stage sub-seeds
            audit: Optional AuditStore mirroring each entry
        """
        self.out_dir = Path(out_dir)
        self.path = self.out_dir / MANIFEST_NAME
        self.config = config
        self.seeds = seeds
        self.audit = audit
        self.run_id = config_run_id(config)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.data = self._load()

    def _load(self) -> Dict[str, Any]:
        if self.path.exists():
            with open(self.path, 'r', encoding='utf-8') as f:
                data = json.load(f)
            if data.get('schema_version') != SCHEMA_VERSION:
                raise ValueError(f"Unsupported manifest schema in {self.path}")
            return data
        return {'schema_version': SCHEMA_VERSION, 'tool_version': __version__, 'runs': [], 'entries': []}

    def _save(self):
        tmp = self.path.with_suffix('.tmp')
        with open(tmp, 'w', encoding='utf-8') as f:
            json.dump(self.data, f, indent=2, sort_keys=True, default=str)
        tmp.replace(self.path)

    @property
    def entries(self) -> List[Dict[str, Any]]:
        return list(self.data['entries'])

    def register_run(self):
        """Append the config snapshot and seeds of this invocation."""
        if any(run['run_id'] == self.run_id for run in self.data['runs']):
            return
        self.data['runs'].append({
            'run_id': self.run_id,
            'tool_version': __version__,
            'config': self.config,
            'seeds': self.seeds,
            'created_at': _now(),
        })
        self._save()

    def latest(self, stage: str, status: str = COMPLETE) -> Optional[Dict[str, Any]]:
        """Most recent entry of a stage with the given status."""
        for entry in reversed(self.data['entries']):
            if entry['stage'] == stage and entry['status'] == status:
                return entry
        return None

    def append(self, entry: Dict[str, Any]):
        self.data['entries'].append(entry)
        self._save()
        if self.audit is not None:
            self.audit.record_manifest_entry(self.run_id, entry['stage'], entry['status'], entry)

    @contextmanager
    def stage(self, name: str):
        """Yield a mutable entry; it is appended as complete, or incomplete on error."""
        entry = {
            'run_id': self.run_id,
            'stage': name,
            'status': INCOMPLETE,
            'started_at': _now(),
            'inputs': {},
            'outputs': {},
            'details': {},
        }
        try:
            yield entry
        except Exception as e:
            entry['error'] = f"{type(e).__name__}: {e}"
            entry['finished_at'] = _now()
            self.append(entry)
            logger.error(f"Stage {name} failed, marked incomplete in {self.path}")
            raise
        entry['status'] = COMPLETE
        entry['finished_at'] = _now()
        self.append(entry)
