"""Audit store for paraphrase requests and manifest history."""

import json
import logging
import sqlite3
import threading
from pathlib import Path
from typing import Any, Dict, List, Optional

from migrations.init_db import SCHEMA_VERSION, init_database, schema_version

logger = logging.getLogger(__name__)

REDACTED = '[redacted]'


class AuditStore:
    """SQLite store of generation request/response pairs and manifest entries."""

    def __init__(self, db_path: str = "db/audit.sqlite", redact_text: bool = True):
        """Initialize audit store.

        Args:
            db_path: Path to SQLite database file
            redact_text: Store '[redacted]' instead of request/response texts
        """
        self.db_path = db_path
        self.redact_text = redact_text
        # generation runs on worker threads
        self._lock = threading.Lock()
        Path(db_path).parent.mkdir(parents=True, exist_ok=True)
        self._ensure_schema()

    def _ensure_schema(self):
        """Create tables on first use."""
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()
        cursor.execute("""
            SELECT name FROM sqlite_master
            WHERE type='table' AND name='generation_logs'
        """)
        exists = cursor.fetchone() is not None
        conn.close()
        if not exists:
            logger.info(f"Creating audit schema in {self.db_path}")
            init_database(self.db_path)
        elif schema_version(self.db_path) != SCHEMA_VERSION:
            logger.warning(
                f"Audit database {self.db_path} has schema v{schema_version(self.db_path)}, "
                f"expected v{SCHEMA_VERSION}"
            )

    def get_connection(self):
        """Get database connection."""
        conn = sqlite3.connect(self.db_path)
        conn.row_factory = sqlite3.Row  # Return rows as dict-like objects
        return conn

    def log_generation(
        self,
        gateway: str,
        prompt_fingerprint: str,
        attempt: int,
        model: Optional[str] = None,
        status_code: Optional[int] = None,
        latency_ms: Optional[int] = None,
        request_text: Optional[str] = None,
        response_text: Optional[str] = None,
        error_message: Optional[str] = None,
    ) -> int:
        """Log one generation attempt.

        Returns:
            log_id: ID of inserted row
        """
        if self.redact_text:
            request_text = REDACTED if request_text is not None else None
            response_text = REDACTED if response_text is not None else None

        with self._lock:
            conn = self.get_connection()
            cursor = conn.cursor()
            cursor.execute("""
                INSERT INTO generation_logs
                (gateway, model, prompt_fingerprint, attempt, status_code, latency_ms,
                 request_text, response_text, redacted, error_message)
                VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
            """, (gateway, model, prompt_fingerprint, attempt, status_code, latency_ms,
                  request_text, response_text, int(self.redact_text), error_message))
            log_id = cursor.lastrowid
            conn.commit()
            conn.close()
        return log_id

    def record_manifest_entry(self, run_id: str, stage: str, status: str, entry: Dict[str, Any]) -> int:
        """Append a manifest stage entry (rows are never updated or deleted)."""
        with self._lock:
            conn = self.get_connection()
            cursor = conn.cursor()
            cursor.execute("""
                INSERT INTO manifest_entries (run_id, stage, status, entry_json)
                VALUES (?, ?, ?, ?)
            """, (run_id, stage, status, json.dumps(entry, sort_keys=True)))
            entry_id = cursor.lastrowid
            conn.commit()
            conn.close()
        return entry_id

    def get_generation_logs(self, prompt_fingerprint: Optional[str] = None) -> List[Dict[str, Any]]:
        """Fetch logged attempts, optionally for one prompt."""
        conn = self.get_connection()
        cursor = conn.cursor()
        if prompt_fingerprint:
            cursor.execute("""
                SELECT * FROM generation_logs
                WHERE prompt_fingerprint = ?
                ORDER BY log_id
            """, (prompt_fingerprint,))
        else:
            cursor.execute("SELECT * FROM generation_logs ORDER BY log_id")
        rows = [dict(row) for row in cursor.fetchall()]
        conn.close()
        return rows

    def get_manifest_entries(self, run_id: Optional[str] = None) -> List[Dict[str, Any]]:
        conn = self.get_connection()
        cursor = conn.cursor()
        if run_id:
            cursor.execute("SELECT * FROM manifest_entries WHERE run_id = ? ORDER BY entry_id", (run_id,))
        else:
            cursor.execute("SELECT * FROM manifest_entries ORDER BY entry_id")
        rows = [dict(row) for row in cursor.fetchall()]
        conn.close()
        return rows
