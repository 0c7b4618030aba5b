#!/usr/bin/env python3
"""Initialize the audit database with schema."""

import os
import sqlite3
from pathlib import Path

SCHEMA_PATH = Path(__file__).parent / "schema.sql"

# bump together with schema.sql
SCHEMA_VERSION = 1


def init_database(db_path: str = "db/audit.sqlite"):
    """Create database, apply schema and stamp its version."""
    parent = os.path.dirname(db_path)
    if parent:
        os.makedirs(parent, exist_ok=True)

    with open(SCHEMA_PATH, 'r') as f:
        schema = f.read()

    conn = sqlite3.connect(db_path)
    conn.executescript(schema)
    conn.execute(f"PRAGMA user_version = {SCHEMA_VERSION}")
    conn.commit()
    conn.close()


def schema_version(db_path: str) -> int:
    conn = sqlite3.connect(db_path)
    version = conn.execute("PRAGMA user_version").fetchone()[0]
    conn.close()
    return version


if __name__ == "__main__":
    import sys
    db_path = sys.argv[1] if len(sys.argv) > 1 else "db/audit.sqlite"
    init_database(db_path)
    print(f"Audit database initialized at {db_path} (schema v{SCHEMA_VERSION})")
