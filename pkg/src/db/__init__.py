"""SQLite audit store for generation requests and manifest entries."""
