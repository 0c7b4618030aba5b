"""Database migration utilities."""

