"""SATD Augment - identification and categorization of self-admitted technical debt."""

__version__ = "0.3.0"
