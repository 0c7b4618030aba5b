"""Test suite for the SATD augmentation pipeline."""
