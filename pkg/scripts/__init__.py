"""Helper scripts."""

