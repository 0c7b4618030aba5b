"""Command-line orchestration of the experiment stages."""
