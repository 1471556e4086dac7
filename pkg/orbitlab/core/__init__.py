"""Command-line harness and experiment orchestration."""
