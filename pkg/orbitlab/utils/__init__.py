"""Utility helpers: logging, console output, reports and validation."""
