"""Single source of truth for the orbitlab version."""

__version__ = "0.4.0"
