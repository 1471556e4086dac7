"""Exact, p-adic and dynamical arithmetic."""
