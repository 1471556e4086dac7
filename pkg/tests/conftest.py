"""Shared pytest fixtures for orbitlab tests."""

from __future__ import annotations

import os
import sys
import textwrap

import pytest

# Ensure the project root is on sys.path so `import orbitlab.*` works without
# requiring an editable install.
ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), os.pardir))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from orbitlab.arith.exactnum import NumberField, X  # noqa: E402
from orbitlab.arith.projdyn import MapSpec  # noqa: E402


@pytest.fixture
def write_manifest(tmp_path):
    """Write a TOML manifest into a temporary directory and return its path."""
    def _write(text: str, name: str = "experiment.toml") -> str:
        path = tmp_path / name
        path.write_text(textwrap.dedent(text), encoding="utf-8")
        return str(path)
    return _write


@pytest.fixture
def sqrt3_field():
    """QQ(sqrt 3) with the positive real embedding."""
    return NumberField.from_root(X ** 2 - 3, 1.732)


@pytest.fixture
def square_map():
    return MapSpec.from_affine("x^2")


@pytest.fixture
def doubling_map():
    return MapSpec.from_affine("2*x")
