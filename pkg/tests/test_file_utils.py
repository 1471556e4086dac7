"""Tests for utils.file_utils."""

import json
import math

import pytest
from sympy import Rational

from orbitlab.core.result import ExperimentReport, Provenance
from orbitlab.errors import ManifestError, PreconditionError
from orbitlab.utils.file_utils import (
    export_report,
    load_manifest,
    load_report,
    render_report,
    to_json_safe,
)


def _report():
    prov = Provenance(command="classify", precision=40, seed=1, params={"n_bound": 64})
    return ExperimentReport("classify", {"type": "monomial", "pcf": True}, None, prov)


def test_load_manifest_reads_toml(write_manifest):
    path = write_manifest("""
        command = "classify"

        [map]
        affine = "x^2 - 2"
    """)
    manifest = load_manifest(path)
    assert manifest["command"] == "classify"
    assert manifest["map"] == {"affine": "x^2 - 2"}


def test_load_manifest_missing_file(tmp_path):
    with pytest.raises(PreconditionError):
        load_manifest(str(tmp_path / "absent.toml"))


def test_load_manifest_bad_toml(write_manifest):
    path = write_manifest('command = "classify\n')
    with pytest.raises(ManifestError):
        load_manifest(path)


def test_to_json_safe_converts_exact_values():
    data = {"v": math.inf, "r": Rational(3, 4), "n": Rational(5), "t": (1, 2), 3: None}
    assert to_json_safe(data) == {"v": "inf", "r": "3/4", "n": "5", "t": [1, 2], "3": None}


def test_to_json_safe_uses_to_dict():
    assert to_json_safe([_report().provenance])[0]["seed"] == 1


def test_render_is_sorted_and_newline_terminated():
    text = render_report(_report(), pretty=False)
    assert text.endswith("\n")
    assert text.index('"command"') < text.index('"provenance"') < text.index('"result"')
    assert json.loads(text)["result"]["pcf"] is True


def test_render_is_deterministic():
    assert render_report(_report()) == render_report(_report())


def test_export_report_writes_valid_json(tmp_path):
    out = tmp_path / "reports" / "out.json"
    assert export_report(_report(), str(out)) is True
    data = load_report(str(out))
    assert data["result"]["type"] == "monomial"
    assert ExperimentReport.from_dict(data).provenance.precision == 40
