"""End-to-end tests for the orbitlab command line."""

import json

import pytest

from orbitlab.core.cli import main


def _exit_code(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    return exc.value.code


DML = """
    command = "dml"

    [map]
    affine = "2*x"

    [params]
    point = ["1"]
    conditions = ["x - 8"]
    n_direct = 60
"""


def test_dml_report_on_stdout(write_manifest, capsys):
    path = write_manifest(DML)
    assert _exit_code(["-m", path, "-s", "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["command"] == "dml"
    assert report["result"]["hits"] == [3]
    assert report["provenance"]["precision"] == 40


def test_reports_are_byte_identical(write_manifest, tmp_path):
    path = write_manifest(DML)
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert _exit_code(["-m", path, "-s", "-o", str(first)]) == 0
    assert _exit_code(["-m", path, "-s", "-o", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_manifest_output_key(write_manifest, tmp_path):
    path = write_manifest("""
        command = "classify"
        output = "reports/classify.json"

        [map]
        affine = "x^2 - 2"
    """)
    assert _exit_code(["-m", path, "-s"]) == 0
    report = json.loads((tmp_path / "reports" / "classify.json").read_text(encoding="utf-8"))
    assert report["result"]["type"] == "monomial"
    assert report["result"]["subtype"] == "chebyshev"


def test_precision_flag_wins(write_manifest, capsys):
    path = write_manifest("""
        command = "fixed-points"

        [map]
        affine = "x^2"

        [params]
        precision = 30
    """)
    assert _exit_code(["-m", path, "-s", "--precision", "60"]) == 0
    assert json.loads(capsys.readouterr().out)["provenance"]["precision"] == 60


def test_unknown_command_exits_64(write_manifest, capsys):
    path = write_manifest("""
        command = "scan"

        [map]
        affine = "x^2"
    """)
    assert _exit_code(["-m", path, "-s"]) == 64
    assert json.loads(capsys.readouterr().out)["error"]["kind"] == "unknown_command"


def test_bad_toml_exits_65(write_manifest, capsys):
    path = write_manifest('command = "dml\n')
    assert _exit_code(["-m", path, "-s"]) == 65
    assert json.loads(capsys.readouterr().out)["error"]["kind"] == "malformed_spec"


def test_insufficient_sample_exits_2(write_manifest, capsys):
    path = write_manifest("""
        command = "orbit-closure"

        [map]
        split = ["2*x", "3*x"]

        [params]
        point = ["1", "1"]
        degree = 2
        samples = 9
    """)
    assert _exit_code(["-m", path, "-s"]) == 2
    error = json.loads(capsys.readouterr().out)["error"]
    assert error["kind"] == "precondition"
    assert "insufficient sample" in error["message"]


def test_missing_manifest_exits_2(tmp_path):
    assert _exit_code(["-m", str(tmp_path / "absent.toml"), "-s"]) == 2


def test_verbose_and_silent_conflict(write_manifest):
    path = write_manifest(DML)
    assert _exit_code(["-m", path, "-s", "-v"]) == 2


def test_invalid_precision_flag(write_manifest):
    path = write_manifest(DML)
    assert _exit_code(["-m", path, "-s", "--precision", "1"]) == 2
