"""Tests for manifest helpers and the ExperimentRunner."""

import json

import pytest
from sympy import Rational

from orbitlab.core.helpers import (
    build_map,
    get_params_for_command,
    parse_point,
    parse_value,
)
from orbitlab.core.runner import ExperimentRunner
from orbitlab.arith.projdyn import MapSpec
from orbitlab.errors import ManifestError, PreconditionError, UnknownCommandError


# parameters

def test_params_fill_defaults():
    params = get_params_for_command("invariant-curves", {"a_max": 2})
    assert params["a_max"] == 2
    assert params["b_max"] == 6
    assert params["precision"] is None


def test_params_unknown_command():
    with pytest.raises(UnknownCommandError):
        get_params_for_command("scan", {})


def test_params_unknown_key():
    with pytest.raises(ManifestError, match="unknown parameter"):
        get_params_for_command("classify", {"depth": 3})


def test_params_wrong_type():
    with pytest.raises(ManifestError):
        get_params_for_command("classify", {"n_bound": "many"})


def test_params_missing_required():
    with pytest.raises(PreconditionError, match="needs parameter"):
        get_params_for_command("dml", {"point": ["1"]})


def test_orbit_closure_samples_are_optional():
    params = get_params_for_command("orbit-closure", {"point": ["1", "1"]})
    assert params["samples"] is None


# values, points and maps

def test_parse_value_rational():
    assert parse_value("3/4").as_rational() == Rational(3, 4)
    assert parse_value(5).as_rational() == 5


def test_parse_value_root_of():
    v = parse_value({"root_of": "x^2 - 4*x + 1", "near": 3.7})
    assert v.field.degree == 2
    assert not v.is_rational()


def test_parse_value_rejects_garbage():
    with pytest.raises(ManifestError):
        parse_value({"near": 1})


def test_parse_point_shapes():
    p1 = MapSpec.from_affine("x^2")
    assert parse_point(p1, ["inf"]).is_infinite()
    assert parse_point(p1, ["1/2"]).affine_value().as_rational() == Rational(1, 2)
    split = MapSpec.split([MapSpec.from_affine("x^2")] * 2)
    assert parse_point(split, ["1", "inf"]).space == "P1xN"
    with pytest.raises(PreconditionError):
        parse_point(split, ["1"])


def test_build_map_shapes():
    assert build_map({"map": {"affine": "x^2 - 1"}}).degree == 2
    assert build_map({"map": {"split": ["x^2", "x^3"]}}).factor_count == 2
    assert build_map({"map": {"polynomial": ["x^2", "y^2"]}}).space == "P2"


def test_build_map_needs_exactly_one_shape():
    with pytest.raises(ManifestError):
        build_map({"map": {"affine": "x", "split": ["x"]}})
    with pytest.raises(ManifestError):
        build_map({})


def test_build_map_from_spec_file(tmp_path):
    spec = MapSpec.from_affine("x^2 - 2").to_dict()
    (tmp_path / "cheb.json").write_text(json.dumps(spec), encoding="utf-8")
    f = build_map({"map_spec": "cheb.json"}, str(tmp_path))
    assert f.to_dict() == spec


def test_build_map_spec_file_missing(tmp_path):
    with pytest.raises(PreconditionError):
        build_map({"map_spec": "absent.json"}, str(tmp_path))


# runner

def _run(manifest, **kw):
    return ExperimentRunner(**kw).run_manifest(manifest)


def test_runner_classify():
    report = _run({"command": "classify", "map": {"affine": "x^2"}})
    assert report.ok
    assert report.result["type"] == "monomial"
    assert report.result["degree"] == 2
    assert report.provenance.map["space"] == "P1"


def test_runner_unknown_command_exit_code():
    report = _run({"command": "scan", "map": {"affine": "x^2"}})
    assert report.error["kind"] == "unknown_command"
    assert report.exit_code() == 64


def test_runner_unknown_manifest_key():
    report = _run({"command": "classify", "map": {"affine": "x^2"}, "threads": 4})
    assert report.exit_code() == 65


def test_runner_missing_parameter():
    report = _run({"command": "polydisk", "map": {"affine": "2*x"}, "params": {"point": ["0"]}})
    assert report.error["kind"] == "precondition"
    assert report.exit_code() == 2


def test_runner_precision_override_is_recorded():
    manifest = {"command": "fixed-points", "map": {"affine": "x^2"}, "params": {"precision": 30}}
    assert _run(manifest).provenance.precision == 30
    assert _run(manifest, precision=55).provenance.precision == 55


def test_runner_seed_override():
    manifest = {"command": "fixed-points", "map": {"affine": "x^2"}, "params": {"seed": 3}}
    assert _run(manifest).provenance.seed == 3
    assert _run(manifest, seed=11).provenance.seed == 11


def test_runner_dml():
    report = _run({
        "command": "dml",
        "map": {"affine": "2*x"},
        "params": {"point": ["1"], "conditions": ["x - 8"], "n_direct": 60},
    })
    assert report.ok
    assert report.result["hits"] == [3]
    assert report.result["good_prime"]["prime"] == 3


def test_runner_orbit_closure_records_samples():
    report = _run({
        "command": "orbit-closure",
        "map": {"split": ["2*x", "4*x"]},
        "params": {"point": ["1", "1"], "degree": 2},
    })
    assert report.ok
    assert report.result["samples"] == 18
    assert report.result["verdict"] == "closure_candidate"


def test_runner_good_fixed_point_rejects_p1():
    report = _run({"command": "good-fixed-point", "map": {"affine": "x^2"}})
    assert not report.ok
    assert "surfaces" in report.error["message"]


def test_runner_invariant_curves_reports_branch_bound():
    report = _run({
        "command": "invariant-curves",
        "map": {"split": ["x^2", "x^2"]},
        "params": {"a_max": 1, "b_max": 1},
    })
    forms = {c["form"] for c in report.result["curves"]}
    assert "x*y - 1" in forms
    assert "x - y" in forms
    assert report.result["branch_bound"] == 6
