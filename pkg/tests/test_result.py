"""Tests for core.result.ExperimentReport and Provenance."""

from orbitlab.core.result import ExperimentReport, Provenance
from orbitlab.errors import (
    ConvergenceError,
    ManifestError,
    PreconditionError,
    UnknownCommandError,
)


def _prov(**kw):
    base = dict(command="dml", precision=40, seed=7, params={"p_min": 3}, map={"space": "P1"})
    base.update(kw)
    return Provenance(**base)


def test_provenance_roundtrip():
    p = _prov()
    p2 = Provenance.from_dict(p.to_dict())
    assert p2 == p


def test_provenance_omits_missing_map():
    assert "map" not in _prov(map=None).to_dict()


def test_success_report_has_result_and_no_error():
    r = ExperimentReport("dml", {"hits": [3]}, None, _prov())
    d = r.to_dict()
    assert r.ok
    assert r.exit_code() == 0
    assert d["result"] == {"hits": [3]}
    assert "error" not in d


def test_failure_takes_kind_from_exception():
    r = ExperimentReport.failure("attractor", ConvergenceError("psi series did not reach precision"))
    assert r.error == {"kind": "convergence", "message": "psi series did not reach precision"}
    assert "result" not in r.to_dict()


def test_failure_wraps_plain_exceptions_as_precondition():
    r = ExperimentReport.failure("dml", RuntimeError("boom"))
    assert r.error["kind"] == "precondition"


def _code(exc):
    return ExperimentReport.failure("x", exc).exit_code()


def test_exit_codes_per_error_kind():
    assert _code(UnknownCommandError("nope")) == 64
    assert _code(ManifestError("bad toml")) == 65
    assert _code(PreconditionError("p_min > p_max")) == 2
    assert _code(ConvergenceError("slow")) == 2


def test_report_roundtrip():
    r = ExperimentReport("classify", {"type": "monomial"}, None, _prov(command="classify"))
    r2 = ExperimentReport.from_dict(r.to_dict())
    assert r2.command == "classify"
    assert r2.result == {"type": "monomial"}
    assert r2.provenance == r.provenance
