"""Tests for the rich report summary and per-stage metrics."""

from rich.console import Console

from orbitlab.core.result import ExperimentReport, Provenance
from orbitlab.errors import HenselError
from orbitlab.utils.metrics import RunMetrics
from orbitlab.utils.report import print_report_summary


def _console():
    return Console(record=True, width=120, color_system=None)


def test_summary_shows_headline_keys_only():
    prov = Provenance(command="dml", precision=40, seed=5)
    report = ExperimentReport("dml", {"hits": [3], "prime": 3, "classes": ["long"]}, None, prov)
    con = _console()
    print_report_summary(report, con, use_color=False)
    text = con.export_text()
    assert "hits" in text
    assert "classes" not in text
    assert "precision" in text


def test_verbose_summary_shows_every_key():
    report = ExperimentReport("dml", {"hits": [3], "classes": []})
    con = _console()
    print_report_summary(report, con, use_color=False, verbose=True)
    assert "classes" in con.export_text()


def test_failure_summary():
    report = ExperimentReport.failure("polydisk", HenselError("derivative vanishes mod p"))
    con = _console()
    print_report_summary(report, con, use_color=True)
    text = con.export_text()
    assert "polydisk failed" in text
    assert "hensel_inapplicable" in text


def test_metrics_accumulate_repeated_stages():
    m = RunMetrics()
    with m.stage("arc"):
        pass
    with m.stage("arc"):
        pass
    m.count("primes tried", 2)
    m.finalize()
    summary = m.get_summary()
    assert list(summary["stages"]) == ["arc"]
    assert summary["counters"] == {"primes tried": 2}


def test_metrics_summary_stays_off_stdout(capsys):
    m = RunMetrics()
    with m.stage("parse map"):
        pass
    m.print_summary(use_color=False)
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "Performance Metrics" in captured.err
