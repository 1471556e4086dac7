"""Tests for utils.validators."""

from orbitlab.app_settings import MAX_PRECISION
from orbitlab.core.helpers import get_params_for_command
from orbitlab.utils.validators import (
    validate_file_path,
    validate_params,
    validate_positive,
    validate_precision,
    validate_prime,
)


def test_validate_file_path_rejects_empty_and_null():
    assert validate_file_path("")[0] is False
    assert validate_file_path(None)[0] is False  # type: ignore[arg-type]
    assert validate_file_path("ok\x00.toml")[0] is False
    assert validate_file_path("experiments/dml.toml")[0] is True


def test_validate_precision_bounds():
    assert validate_precision(1)[0] is False
    assert validate_precision(2)[0] is True
    assert validate_precision(MAX_PRECISION)[0] is True
    assert validate_precision(MAX_PRECISION + 1)[0] is False


def test_validate_precision_rejects_non_integers():
    assert validate_precision("40")[0] is False
    assert validate_precision(True)[0] is False
    assert validate_precision(40.0)[0] is False


def test_validate_prime():
    assert validate_prime(7)[0] is True
    ok, msg = validate_prime(9)
    assert ok is False
    assert "not prime" in msg


def test_validate_positive():
    assert validate_positive("length", 0)[0] is False
    assert validate_positive("p_min", 2, minimum=2)[0] is True


def test_validate_params_accepts_defaults():
    params = get_params_for_command("dml", {"point": ["1"], "conditions": ["x - 8"]})
    params["precision"] = 40
    assert validate_params("dml", params) == (True, None)


def test_validate_params_rejects_inverted_prime_range():
    params = get_params_for_command("dml", {"point": ["1"], "conditions": ["x"], "p_min": 11, "p_max": 7})
    ok, msg = validate_params("dml", params)
    assert ok is False
    assert "p_min" in msg


def test_validate_params_rejects_composite_prime():
    params = get_params_for_command("polydisk", {"point": ["0", "0"], "prime": 15})
    assert validate_params("polydisk", params)[0] is False


def test_validate_params_diophantine_needs_all_constants():
    params = get_params_for_command("independence", {"lambda1": "4", "lambda2": "10", "N": 5, "prime": 3})
    ok, msg = validate_params("independence", params)
    assert ok is False
    assert "C, beta and N" in msg
