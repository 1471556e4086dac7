"""
Input validation for orbitlab manifests and command-line values.

Validators return ``(is_valid, error_message)`` and never raise; the runner
turns a failed check into a precondition error before dispatch.
"""

from typing import Any, Dict, Optional, Tuple

from sympy import isprime

from orbitlab.app_settings import MAX_PRECISION


def validate_file_path(file_path: str) -> Tuple[bool, Optional[str]]:
    """
    Validate if a file path is safe to use.

    Args:
        file_path: File path to validate

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not file_path or not isinstance(file_path, str):
        return False, "File path must be a non-empty string"

    if '\x00' in file_path:
        return False, "File path contains null bytes"

    if len(file_path) > 4096:
        return False, "File path is too long"

    return True, None


def validate_precision(precision: Any) -> Tuple[bool, Optional[str]]:
    """
    Validate a p-adic working precision M.

    Args:
        precision: Absolute precision, digits mod p^M

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not isinstance(precision, int) or isinstance(precision, bool):
        return False, "Precision must be an integer"

    if precision < 2:
        return False, "Precision is too low (min 2)"

    if precision > MAX_PRECISION:
        return False, f"Precision is too high (max {MAX_PRECISION})"

    return True, None


def validate_prime(p: Any) -> Tuple[bool, Optional[str]]:
    """
    Validate that a value is a rational prime.

    Args:
        p: Candidate prime

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not isinstance(p, int) or isinstance(p, bool):
        return False, "Prime must be an integer"

    if not isprime(p):
        return False, f"{p} is not prime"

    return True, None


def validate_positive(name: str, value: Any, minimum: int = 1) -> Tuple[bool, Optional[str]]:
    if not isinstance(value, int) or isinstance(value, bool):
        return False, f"{name} must be an integer"
    if value < minimum:
        return False, f"{name} must be at least {minimum}"
    return True, None


def validate_params(command: str, params: Dict[str, Any]) -> Tuple[bool, Optional[str]]:
    """
    Check the module preconditions a command can test before dispatch.

    Args:
        command: Command tag
        params: Resolved parameters

    Returns:
        Tuple of (is_valid, error_message)
    """
    if params.get("precision") is not None:
        ok, msg = validate_precision(params["precision"])
        if not ok:
            return ok, msg

    if params.get("prime"):
        ok, msg = validate_prime(params["prime"])
        if not ok:
            return ok, msg

    bounds = {
        "n_bound": 1, "degree": 1, "truncation": 1, "n_direct": 1, "m_max": 1,
        "length": 1, "degree_cap": 1, "a_max": 1, "b_max": 1, "bound": 1,
        "rho_steps": 1, "sample_budget": 1, "p_min": 2, "p_max": 2,
    }
    for name, minimum in bounds.items():
        if params.get(name) is not None:
            ok, msg = validate_positive(name, params[name], minimum)
            if not ok:
                return ok, msg

    if command == "dml" and params["p_min"] > params["p_max"]:
        return False, "p_min must not exceed p_max"

    if command == "independence" and params.get("N") and not (params.get("C") and params.get("beta")):
        return False, "the Diophantine check needs C, beta and N together"

    return True, None
