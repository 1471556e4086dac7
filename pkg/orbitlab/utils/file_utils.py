"""
File utilities for orbitlab: manifest loading and report export.
"""

import json
import math
import os
import sys
from typing import Any, Dict

from sympy import Basic, Rational

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from orbitlab.errors import ManifestError, PreconditionError
from orbitlab.utils.logger import logger


def load_manifest(file_path: str) -> Dict[str, Any]:
    """
    Load a TOML experiment manifest.

    Args:
        file_path: Path to the manifest

    Returns:
        The manifest as a dictionary

    Raises:
        PreconditionError: the file does not exist
        ManifestError: the file is not valid TOML
    """
    if not os.path.isfile(file_path):
        raise PreconditionError(f"manifest not found: {file_path}")
    try:
        with open(file_path, 'rb') as f:
            return tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ManifestError(f"manifest {file_path} is not valid TOML: {e}")


def to_json_safe(value: Any) -> Any:
    """
    Recursively convert a report into JSON-native values: exact rationals
    become "num/den" strings, infinite valuations become "inf", tuples
    become lists.
    """
    if isinstance(value, dict):
        return {str(k): to_json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_json_safe(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if hasattr(value, 'to_dict'):
        return to_json_safe(value.to_dict())
    if isinstance(value, Basic):
        if value.is_Rational:
            r = Rational(value)
            return str(r.p) if r.q == 1 else f"{r.p}/{r.q}"
        if value.is_infinite:
            return "inf"
        return str(value)
    return str(value)


def render_report(report: Any, pretty: bool = True) -> str:
    """
    Serialize a report with sorted keys so identical runs give identical bytes.

    Args:
        report: ExperimentReport or dict
        pretty: Indent the output; compact JSON otherwise

    Returns:
        JSON text ending with a newline
    """
    data = report.to_dict() if hasattr(report, 'to_dict') else report
    data = to_json_safe(data)
    if pretty:
        return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    return json.dumps(data, separators=(",", ":"), sort_keys=True, ensure_ascii=False) + "\n"


def export_report(report: Any, output_file: str, pretty: bool = True) -> bool:
    """
    Export a report to a JSON file.

    Args:
        report: Report to export
        output_file: Path to output file
        pretty: Indent the output

    Returns:
        Boolean indicating if export was successful
    """
    try:
        text = render_report(report, pretty)
        out_dir = os.path.dirname(output_file)
        if out_dir:
            os.makedirs(out_dir, exist_ok=True)
        with open(output_file, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        logger.info(f"Report written to {output_file}")
        return True
    except PermissionError:
        logger.error(f"Permission denied when writing to {output_file}")
        return False
    except OSError as e:
        logger.error(f"File system error when writing to {output_file}: {str(e)}")
        return False


def load_report(file_path: str) -> Dict[str, Any]:
    """Read back a JSON report written by export_report."""
    with open(file_path, 'r', encoding='utf-8') as f:
        return json.load(f)
