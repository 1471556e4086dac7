"""
orbitlab manifest helpers

Resolve per-command parameters against the command table and turn manifest
values (map tables, coordinate lists, algebraic numbers) into arithmetic
objects.
"""

import json
import os
from typing import Any, Dict, List, Optional, Sequence

import mpmath

from orbitlab.arith.exactnum import (
    AlgebraicNumber,
    NumberField,
    X,
    as_poly,
    factor_poly_q,
    rational_number,
    to_rational,
)
from orbitlab.arith.projdyn import MapSpec, ProjPoint, parse_map_expr
from orbitlab.core.config import COMMANDS, COMMON_PARAMS, MAP_KEYS
from orbitlab.errors import ManifestError, PreconditionError, UnknownCommandError

_CASTS = {
    "int": int,
    "float": float,
    "str": str,
}


def get_params_for_command(command: str, raw: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """
    Merge manifest parameters with the command defaults.

    Args:
        command: Command tag from the manifest
        raw: The manifest [params] table

    Returns:
        Dictionary holding every parameter the command accepts

    Raises:
        UnknownCommandError: command is not in the command table
        ManifestError: unknown parameter or a value of the wrong type
        PreconditionError: a required parameter is missing
    """
    if command not in COMMANDS:
        raise UnknownCommandError(f"unknown command {command!r}")
    schema = {**COMMANDS[command]["params"], **COMMON_PARAMS}
    raw = dict(raw or {})
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ManifestError(f"unknown parameter(s) for {command}: {', '.join(unknown)}")

    params = {}
    for name, (kind, default) in schema.items():
        if name not in raw:
            params[name] = default
            continue
        value = raw[name]
        if kind in _CASTS:
            try:
                params[name] = _CASTS[kind](value)
            except (TypeError, ValueError):
                raise ManifestError(f"parameter {name} must be {kind}, got {value!r}")
        elif kind in ("strs", "values"):
            if not isinstance(value, list):
                raise ManifestError(f"parameter {name} must be a list")
            params[name] = value
        elif kind == "table":
            if not isinstance(value, dict):
                raise ManifestError(f"parameter {name} must be a table")
            params[name] = value
        else:
            params[name] = value

    # Commands whose required parameters have no sensible default
    missing = [n for n, (_, default) in COMMANDS[command]["params"].items()
               if default is None and params[n] is None and n != "samples"]
    if missing:
        raise PreconditionError(f"{command} needs parameter(s): {', '.join(missing)}")
    return params


def parse_value(data) -> AlgebraicNumber:
    """
    A coordinate from a manifest: a rational ("3/4", 2), an exact field
    element {"field": ..., "coords": [...]}, or a root selected by a nearby
    complex value {"root_of": "x^2 - 4*x + 1", "near": 3.7}.
    """
    if isinstance(data, AlgebraicNumber):
        return data
    if isinstance(data, dict):
        if "root_of" in data:
            return _root_of(data["root_of"], data.get("near"))
        if "coords" in data:
            return AlgebraicNumber.from_dict(data)
        raise ManifestError(f"cannot read a coordinate from {data!r}")
    try:
        return rational_number(to_rational(data))
    except (TypeError, ValueError, SyntaxError):
        raise ManifestError(f"cannot read a coordinate from {data!r}")


def _root_of(text: str, near) -> AlgebraicNumber:
    mp = as_poly(parse_map_expr(text), X)
    factors = factor_poly_q(mp, None)
    if len(factors) != 1 or factors[0][1] != 1:
        raise PreconditionError(f"{text} is not irreducible over QQ")
    if near is None:
        raise ManifestError("root_of needs a 'near' value")
    if isinstance(near, (list, tuple)):
        approx = mpmath.mpc(float(near[0]), float(near[1]))
    else:
        approx = mpmath.mpf(str(near))
    fld = NumberField.from_root(mp, approx)
    return fld.generator()


def parse_values(data: Sequence) -> List[AlgebraicNumber]:
    return [parse_value(v) for v in data]


def _is_infinity(value) -> bool:
    return isinstance(value, str) and value.strip().lower() in ("inf", "infinity")


def parse_point(f: MapSpec, data: Sequence) -> ProjPoint:
    """
    A point in the space of ``f``: one affine value on P1, two affine or
    three homogeneous values on P2, one value per factor on (P1)^N; "inf"
    stands for the point at infinity of a P1 factor.
    """
    if not isinstance(data, (list, tuple)) or not data:
        raise ManifestError("a point is a non-empty list of coordinates")
    if f.space == "P1":
        if len(data) != 1:
            raise PreconditionError("a point of P1 takes one coordinate")
        return ProjPoint.infinity() if _is_infinity(data[0]) else ProjPoint.affine(parse_value(data[0]))
    if f.space == "P2":
        vals = parse_values(data)
        if len(vals) == 2:
            return ProjPoint.affine(*vals)
        if len(vals) == 3:
            return ProjPoint.make("P2", [vals])
        raise PreconditionError("a point of P2 takes two affine or three homogeneous coordinates")
    if len(data) != f.factor_count:
        raise PreconditionError(f"a point of (P1)^{f.factor_count} takes {f.factor_count} coordinates")
    return ProjPoint.product([None if _is_infinity(v) else parse_value(v) for v in data])


def build_map(manifest: Dict[str, Any], base_dir: str = ".") -> MapSpec:
    """
    Build the MapSpec named by a manifest.

    An inline [map] table takes one of: ``affine`` (a rational function of x),
    ``split`` (a list of such functions, one per P1 factor), ``polynomial``
    (two polynomials in x, y extended to P2) or the JSON MapSpec shape
    (``space`` and ``coeffs``). Otherwise ``map_spec`` names a JSON MapSpec
    file relative to the manifest.

    Raises:
        ManifestError: no map, or a map that cannot be read
    """
    table = manifest.get("map")
    if table is None and manifest.get("map_spec"):
        path = os.path.join(base_dir, manifest["map_spec"])
        if not os.path.isfile(path):
            raise PreconditionError(f"map spec file not found: {manifest['map_spec']}")
        try:
            with open(path, "r", encoding="utf-8") as fh:
                table = json.load(fh)
        except json.JSONDecodeError as e:
            raise ManifestError(f"map spec {manifest['map_spec']} is not valid JSON: {e}")
    if not isinstance(table, dict):
        raise ManifestError("manifest has no [map] table and no map_spec file")

    shapes = [k for k in MAP_KEYS if k in table]
    if len(shapes) != 1:
        raise ManifestError(f"a map takes exactly one of {', '.join(MAP_KEYS)}")
    try:
        if "affine" in table:
            return MapSpec.from_affine(str(table["affine"]))
        if "split" in table:
            return MapSpec.split([MapSpec.from_affine(str(e)) for e in table["split"]])
        if "polynomial" in table:
            e1, e2 = table["polynomial"]
            return MapSpec.polynomial_p2(str(e1), str(e2))
        return MapSpec.from_dict(table)
    except (SyntaxError, TypeError, KeyError) as e:
        raise ManifestError(f"cannot read map: {e}")
