"""
Experiment orchestration: manifest in, report out.

The runner validates a manifest against the command table, builds the map
and points it names, dispatches to the arithmetic modules and wraps the
outcome (or the domain error) into an ExperimentReport.
"""

import random
from typing import Any, Callable, Dict, Optional

from orbitlab.app_settings import DEFAULT_SEED, resolve_precision
from orbitlab.arith.classify import classify_type, exceptional_points
from orbitlab.arith.localdyn import (
    build_arc,
    dml_decide,
    find_good_prime,
    invariant_polydisk,
)
from orbitlab.arith.projdyn import MapSpec, fixed_points, parse_map_expr, preimage_chain
from orbitlab.arith.tate import (
    PolydiskMap,
    TateSeries2,
    attractor_psi,
    contraction_constants,
    rho_f_seminorm,
)
from orbitlab.arith.zdo import (
    AdelicRegion,
    adelic_member,
    branch_bound,
    good_fixed_point,
    invariant_curve_search,
    multiplicative_independence,
    orbit_closure,
    r_property,
    split_invariant_structure,
    verify_diophantine,
)
from orbitlab.core.config import COMMANDS, MANIFEST_KEYS
from orbitlab.core.helpers import (
    build_map,
    get_params_for_command,
    parse_point,
    parse_value,
    parse_values,
)
from orbitlab.core.result import ExperimentReport, Provenance
from orbitlab.errors import ManifestError, OrbitlabError, PreconditionError
from orbitlab.utils.file_utils import to_json_safe
from orbitlab.utils.logger import get_logger
from orbitlab.utils.metrics import RunMetrics
from orbitlab.utils.validators import validate_params

log = get_logger('runner')


class ExperimentRunner:
    """Runs one manifest per call; flags given here override the manifest."""

    def __init__(self, precision: Optional[int] = None, seed: Optional[int] = None,
                 metrics: Optional[RunMetrics] = None):
        self.precision = precision
        self.seed = seed
        self.metrics = metrics or RunMetrics()
        self._handlers: Dict[str, Callable[[Optional[MapSpec], Dict[str, Any], int], dict]] = {
            "classify": self._classify,
            "fixed-points": self._fixed_points,
            "orbit-closure": self._orbit_closure,
            "dml": self._dml,
            "polydisk": self._polydisk,
            "attractor": self._attractor,
            "adelic": self._adelic,
            "independence": self._independence,
            "good-fixed-point": self._good_fixed_point,
            "invariant-curves": self._invariant_curves,
            "split-structure": self._split_structure,
            "preimage-chain": self._preimage_chain,
        }

    def run_manifest(self, manifest: Dict[str, Any], base_dir: str = ".") -> ExperimentReport:
        """
        Run an experiment manifest.

        Args:
            manifest: Parsed TOML manifest
            base_dir: Directory that relative map_spec paths start from

        Returns:
            ExperimentReport holding either the result or the error object
        """
        command = manifest.get("command")
        provenance = None
        try:
            if not isinstance(command, str):
                raise ManifestError("manifest needs a string 'command'")
            unknown = sorted(set(manifest) - set(MANIFEST_KEYS))
            if unknown:
                raise ManifestError(f"unknown manifest key(s): {', '.join(unknown)}")

            params = get_params_for_command(command, manifest.get("params"))
            precision = resolve_precision(self.precision if self.precision is not None
                                          else params.get("precision"))
            seed = self.seed if self.seed is not None else (params.get("seed") or DEFAULT_SEED)
            params["precision"], params["seed"] = precision, seed

            ok, msg = validate_params(command, params)
            if not ok:
                raise PreconditionError(msg)

            f = None
            if COMMANDS[command]["needs_map"]:
                with self.metrics.stage("parse map"):
                    f = build_map(manifest, base_dir)
            provenance = Provenance(
                command=command, precision=precision, seed=seed,
                params=to_json_safe({k: v for k, v in params.items() if k not in ("precision", "seed")}),
                map=f.to_dict() if f is not None else None,
            )

            random.seed(seed)
            log.info(f"running {command} at precision {precision}")
            with self.metrics.stage(command):
                result = self._handlers[command](f, params, precision)
            return ExperimentReport(command, to_json_safe(result), None, provenance)
        except OrbitlabError as e:
            log.error(f"{command}: {e}")
            return ExperimentReport.failure(command or "", e, provenance)

    # ─── Handlers ────────────────────────────────────────────────────────

    def _classify(self, f, params, precision):
        if f.space != "P1":
            raise PreconditionError("classification needs a map of P1")
        verdict = classify_type(f, params["n_bound"])
        data = verdict.to_dict()
        data["degree"] = f.degree
        data["exceptional_points"] = exceptional_points(f).to_dict()
        return data

    def _fixed_points(self, f, params, precision):
        fps = fixed_points(f)
        return {"count": len(fps), "fixed_points": [fp.to_dict() for fp in fps]}

    def _orbit_closure(self, f, params, precision):
        x = parse_point(f, params["point"])
        D = params["degree"]
        samples = params["samples"]
        if samples is None:
            width = 2 if f.space == "P2" else f.factor_count
            samples = 2 * (D + 1) ** width
        self.metrics.count("orbit points", samples)
        report = orbit_closure(f, x, D, samples, params["height_bits_cap"])
        data = report.to_dict()
        data["samples"] = samples
        return data

    def _dml(self, f, params, precision):
        x = parse_point(f, params["point"])
        with self.metrics.stage("good prime"):
            good = find_good_prime(f, x, params["p_min"], params["p_max"], params["m_max"])
        self.metrics.count("primes tried", len(good.failures) + 1)
        with self.metrics.stage("arc"):
            arc = build_arc(f, good, x, params["truncation"], precision, params["m_max"])
        with self.metrics.stage("return times"):
            verdict = dml_decide(f, x, params["conditions"], arc, params["n_direct"])
        data = verdict.to_dict()
        data["good_prime"] = good.to_dict()
        data["arc"] = arc.to_dict()
        return data

    def _polydisk(self, f, params, precision):
        point = parse_point(f, params["point"])
        result = invariant_polydisk(f, point, params["prime"], precision, params["truncation"])
        return result.to_dict()

    def _attractor(self, f, params, precision):
        p, T = params["prime"], params["truncation"]
        P = TateSeries2.from_poly(parse_map_expr(params["P"]), p, T, precision)
        Q = TateSeries2.from_poly(parse_map_expr(params["Q"]), p, T, precision)
        g = PolydiskMap.fixed_line(P, Q)
        vb, m = contraction_constants(g)
        data = attractor_psi(g)
        rho = rho_f_seminorm(g, data.generator, params["rho_steps"])
        return {
            "map": g.to_dict(),
            "contraction": {"b_valuation": vb, "m": m},
            "attractor": data.to_dict(),
            "rho_generator": rho.to_dict(),
        }

    def _adelic(self, f, params, precision):
        x = parse_values(params["point"])
        region = AdelicRegion.from_dict(params["region"])
        membership = adelic_member(x, region, params["eps"])
        data = membership.to_dict()
        data["region"] = region.to_dict()
        return data

    def _independence(self, f, params, precision):
        l1, l2 = parse_value(params["lambda1"]), parse_value(params["lambda2"])
        data = {"independence": multiplicative_independence(l1, l2, params["bound"]).to_dict()}
        if params["N"]:
            if not (l1.is_rational() and l2.is_rational()):
                raise PreconditionError("the Diophantine check takes rational multipliers")
            if not params["prime"]:
                raise PreconditionError("the Diophantine check needs a prime")
            result = verify_diophantine(l1.as_rational(), l2.as_rational(), params["C"], params["beta"],
                                        params["N"], params["prime"], precision)
            data["diophantine"] = result.to_dict()
        return data

    def _good_fixed_point(self, f, params, precision):
        if f.space == "P1":
            raise PreconditionError("good fixed points are defined on surfaces")
        fps = fixed_points(f)
        entries = []
        for fp in fps:
            entry = {"point": fp.point.to_dict()}
            try:
                entry["verdict"] = good_fixed_point(fp, params["p_max"], params["bound"]).to_dict()
            except PreconditionError as e:
                entry["verdict"] = {"good": False, "reason": str(e), "witness": None, "independence": None}
            entries.append(entry)
        return {"fixed_points": entries, "r_property": r_property(fps, params["eps"]).to_dict()}

    def _invariant_curves(self, f, params, precision):
        curves = invariant_curve_search(f, params["a_max"], params["b_max"])
        return {
            "curves": [c.to_dict() for c in curves],
            "degree": f.degree,
            "branch_bound": branch_bound(f.degree),
        }

    def _split_structure(self, f, params, precision):
        return split_invariant_structure(params["V"], f, params["sample_budget"]).to_dict()

    def _preimage_chain(self, f, params, precision):
        p0 = parse_point(f, params["point"])
        chain = preimage_chain(f, p0, params["length"], params["degree_cap"])
        return chain.to_dict()
