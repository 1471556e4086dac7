"""
Experiment manifest schema for orbitlab.

This module declares the command table: for each experiment command, the
parameters it accepts, their types and defaults, and whether it needs a map.
Defaults come from app_settings so that one place holds every bound.

Manifests are TOML documents of the form::

    command = "dml"
    output = "reports/dml.json"     # optional
    map_spec = "maps/doubling.json" # optional, JSON MapSpec

    [map]                           # or an inline map
    affine = "2*x"

    [params]
    point = ["1"]
    conditions = ["x - 8"]
"""

from orbitlab.app_settings import (
    BIDEGREE_CAP,
    DEFAULT_RHO_STEPS,
    DEFAULT_TRUNCATION,
    FIELD_DEGREE_CAP,
    GOOD_PRIME_MAX,
    HEIGHT_BITS_CAP,
    INDEPENDENCE_BOUND,
    M_MAX,
    N_BOUND,
    N_DIRECT,
    ROOT_EPSILON,
    T_ARC,
)

# ─── Manifest keys ───────────────────────────────────────────────────────

MANIFEST_KEYS = ("command", "output", "map_spec", "map", "params")

# Inline [map] tables use exactly one of these shapes
MAP_KEYS = ("affine", "split", "polynomial", "coeffs")

# ─── Parameter types ─────────────────────────────────────────────────────
#
# int      - integer
# float    - real number
# str      - expression text
# strs     - list of expression texts
# values   - list of coordinates (rational strings, "inf", or algebraic tables)
# value    - a single coordinate
# table    - nested table passed through as a dict

# ─── Command table ───────────────────────────────────────────────────────

COMMANDS = {
    "classify": {
        "needs_map": True,
        "params": {
            "n_bound": ("int", N_BOUND),
        },
        "description": "Monomial, Lattes or nonexceptional type of a P1 map",
    },
    "fixed-points": {
        "needs_map": True,
        "params": {},
        "description": "Fixed points with their multipliers",
    },
    "orbit-closure": {
        "needs_map": True,
        "params": {
            "point": ("values", None),
            "degree": ("int", 2),
            "samples": ("int", None),
            "height_bits_cap": ("int", HEIGHT_BITS_CAP),
        },
        "description": "Degree-bounded forms vanishing on a forward orbit",
    },
    "dml": {
        "needs_map": True,
        "params": {
            "point": ("values", None),
            "conditions": ("strs", None),
            "p_min": ("int", 3),
            "p_max": ("int", GOOD_PRIME_MAX),
            "truncation": ("int", T_ARC),
            "n_direct": ("int", N_DIRECT),
            "m_max": ("int", M_MAX),
        },
        "description": "Return times of an orbit to a subvariety via p-adic arcs",
    },
    "polydisk": {
        "needs_map": True,
        "params": {
            "point": ("values", None),
            "prime": ("int", None),
            "truncation": ("int", DEFAULT_TRUNCATION),
        },
        "description": "Invariant polydisk around a rational fixed point",
    },
    "attractor": {
        "needs_map": False,
        "params": {
            "prime": ("int", None),
            "P": ("str", None),
            "Q": ("str", None),
            "truncation": ("int", DEFAULT_TRUNCATION),
            "rho_steps": ("int", DEFAULT_RHO_STEPS),
        },
        "description": "Attractor ideal and semiconjugacy of a fixed_line polydisk map",
    },
    "adelic": {
        "needs_map": False,
        "params": {
            "point": ("values", None),
            "region": ("table", None),
            "eps": ("float", ROOT_EPSILON),
        },
        "description": "Membership of an algebraic point in a basic adelic region",
    },
    "independence": {
        "needs_map": False,
        "params": {
            "lambda1": ("value", None),
            "lambda2": ("value", None),
            "bound": ("int", INDEPENDENCE_BOUND),
            "prime": ("int", 0),
            "C": ("str", ""),
            "beta": ("str", ""),
            "N": ("int", 0),
        },
        "description": "Multiplicative relations between two multipliers",
    },
    "good-fixed-point": {
        "needs_map": True,
        "params": {
            "p_max": ("int", GOOD_PRIME_MAX),
            "bound": ("int", INDEPENDENCE_BOUND),
            "eps": ("float", ROOT_EPSILON),
        },
        "description": "Good fixed points and the R-property of a surface map",
    },
    "invariant-curves": {
        "needs_map": True,
        "params": {
            "a_max": ("int", BIDEGREE_CAP),
            "b_max": ("int", BIDEGREE_CAP),
        },
        "description": "Invariant graph curves of a split map on P1 x P1",
    },
    "split-structure": {
        "needs_map": True,
        "params": {
            "V": ("strs", None),
            "sample_budget": ("int", N_BOUND),
        },
        "description": "Invariant-subvariety pair structure for a split map",
    },
    "preimage-chain": {
        "needs_map": True,
        "params": {
            "point": ("values", None),
            "length": ("int", 4),
            "degree_cap": ("int", FIELD_DEGREE_CAP),
        },
        "description": "Field degrees along a chain of backward preimages",
    },
}

# Parameters every command accepts
COMMON_PARAMS = {
    "precision": ("int", None),
    "seed": ("int", None),
}

