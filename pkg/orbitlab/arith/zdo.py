"""
Zariski-density experiments and the structural criteria around them.

Every verdict here is bounded (degree, bidegree, exponent or prime bounds)
and carries the bounds it used: orbit closures are interpolated in degree
at most D over the field of the sample, invariant curves are interpolated
through backward orbits of fixed points bidegree by bidegree, and
multiplicative relations are searched up to an exponent bound.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
from sympy import (
    Poly, QQ, Rational, Symbol, div, expand, factor_list, factorint, fraction, groebner, symbols,
    together,
)
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from orbitlab.app_settings import (
    BIDEGREE_CAP, CURVE_ANCHOR_CAP, CURVE_ANCHOR_DEPTH, CURVE_DPS, CURVE_NODE_BUDGET, GOOD_PRIME_MAX,
    HEIGHT_BITS_CAP, INDEPENDENCE_BOUND, N_BOUND, ROOT_EPSILON,
)
from orbitlab.arith.classify import classify_type
from orbitlab.arith.exactnum import (
    RATIONALS, AlgebraicNumber, NumberField, X, Y, certified_roots, complex_abs_values, compare_to,
    factor_poly_q, joint_field, rational_number, rational_to_str, to_rational,
)
from orbitlab.arith.localdyn import coordinate_symbols
from orbitlab.arith.padic import INF, PadicElement, places_above
from orbitlab.arith.projdyn import FixedPointData, MapSpec, ProjPoint, evaluate, iterate
from orbitlab.errors import (
    FieldCapError, HypothesisViolatedError, IndeterminateError, PrecisionError, PreconditionError,
)
from orbitlab.utils.logger import get_logger

log = get_logger('zdo')

X0, X1, Y0, Y1 = symbols('X0 X1 Y0 Y1')


# ─── Orbit closures ─────────────────────────────────────────────────────

@dataclass
class ClosureReport:
    degree_bound: int
    sample_size: int
    held_out: int
    forms: List = field(default_factory=list)
    verdict: str = "dense_at_D"
    verified: bool = True
    partial: bool = False
    number_field: Optional[NumberField] = None

    def to_dict(self) -> dict:
        return {
            "D": self.degree_bound,
            "field": None if self.number_field is None or self.number_field.degree == 1
            else self.number_field.to_dict(),
            "Mpts": self.sample_size,
            "held_out": self.held_out,
            "forms": [str(f.as_expr()) for f in self.forms],
            "verdict": self.verdict,
            "verified": self.verified,
            "partial": self.partial,
        }


def _chart_gens(f: MapSpec) -> Tuple[Symbol, ...]:
    if f.space == "P2":
        return (X, Y)
    return coordinate_symbols(f)


def _chart_values(pt: ProjPoint) -> Optional[List[AlgebraicNumber]]:
    """Affine coordinates, or None for points off the standard chart."""
    if pt.space == "P2":
        c = pt.coords
        if c[2].is_zero():
            return None
        inv = c[2].inverse()
        return [c[0] * inv, c[1] * inv]
    vals = [pt.affine_value(i) for i in range(len(pt.factors))]
    return None if any(v is None for v in vals) else vals


def _exponents(f: MapSpec, D: int) -> List[Tuple[int, ...]]:
    n = len(_chart_gens(f))
    if f.space == "P1xN":
        return list(itertools.product(range(D + 1), repeat=n))
    return [e for e in itertools.product(range(D + 1), repeat=n) if sum(e) <= D]


def _monomial_values(fld: NumberField, point: Sequence[AlgebraicNumber],
                     exps: Sequence[Tuple[int, ...]]) -> List[AlgebraicNumber]:
    values = []
    for e in exps:
        v = fld.one()
        for c, k in zip(point, e):
            v = v * c ** k
        values.append(v)
    return values


def _kernel(fld: NumberField, rows: Sequence[Sequence[AlgebraicNumber]], width: int) -> List[List[AlgebraicNumber]]:
    """Basis of the right kernel over K by Gauss-Jordan elimination; one vector per free column."""
    pivots: Dict[int, List[AlgebraicNumber]] = {}
    for row in rows:
        row = list(row)
        for col, prow in pivots.items():
            if not row[col].is_zero():
                c = row[col]
                row = [r - c * q for r, q in zip(row, prow)]
        lead = next((k for k in range(width) if not row[k].is_zero()), None)
        if lead is None:
            continue
        inv = row[lead].inverse()
        row = [r * inv for r in row]
        for col, prow in pivots.items():
            if not prow[lead].is_zero():
                c = prow[lead]
                pivots[col] = [q - c * r for q, r in zip(prow, row)]
        pivots[lead] = row
    basis = []
    for free in range(width):
        if free in pivots:
            continue
        vec = [fld.zero() for _ in range(width)]
        vec[free] = fld.one()
        for col, prow in pivots.items():
            vec[col] = -prow[free]
        basis.append(vec)
    return basis


def _coefficient_expr(c: AlgebraicNumber, gen: Symbol):
    return sum((coef * gen ** i for i, coef in enumerate(c.coords)), Rational(0))


def _form_over(fld: NumberField, vec: Sequence[AlgebraicNumber], exps, gens) -> Poly:
    den = math.lcm(*[int(q.q) for c in vec for q in c.coords])
    gen = Symbol(fld.generator_name)
    expr = sum(_coefficient_expr(c, gen) * den * math.prod(g ** k for g, k in zip(gens, e))
               for c, e in zip(vec, exps))
    if fld.degree == 1:
        return Poly(expr, *gens, domain=QQ)
    return Poly(expand(expr), *gens)


def _orbit_chart_points(f: MapSpec, x: ProjPoint, count: int, cap: int) -> Tuple[List[List[AlgebraicNumber]], bool]:
    pts, cur, partial = [], x, False
    for step in range(count):
        vals = _chart_values(cur)
        if vals is not None:
            pts.append(vals)
        if step == count - 1:
            break
        cur = evaluate(f, cur)
        if cur.height_bits() > cap:
            log.warning(f"orbit exceeds {cap} bits after {step + 1} steps; partial report")
            partial = True
            break
    return pts, partial


def orbit_closure(f: MapSpec, x: ProjPoint, D: int, Mpts: int,
                  height_bits_cap: int = HEIGHT_BITS_CAP) -> ClosureReport:
    """
    Forms of degree at most D (multidegree on (P1)^N) vanishing on the orbit.

    The kernel of the evaluation matrix on the first Mpts orbit points is
    computed exactly over the field K of the orbit's coordinates, so the
    forms have coefficients in K; candidates are re-checked on 2 * Mpts
    further points. An empty kernel means the orbit is dense at degree D.

    Raises:
        PreconditionError: Mpts does not exceed the number of monomials
    """
    exps = _exponents(f, D)
    if Mpts <= len(exps):
        raise PreconditionError(f"insufficient sample: Mpts={Mpts} must exceed the {len(exps)} monomials of degree <= {D}")
    pts, partial = _orbit_chart_points(f, x, 3 * Mpts, height_bits_cap)
    if len(pts) < len(exps):
        raise FieldCapError(f"only {len(pts)} orbit points before the height cap")
    width = len(pts[0])
    fld, flat = _common([c for pt in pts for c in pt])
    pts = [flat[i:i + width] for i in range(0, len(flat), width)]
    train, held = pts[:Mpts], pts[Mpts:]
    if len(train) < len(exps):
        raise FieldCapError(f"only {len(train)} orbit points before the height cap")

    rows = [_monomial_values(fld, pt, exps) for pt in train]
    kernel = _kernel(fld, rows, len(exps))
    verified = True
    if kernel and held:
        full = _kernel(fld, rows + [_monomial_values(fld, pt, exps) for pt in held], len(exps))
        if len(full) != len(kernel):
            log.warning(f"held-out points cut the kernel from {len(kernel)} to {len(full)}")
            verified = False
            kernel = full

    gens = _chart_gens(f)
    forms = [_form_over(fld, vec, exps, gens) for vec in kernel]
    verdict = "closure_candidate" if forms else "dense_at_D"
    log.info(f"orbit closure at D={D} over a degree {fld.degree} field: {verdict} "
             f"({len(forms)} forms, {len(train)}+{len(held)} points)")
    return ClosureReport(D, len(train), len(held), forms, verdict, verified, partial, fld)


# ─── Invariant curves of split pairs ────────────────────────────────────

def _pair(f) -> Tuple[MapSpec, MapSpec]:
    if isinstance(f, MapSpec):
        if f.space != "P1xN" or f.factor_count != 2:
            raise PreconditionError("expected a split map of P1 x P1")
        return f.components
    f1, f2 = f
    return f1, f2


def _as_pair_poly(P) -> Poly:
    if isinstance(P, Poly):
        if len(P.gens) != 2:
            raise PreconditionError("curve forms live in two affine coordinates")
        return Poly(P.as_expr(), *P.gens, domain=QQ)
    return Poly(P, X, Y, domain=QQ)


def _bihomogenize(P: Poly) -> Tuple[object, int, int]:
    a, b = P.degree(P.gens[0]), P.degree(P.gens[1])
    expr = sum(Rational(c) * X0 ** i * X1 ** (a - i) * Y0 ** j * Y1 ** (b - j) for (i, j), c in P.terms())
    return expr, a, b


@dataclass
class CurveCheck:
    invariant: bool
    bidegree: Tuple[int, int]
    cofactor: Optional[object] = None

    def to_dict(self) -> dict:
        return {"invariant": self.invariant, "bidegree": list(self.bidegree),
                "cofactor": None if self.cofactor is None else str(self.cofactor)}


def invariant_curve_check(P, f) -> CurveCheck:
    """
    Whether the curve P = 0 of P1 x P1 satisfies f(C) = C: the pullback
    P(f1(x), f2(y)) of the bihomogenized form must be divisible by P.

    Args:
        P: polynomial in two affine coordinates (first goes with f1)
        f: split map with two factors, or a pair of P1 maps
    """
    f1, f2 = _pair(f)
    poly = _as_pair_poly(P)
    if poly.is_zero:
        raise PreconditionError("the zero form does not define a curve")
    H, a, b = _bihomogenize(poly)
    sub = {
        X0: f1.forms[0].as_expr().subs({X: X0, Y: X1}, simultaneous=True),
        X1: f1.forms[1].as_expr().subs({X: X0, Y: X1}, simultaneous=True),
        Y0: f2.forms[0].as_expr().subs({X: Y0, Y: Y1}, simultaneous=True),
        Y1: f2.forms[1].as_expr().subs({X: Y0, Y: Y1}, simultaneous=True),
    }
    pulled = expand(H.subs(sub, simultaneous=True))
    q, r = div(pulled, H, X0, X1, Y0, Y1, domain=QQ)
    if r != 0:
        return CurveCheck(False, (a, b))
    return CurveCheck(True, (a, b), expand(q))


@dataclass
class InvariantCurve:
    form: Poly
    bidegree: Tuple[int, int]
    restriction_degree: int
    cofactor: object = None

    def to_dict(self) -> dict:
        return {"form": str(self.form.as_expr()), "bidegree": list(self.bidegree),
                "restriction_degree": self.restriction_degree}


def restriction_degree(P, f) -> int:
    """
    deg(f|C) for an irreducible invariant curve: the first projection
    intertwines f|C with f1, so the degree is d1 unless C is a vertical
    fiber, where it is d2.
    """
    f1, f2 = _pair(f)
    poly = _as_pair_poly(P)
    return f1.degree if poly.degree(poly.gens[1]) > 0 else f2.degree


def branch_bound(d_f: int) -> int:
    """floor(d_f + 2 sqrt(d_f) + 1) + 1."""
    return d_f + 1 + math.isqrt(4 * d_f) + 1


# Interpolation anchors: fixed points of a factor and their backward orbits,
# as numeric points [z0 : z1] of P1 scaled so that max(|z0|, |z1|) = 1.

@dataclass
class _Anchor:
    point: Tuple
    image: int
    depth: int


def _mp(c) -> mpmath.mpf:
    c = Rational(c)
    return mpmath.mpf(int(c.p)) / int(c.q)


def _scaled(z0, z1) -> Tuple:
    if abs(z0) > abs(z1):
        return (mpmath.mpc(1), z1 / z0)
    return (z0 / z1, mpmath.mpc(1))


def _apply(g: MapSpec, point: Tuple) -> Tuple:
    z0, z1 = point
    num, den = ([(_mp(c), i, j) for (i, j), c in F.terms()] for F in g.forms)
    return _scaled(mpmath.fsum(c * z0 ** i * z1 ** j for c, i, j in num),
                   mpmath.fsum(c * z0 ** i * z1 ** j for c, i, j in den))


def _nearest(anchors: Sequence[_Anchor], point: Tuple) -> Tuple[int, mpmath.mpf]:
    dists = [abs(point[0] * a.point[1] - point[1] * a.point[0]) for a in anchors]
    k = min(range(len(anchors)), key=lambda i: dists[i])
    return k, dists[k]


def _anchor_tree(g: MapSpec, depth: int = CURVE_ANCHOR_DEPTH, cap: int = CURVE_ANCHOR_CAP) -> List[_Anchor]:
    """
    Fixed points of g, then for each layer up to ``depth`` the preimages of
    the previous layer that are new, each pointing at its image.
    """
    F0, F1 = g.forms
    fix = Y * F0.as_expr() - X * F1.as_expr()
    tol = mpmath.mpf(10) ** (-(CURVE_DPS // 2))
    anchors: List[_Anchor] = []
    for layer in range(depth + 1):
        H = fix
        if layer:
            G0, G1 = iterate(g, layer).forms
            H = fix.subs({X: G0.as_expr(), Y: G1.as_expr()}, simultaneous=True)
        H = Poly(expand(H), X, Y, domain=QQ)
        h = Poly(H.as_expr().subs(Y, 1), X, domain=QQ)
        points = []
        if h.degree() < H.total_degree():
            points.append((mpmath.mpc(1), mpmath.mpc(0)))
        sqf = h.sqf_part()
        if sqf.degree() > 0:
            points += [_scaled(mpmath.mpc(z), mpmath.mpc(1)) for z, _ in certified_roots(sqf)]
        for pt in points:
            if anchors and _nearest(anchors, pt)[1] < tol:
                continue
            if len(anchors) >= cap:
                log.debug(f"anchor cap {cap} reached at layer {layer}")
                return anchors
            if layer == 0:
                anchors.append(_Anchor(pt, len(anchors), 0))
            else:
                image, dist = _nearest(anchors, _apply(g, pt))
                if dist > tol:
                    log.debug(f"layer {layer} point has no anchored image, dropped")
                    continue
                anchors.append(_Anchor(pt, image, layer))
    return anchors


class _Echelon:
    """Reduced row echelon form over C, grown one row at a time."""

    def __init__(self, width: int, tol):
        self.width = width
        self.tol = tol
        self.rows: Dict[int, list] = {}

    def copy(self) -> "_Echelon":
        other = _Echelon(self.width, self.tol)
        other.rows = {k: list(v) for k, v in self.rows.items()}
        return other

    @property
    def nullity(self) -> int:
        return self.width - len(self.rows)

    def add(self, row: Sequence) -> None:
        row = list(row)
        for col, prow in self.rows.items():
            c = row[col]
            if c != 0:
                row = [r - c * q for r, q in zip(row, prow)]
        lead = max(range(self.width), key=lambda k: abs(row[k]))
        if abs(row[lead]) <= self.tol:
            return
        inv = 1 / row[lead]
        row = [r * inv for r in row]
        row[lead] = mpmath.mpc(1)
        for col, prow in self.rows.items():
            c = prow[lead]
            if c != 0:
                self.rows[col] = [q - c * r for q, r in zip(prow, row)]
        self.rows[lead] = row

    def null_vector(self) -> list:
        free = next(k for k in range(self.width) if k not in self.rows)
        vec = [mpmath.mpc(0)] * self.width
        vec[free] = mpmath.mpc(1)
        for col, prow in self.rows.items():
            vec[col] = -prow[free]
        return vec


def _row(xpt: Tuple, ypt: Tuple, exps: Sequence[Tuple[int, int]], a: int, b: int) -> list:
    return [xpt[0] ** i * xpt[1] ** (a - i) * ypt[0] ** j * ypt[1] ** (b - j) for i, j in exps]


def _rational_form(vec: Sequence, exps: Sequence[Tuple[int, int]], tol) -> Optional[Poly]:
    """The form with this coefficient vector, if its coefficients are rational up to scaling."""
    big = max(vec, key=abs)
    scale = 10 ** (CURVE_DPS // 2)
    expr = Rational(0)
    for v, (i, j) in zip(vec, exps):
        w = v / big
        if abs(w.imag) > tol:
            return None
        if abs(w.real) <= tol:
            continue
        r = Rational(int(mpmath.nint(w.real * scale)), scale).limit_denominator(10 ** 6)
        if abs(w.real - _mp(r)) > tol:
            return None
        expr += r * X ** i * Y ** j
    poly = Poly(expr, X, Y, domain=QQ)
    if poly.is_zero:
        return None
    return poly.monic().clear_denoms()[1]


def _form_key(poly: Poly) -> tuple:
    return tuple(sorted((m, Rational(c)) for m, c in poly.monic().terms()))


def _interpolate(base: Sequence[_Anchor], fiber: Sequence[_Anchor], a: int, b: int,
                 swapped: bool, budget: int) -> Tuple[List[Poly], bool]:
    """
    Forms of bidegree (a, b) through anchor points, one fiber assignment at
    a time: over each base anchor the curve meets a set of fiber anchors of
    size at most its fiber degree, stable under the fiber map over a fixed
    base anchor and mapped into the parent's set otherwise. A branch stops
    once the conditions leave a one-dimensional kernel.
    """
    exps = [(i, j) for i in range(a + 1) for j in range(b + 1)]
    per_base, per_fiber = (a, b) if swapped else (b, a)
    tol = mpmath.mpf(10) ** (-(CURVE_DPS // 2))

    def row(i: int, j: int) -> list:
        if swapped:
            return _row(fiber[j].point, base[i].point, exps, a, b)
        return _row(base[i].point, fiber[j].point, exps, a, b)

    stable = [()] if per_base >= 2 else []
    for k in range(1, per_base + 1):
        for combo in itertools.combinations(range(len(fiber)), k):
            if all(fiber[j].image in combo for j in combo):
                stable.append(combo)
    stable.sort(key=len, reverse=True)

    chosen: List[tuple] = [()] * len(base)
    counts = [0] * len(fiber)
    found: List[Poly] = []
    seen = set()
    state = {"nodes": 0, "truncated": False}

    def choices(i: int) -> List[tuple]:
        parent = base[i].image
        if parent == i:
            return stable
        allowed = [j for j, anc in enumerate(fiber) if anc.image in chosen[parent]]
        return [c for k in range(min(per_base, len(allowed)), -1, -1)
                for c in itertools.combinations(allowed, k)]

    def consistent(vec: list) -> bool:
        # the zero set of a candidate is forward closed on the anchor grid
        for i in range(len(base)):
            for j in range(len(fiber)):
                if abs(mpmath.fdot(row(i, j), vec)) <= tol:
                    if abs(mpmath.fdot(row(base[i].image, fiber[j].image), vec)) > tol:
                        return False
        return True

    def visit(i: int, ech: _Echelon) -> None:
        if i == len(base):
            return
        for choice in choices(i):
            if state["nodes"] >= budget:
                state["truncated"] = True
                return
            state["nodes"] += 1
            if any(counts[j] >= per_fiber for j in choice):
                continue
            nxt = ech.copy()
            for j in choice:
                nxt.add(row(i, j))
            if nxt.nullity == 0:
                continue
            chosen[i] = choice
            for j in choice:
                counts[j] += 1
            if nxt.nullity == 1:
                vec = nxt.null_vector()
                form = _rational_form(vec, exps, tol) if consistent(vec) else None
                if form is not None and _form_key(form) not in seen:
                    seen.add(_form_key(form))
                    found.append(form)
            else:
                visit(i + 1, nxt)
            for j in choice:
                counts[j] -= 1
            chosen[i] = ()

    visit(0, _Echelon(len(exps), tol))
    log.debug(f"bidegree ({a}, {b}): {state['nodes']} assignments, {len(found)} rational candidates")
    return found, state["truncated"]


def _fix_factors(g: MapSpec) -> List[Poly]:
    F0, F1 = g.forms
    fix = Poly((Y * F0.as_expr() - X * F1.as_expr()).subs(Y, 1), X, domain=QQ)
    if fix.is_zero:
        return []
    return [fac for fac, _ in factor_poly_q(fix, None)]


def invariant_curve_search(f, a_max: int = BIDEGREE_CAP, b_max: int = BIDEGREE_CAP,
                           depth: int = CURVE_ANCHOR_DEPTH, budget: int = CURVE_NODE_BUDGET) -> List[InvariantCurve]:
    """
    Irreducible invariant curves of a split pair through its fixed points,
    for every bidegree (a, b) with a <= a_max and b <= b_max.

    Fibers x = const come from the irreducible factors of the fixed-point
    polynomial of f1 (and likewise for f2). Any other invariant curve has
    deg f1 = deg f|C = deg f2, and its forms are interpolated through the
    fixed points of f1 x f2 and their backward orbits (``depth`` layers).
    Every candidate is certified by invariant_curve_check.

    Args:
        f: split map with two factors, or a pair of P1 maps
        a_max: bound on the degree in the first coordinate
        b_max: bound on the degree in the second coordinate
        depth: backward layers above the fixed points used as anchors
        budget: fiber assignments tried per bidegree before giving up on it

    Returns:
        Certified curves, fibers first, then by increasing a + b
    """
    f1, f2 = _pair(f)
    found: List[InvariantCurve] = []
    seen = set()

    def keep(form: Poly) -> None:
        key = _form_key(form)
        if key in seen:
            return
        check = invariant_curve_check(form, (f1, f2))
        if not check.invariant:
            return
        seen.add(key)
        found.append(InvariantCurve(form, check.bidegree, restriction_degree(form, (f1, f2)), check.cofactor))

    for fac in _fix_factors(f1):
        if fac.degree() <= a_max:
            keep(Poly(fac.as_expr(), X, Y, domain=QQ))
    for fac in _fix_factors(f2):
        if fac.degree() <= b_max:
            keep(Poly(fac.as_expr().subs(X, Y), X, Y, domain=QQ))

    if f1.degree != f2.degree:
        log.info(f"factor degrees {f1.degree}, {f2.degree}: only fibers can be invariant")
    elif f1.degree < 2:
        log.info("interpolation anchors need factors of degree >= 2; fibers only")
    else:
        with mpmath.workdps(CURVE_DPS):
            anchors = (_anchor_tree(f1, depth), _anchor_tree(f2, depth))
            grid = sorted(((a, b) for a in range(1, a_max + 1) for b in range(1, b_max + 1)),
                          key=lambda ab: (sum(ab), ab))
            for a, b in grid:
                swapped = a < b
                base, fiber = (anchors[1], anchors[0]) if swapped else anchors
                candidates, truncated = _interpolate(base, fiber, a, b, swapped, budget)
                if truncated:
                    log.warning(f"bidegree ({a}, {b}): assignment budget {budget} exhausted, scan incomplete")
                for form in candidates:
                    if form.degree(X) != a or form.degree(Y) != b:
                        continue
                    factors = factor_list(form.as_expr(), X, Y)[1]
                    if len(factors) == 1 and factors[0][1] == 1:
                        keep(form)
    log.info(f"{len(found)} invariant curve(s) within bidegree ({a_max}, {b_max})")
    return found


def branch_incidences(curves: Sequence[InvariantCurve], point: Tuple) -> int:
    """How many of the given curves pass through an affine point (x, y)."""
    x, y = (to_rational(v) for v in point)
    return sum(1 for c in curves if c.form.as_expr().subs({X: x, Y: y}, simultaneous=True) == 0)


# ─── Multiplicative independence ────────────────────────────────────────

@dataclass
class MultiplierPair:
    lambda1: AlgebraicNumber
    lambda2: AlgebraicNumber
    bound: int
    relation: Optional[Tuple[int, int]] = None
    constraints: List[dict] = field(default_factory=list)

    @property
    def independent(self) -> bool:
        return self.relation is None

    def to_dict(self) -> dict:
        return {
            "lambda1": repr(self.lambda1),
            "lambda2": repr(self.lambda2),
            "bound": self.bound,
            "relation": None if self.relation is None else list(self.relation),
            "verdict": f"independent up to {self.bound}" if self.relation is None else "dependent",
            "constraints": self.constraints,
        }


def _common(values: Sequence[AlgebraicNumber]) -> Tuple[NumberField, List[AlgebraicNumber]]:
    """One field holding every value; rationals are promoted into it."""
    fields = []
    for v in values:
        if v.field.degree > 1 and v.field not in fields:
            fields.append(v.field)
    if not fields:
        return RATIONALS, [rational_number(v.as_rational()) for v in values]
    if len(fields) == 1:
        fld = fields[0]
        return fld, [v if v.field.degree > 1 else fld.rational(v.as_rational()) for v in values]
    return joint_field(list(values))


def _power(a: AlgebraicNumber, m: int) -> AlgebraicNumber:
    return a ** m if m >= 0 else a.inverse() ** (-m)


def _norm_primes(values: Sequence[AlgebraicNumber]) -> List[int]:
    primes = set()
    for v in values:
        n = Rational(v.norm())
        for part in (abs(int(n.p)), int(n.q)):
            if part > 1:
                primes.update(int(p) for p in factorint(part))
    return sorted(primes)


def _place_valuations(fld: NumberField, images: Sequence[AlgebraicNumber], primes: Sequence[int]):
    for p in primes:
        try:
            places = places_above(fld, p, list(images))
        except PrecisionError as exc:
            log.debug(f"skipping p={p}: {exc}")
            continue
        for pl in places:
            yield p, pl


def _log_moduli(a: AlgebraicNumber) -> List[Tuple[float, float]]:
    """(log |sigma(a)|, radius) per embedding; the radius bounds log(m / (m - err))."""
    out = []
    for m, err in complex_abs_values(a):
        radius = err / (m - err) if m > err else math.inf
        out.append((math.log(m), radius))
    return out


def multiplicative_independence(l1: AlgebraicNumber, l2: AlgebraicNumber,
                                B: int = INDEPENDENCE_BOUND) -> MultiplierPair:
    """
    Search l1^m1 * l2^m2 = 1 over 0 < max(|m1|, |m2|) <= B.

    A relation forces m1 v(l1) + m2 v(l2) = 0 at every place and the same
    combination of log-moduli at every complex embedding; only exponent
    pairs passing both filters are checked exactly.
    """
    if l1.is_zero() or l2.is_zero():
        raise PreconditionError("multipliers must be nonzero")
    fld, (a, b) = _common([l1, l2])
    valuations = []
    for p, pl in _place_valuations(fld, (a, b), _norm_primes([a, b])):
        v1, v2 = pl.valuations
        if v1 != 0 or v2 != 0:
            valuations.append((Rational(v1), Rational(v2)))
    logs = list(zip(_log_moduli(a), _log_moduli(b)))

    pair = MultiplierPair(a, b, B, None,
                          [{"v1": rational_to_str(v1), "v2": rational_to_str(v2)} for v1, v2 in valuations])
    one = fld.one()
    for r in range(1, B + 1):
        for m1 in range(0, r + 1):
            for m2 in range(-r, r + 1):
                if max(abs(m1), abs(m2)) != r or (m1 == 0 and m2 <= 0):
                    continue
                if any(m1 * v1 + m2 * v2 != 0 for v1, v2 in valuations):
                    continue
                if any(abs(m1 * g1 + m2 * g2) > abs(m1) * r1 + abs(m2) * r2 + ROOT_EPSILON
                       for (g1, r1), (g2, r2) in logs):
                    continue
                if (_power(a, m1) * _power(b, m2) - one).is_zero():
                    pair.relation = (m1, m2)
                    log.info(f"multiplicative relation {(m1, m2)}")
                    return pair
    log.info(f"independent up to {B} ({len(valuations)} valuation constraints)")
    return pair


# ─── Good fixed points and the R-property ───────────────────────────────

def attracting_place(l1: AlgebraicNumber, l2: AlgebraicNumber, p_max: int = GOOD_PRIME_MAX) -> Optional[dict]:
    """A place with v(l1), v(l2) >= 0 and v(l1) + v(l2) > 0, scanning p <= p_max."""
    fld, images = _common([l1, l2])
    candidates = [p for p in _norm_primes(images) if p <= p_max]
    for p, pl in _place_valuations(fld, images, candidates):
        v1, v2 = pl.valuations
        if v1 >= 0 and v2 >= 0 and v1 + v2 > 0:
            return {"p": p, "place": pl.to_dict()}
    return None


@dataclass
class GoodVerdict:
    good: Optional[bool]
    reason: str
    witness: Optional[dict]
    pair: Optional[MultiplierPair] = None

    def to_dict(self) -> dict:
        return {"good": self.good, "reason": self.reason, "witness": self.witness,
                "independence": None if self.pair is None else self.pair.to_dict()}


def good_fixed_point(fp: FixedPointData, p_max: int = GOOD_PRIME_MAX, B: int = INDEPENDENCE_BOUND) -> GoodVerdict:
    """
    A fixed point of a surface map is good when its multipliers are
    multiplicatively independent or some place makes both of absolute
    value at most 1 with product below 1.
    """
    if len(fp.multipliers) != 2:
        raise PreconditionError("good fixed points are defined on surfaces")
    l1, l2 = fp.multipliers
    if l1.is_zero() or l2.is_zero():
        raise PreconditionError("df is not invertible at the fixed point")
    pair = multiplicative_independence(l1, l2, B)
    if pair.independent:
        return GoodVerdict(True, "independent", {"bound": B}, pair)
    witness = attracting_place(l1, l2, p_max)
    if witness is not None:
        return GoodVerdict(True, "attracting_place", witness, pair)
    return GoodVerdict(None, "unknown within bounds", None, pair)


@dataclass
class RPropertyVerdict:
    holds: bool
    witness: Optional[dict] = None
    indeterminate: List[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"holds": self.holds, "witness": self.witness, "indeterminate": self.indeterminate}


def r_property(fps: Sequence[FixedPointData], eps: float = ROOT_EPSILON) -> RPropertyVerdict:
    """Some fixed point and embedding with every multiplier of modulus > 1 + eps."""
    undecided = []
    for idx, fp in enumerate(fps):
        if any(m.is_zero() for m in fp.multipliers):
            continue
        fld, images = _common(fp.multipliers)
        try:
            moduli = [complex_abs_values(m, eps) for m in images]
        except IndeterminateError:
            undecided.append(idx)
            continue
        unsure = False
        for e in range(fld.degree):
            signs = [compare_to(mod[e][0], mod[e][1], 1 + eps, eps) for mod in moduli]
            if all(s == 1 for s in signs):
                return RPropertyVerdict(True, {"point": idx, "embedding": e,
                                               "moduli": [mod[e][0] for mod in moduli]})
            if None in signs and -1 not in signs:
                unsure = True
        if unsure:
            undecided.append(idx)
    return RPropertyVerdict(False, None, undecided)


# ─── Diophantine condition ──────────────────────────────────────────────

@dataclass
class DiophantineResult:
    holds: bool
    counterexample: Optional[Tuple[int, int, int]]
    checked: int

    def to_dict(self) -> dict:
        return {"holds": self.holds, "counterexample": None if self.counterexample is None
                else list(self.counterexample), "checked": self.checked}


def verify_diophantine(l1, l2, C, beta, N: int, p: Optional[int] = None,
                       precision: int = 60) -> DiophantineResult:
    """
    Check |l1^n1 l2^n2 - l_i|_p >= C (n1 + n2)^-beta for n1, n2 >= 0 with
    2 <= n1 + n2 <= N and i = 1, 2.

    Raises:
        PrecisionError: a difference vanishes at precision while the bound
            is below p^-precision
    """
    if not isinstance(l1, PadicElement):
        if p is None:
            raise PreconditionError("rational multipliers need a prime")
        l1 = PadicElement.from_rational(l1, p, precision)
        l2 = PadicElement.from_rational(l2, p, precision)
    p = l1.p
    if any(l.is_zero() or l.valuation != 0 for l in (l1, l2)):
        raise PreconditionError("the multipliers must be p-adic units")
    C, beta = to_rational(C), to_rational(beta)
    if C <= 0 or beta <= 0:
        raise PreconditionError("C and beta must be positive")
    checked = 0
    with mpmath.workdps(50):
        log_p, log_c = mpmath.log(p), mpmath.log(mpmath.mpf(int(C.p)) / int(C.q))
        beta_f = mpmath.mpf(int(beta.p)) / int(beta.q)
        for total in range(2, N + 1):
            rhs = log_c - beta_f * mpmath.log(total)
            for n1 in range(total + 1):
                value = l1 ** n1 * l2 ** (total - n1)
                for i, li in enumerate((l1, l2), start=1):
                    checked += 1
                    diff = value - li
                    if diff.is_zero():
                        if -diff.prec * log_p < rhs:
                            return DiophantineResult(False, (n1, total - n1, i), checked)
                        raise PrecisionError(f"raise precision: difference vanishes at M={diff.prec}")
                    if -int(diff.valuation) * log_p < rhs - mpmath.mpf(10) ** -40:
                        return DiophantineResult(False, (n1, total - n1, i), checked)
    return DiophantineResult(True, None, checked)


# ─── Adelic basic subsets ───────────────────────────────────────────────

_OPS = ("<", "<=", ">", ">=")


def _compare(op: str, a: Rational, b: Rational) -> bool:
    return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]


@dataclass
class Constraint:
    coord: int
    op: str
    bound: Rational

    def holds_exact(self, value) -> bool:
        return _compare(self.op, Rational(value), self.bound)

    def holds_certified(self, value: float, err: float, eps: float) -> Optional[bool]:
        s = compare_to(value, err, float(self.bound), eps)
        if s is None:
            return None
        return s < 0 if self.op in ("<", "<=") else s > 0


@dataclass
class ConstraintGroup:
    place: object  # "arch" or a prime
    constraints: List[Constraint]

    def to_dict(self) -> dict:
        return {"place": self.place, "constraints": [
            {"coord": c.coord, "op": c.op, "bound": rational_to_str(c.bound)} for c in self.constraints]}


@dataclass
class AdelicRegion:
    groups: List[ConstraintGroup]

    @classmethod
    def from_dict(cls, data: dict) -> "AdelicRegion":
        groups = []
        for g in data.get("groups", []):
            place = g.get("place", "arch")
            if place != "arch":
                place = int(place)
            cons = []
            for c in g.get("constraints", []):
                if c["op"] not in _OPS:
                    raise PreconditionError(f"unknown comparison {c['op']!r}")
                cons.append(Constraint(int(c.get("coord", 0)), c["op"], to_rational(c["bound"])))
            groups.append(ConstraintGroup(place, cons))
        return cls(groups)

    def to_dict(self) -> dict:
        return {"groups": [g.to_dict() for g in self.groups]}


@dataclass
class AdelicMembership:
    groups: List[bool]
    witnesses: List[Optional[int]]

    @property
    def member(self) -> bool:
        return all(self.groups)

    def to_dict(self) -> dict:
        return {"groups": self.groups, "witnesses": self.witnesses, "member": self.member}


def _arch_group(group: ConstraintGroup, images: Sequence[AlgebraicNumber], degree: int,
                eps: float) -> Tuple[bool, Optional[int]]:
    if degree == 1:
        ok = all(c.holds_exact(abs(images[c.coord].as_rational())) for c in group.constraints)
        return ok, (0 if ok else None)
    moduli = {c.coord: complex_abs_values(images[c.coord], eps) for c in group.constraints}
    margins = []
    for e in range(degree):
        results = [c.holds_certified(*moduli[c.coord][e], eps) for c in group.constraints]
        if all(r is True for r in results):
            return True, e
        if None in results and False not in results:
            margins.append(e)
    if margins:
        raise IndeterminateError(f"archimedean margin indeterminate at embeddings {margins}")
    return False, None


def _padic_group(group: ConstraintGroup, fld: NumberField, images: Sequence[AlgebraicNumber]) -> Tuple[bool, Optional[int]]:
    p = group.place
    for idx, pl in enumerate(places_above(fld, p, list(images))):
        if all(_padic_holds(c, p, pl.valuations[c.coord]) for c in group.constraints):
            return True, idx
    return False, None


def _padic_holds(c: Constraint, p: int, v) -> bool:
    if v == INF:
        return _compare(c.op, Rational(0), c.bound)
    # |x|_p = p^(-s/q) compared through q-th powers
    v = Rational(v)
    return _compare(c.op, Rational(p) ** (-int(v.p)), c.bound ** int(v.q))


def adelic_member(x: Sequence, region: AdelicRegion, eps: float = ROOT_EPSILON) -> AdelicMembership:
    """
    Membership of a point of A^n(Qbar) in an intersection of basic adelic
    sets over QQ: each group asks for one embedding (archimedean) or one
    place above p under which all its constraints hold.
    """
    coords = [v if isinstance(v, AlgebraicNumber) else rational_number(v) for v in x]
    for g in region.groups:
        for c in g.constraints:
            if not 0 <= c.coord < len(coords):
                raise PreconditionError(f"constraint on coordinate {c.coord} of a {len(coords)}-tuple")
    fld, images = _common(coords)
    results, witnesses = [], []
    for g in region.groups:
        if g.place == "arch":
            ok, w = _arch_group(g, images, fld.degree, eps)
        else:
            ok, w = _padic_group(g, fld, images)
        results.append(ok)
        witnesses.append(w)
    return AdelicMembership(results, witnesses)


def adelic_example_family(n_max: int, n_min: int = 2) -> List[AlgebraicNumber]:
    """n + sqrt(n^2 - 1) for n_min <= n <= n_max; each stands for both conjugates."""
    out = []
    for n in range(n_min, n_max + 1):
        mp = Poly(X ** 2 - 2 * n * X + 1, X, domain=QQ)
        out.append(NumberField.from_root(mp, n + math.sqrt(n * n - 1), f"u{n}").generator())
    return out


def basic_subset_nonempty(region: AdelicRegion, candidates: Sequence = (), n_max: int = 12) -> Optional[AlgebraicNumber]:
    """First member of the region among the candidates, then the n +- sqrt(n^2 - 1) family."""
    pool = [c if isinstance(c, AlgebraicNumber) else rational_number(c) for c in candidates]
    pool += adelic_example_family(n_max)
    for cand in pool:
        try:
            if adelic_member([cand], region).member:
                return cand
        except (IndeterminateError, PrecisionError) as exc:
            log.debug(f"skipping candidate {cand!r}: {exc}")
    return None


# ─── Invariant subvarieties of split maps ───────────────────────────────

@dataclass
class SplitStructure:
    pair: Optional[Tuple[int, int]]
    curve: Optional[Poly]
    verdict: str

    def to_dict(self) -> dict:
        return {"pair": None if self.pair is None else list(self.pair),
                "curve": None if self.curve is None else str(self.curve.as_expr()),
                "verdict": self.verdict}


def _pullback(form, f: MapSpec, gens: Sequence[Symbol]):
    sub = {}
    for g, comp in zip(gens, f.components):
        num = comp.affine_numerator().as_expr().subs(X, g)
        den = comp.affine_denominator().as_expr().subs(X, g)
        sub[g] = num / den
    num, _ = fraction(together(form.subs(sub, simultaneous=True)))
    return expand(num)


def split_invariant_structure(V: Sequence, f: MapSpec, sample_budget: int = N_BOUND) -> SplitStructure:
    """
    For an invariant V of (P1)^N under a split map with nonexceptional
    factors of degree >= 2, find coordinates I = {i, j} and an f_I-invariant
    curve C with V inside the preimage of C under the projection to I.

    The projection is computed by elimination; each irreducible factor of
    the eliminant that lies in the ideal of V is certified invariant.

    Raises:
        HypothesisViolatedError: a factor has degree < 2 or is exceptional
    """
    if f.space != "P1xN":
        raise PreconditionError("split structure needs a map of (P1)^N")
    for i, comp in enumerate(f.components):
        if comp.degree < 2:
            raise HypothesisViolatedError(f"factor {i + 1} has degree {comp.degree} < 2")
        verdict = classify_type(comp, sample_budget)
        if verdict.type != "nonexceptional":
            raise HypothesisViolatedError(f"factor {i + 1} is {verdict.type}")
    gens = coordinate_symbols(f)
    forms = [expand(_parse(v, gens) if isinstance(v, str) else v.as_expr()) for v in V]
    forms = [e for e in forms if e != 0]
    if not forms:
        return SplitStructure(None, None, "whole_space")
    basis = groebner(forms, *gens, order='grevlex')
    for e in forms:
        _, rem = basis.reduce(_pullback(e, f, gens))
        if rem != 0:
            raise PreconditionError("V is not invariant under f")

    for i, j in itertools.combinations(range(len(gens)), 2):
        others = [g for k, g in enumerate(gens) if k not in (i, j)]
        elim = groebner(forms, *others, gens[i], gens[j], order='lex')
        for g in elim.exprs:
            if g.free_symbols - {gens[i], gens[j]}:
                continue
            for fac, _ in factor_list(g, gens[i], gens[j])[1]:
                _, rem = basis.reduce(fac.as_expr())
                if rem != 0:
                    continue
                curve = Poly(fac.as_expr().subs({gens[i]: X, gens[j]: Y}, simultaneous=True), X, Y, domain=QQ)
                if invariant_curve_check(curve, (f.components[i], f.components[j])).invariant:
                    log.info(f"V lies over the invariant curve {curve.as_expr()} in coordinates {(i + 1, j + 1)}")
                    return SplitStructure((i + 1, j + 1), curve, "pair_found")
    return SplitStructure(None, None, "no_pair_within_bounds")


def _parse(text: str, gens: Sequence[Symbol]):
    return parse_expr(text, local_dict={str(g): g for g in gens},
                      transformations=standard_transformations + (convert_xor,))
