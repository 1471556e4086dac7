"""
Points and endomorphisms of P1, P2 and split (P1)^N over number fields.

Maps are stored as homogeneous sympy Polys over QQ in (x, y) for P1 and
(x, y, z) for P2; split maps keep one P1 map per factor. Coordinates are
AlgebraicNumber values, all coordinates of a factor living in one field.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
from sympy import Poly, QQ, Rational, Symbol, fraction, groebner, together
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from orbitlab.app_settings import FIELD_DEGREE_CAP, HEIGHT_BITS_CAP, PRIMITIVE_K_MAX
from orbitlab.arith.exactnum import (
    RATIONALS, AlgebraicNumber, NumberField, X, Y, factor_poly_q, joint_field, kpoly_gcd,
    kpoly_trim, minimal_polynomial, own_field, poly_coeffs, rational_number, rational_to_str,
    resultant, to_rational,
)
from orbitlab.errors import (
    DegenerateLocusError, FieldCapError, IndeterminatePointError, PreconditionError,
)
from orbitlab.utils.logger import get_logger

log = get_logger('projdyn')

Z = Symbol('z')
T = Symbol('t')

SPACES = ("P1", "P2", "P1xN")
_GENS = {"P1": (X, Y), "P2": (X, Y, Z)}


# ─── Coordinates ────────────────────────────────────────────────────────

def common_field(values: Sequence[AlgebraicNumber]) -> NumberField:
    fld = RATIONALS
    for v in values:
        if v.field.degree > 1:
            if fld.degree > 1 and v.field != fld:
                raise PreconditionError("coordinates live in different number fields")
            fld = v.field
    return fld


def _unify(values: Sequence[AlgebraicNumber]) -> Tuple[AlgebraicNumber, ...]:
    fld = common_field(values)
    return tuple(fld.rational(v.coords[0]) if v.field.degree == 1 and fld.degree > 1 else v for v in values)


def _coord_to_json(a: AlgebraicNumber):
    return rational_to_str(a.coords[0]) if a.is_rational() and a.field.degree == 1 else a.to_dict()


def _coord_from_json(data) -> AlgebraicNumber:
    if isinstance(data, dict):
        return AlgebraicNumber.from_dict(data)
    return rational_number(to_rational(data))


@dataclass(frozen=True)
class ProjPoint:
    """
    A point of P1, P2 or (P1)^N; ``factors`` holds one homogeneous
    coordinate tuple per projective factor, canonically scaled.
    """
    space: str
    factors: Tuple[Tuple[AlgebraicNumber, ...], ...]

    @staticmethod
    def _scale(coords: Sequence[AlgebraicNumber]) -> Tuple[AlgebraicNumber, ...]:
        coords = _unify(coords)
        nz = [c for c in coords if not c.is_zero()]
        if not nz:
            raise PreconditionError("all homogeneous coordinates are zero")
        inv = nz[-1].inverse()
        return tuple(c * inv for c in coords)

    @classmethod
    def make(cls, space: str, factors: Sequence[Sequence[AlgebraicNumber]]) -> "ProjPoint":
        return cls(space, tuple(cls._scale(f) for f in factors))

    @classmethod
    def affine(cls, *values) -> "ProjPoint":
        """P1 point [a:1] (one value) or P2 point [a:b:1] (two values)."""
        vals = [v if isinstance(v, AlgebraicNumber) else rational_number(v) for v in values]
        space = "P1" if len(vals) == 1 else "P2"
        return cls.make(space, [vals + [rational_number(1)]])

    @classmethod
    def infinity(cls) -> "ProjPoint":
        return cls.make("P1", [[rational_number(1), rational_number(0)]])

    @classmethod
    def product(cls, values) -> "ProjPoint":
        """(P1)^N point from affine values (None means infinity)."""
        factors = []
        for v in values:
            if v is None:
                factors.append([rational_number(1), rational_number(0)])
            else:
                factors.append([v if isinstance(v, AlgebraicNumber) else rational_number(v), rational_number(1)])
        return cls.make("P1xN", factors)

    @property
    def coords(self) -> Tuple[AlgebraicNumber, ...]:
        return self.factors[0]

    def is_infinite(self, factor: int = 0) -> bool:
        return self.factors[factor][-1].is_zero()

    def affine_value(self, factor: int = 0) -> Optional[AlgebraicNumber]:
        """x/y for a P1 factor; None at infinity."""
        c = self.factors[factor]
        return None if c[-1].is_zero() else c[0]

    def field(self) -> NumberField:
        return common_field([c for f in self.factors for c in f])

    def key(self) -> tuple:
        return (self.space,) + tuple(tuple(c.canonical_key() for c in f) for f in self.factors)

    def height_bits(self) -> int:
        return max(c.height().bit_length() for f in self.factors for c in f)

    def to_dict(self) -> dict:
        return {"space": self.space, "coords": [[_coord_to_json(c) for c in f] for f in self.factors]}

    @classmethod
    def from_dict(cls, data: dict) -> "ProjPoint":
        space = data.get("space", "P1")
        if space not in SPACES:
            raise PreconditionError(f"unknown space {space!r}")
        factors = [[_coord_from_json(c) for c in f] for f in data["coords"]]
        return cls.make(space, factors)

    def __repr__(self):
        parts = [":".join(repr(c) for c in f) for f in self.factors]
        return f"ProjPoint({self.space}, " + ", ".join(f"[{p}]" for p in parts) + ")"


# ─── Maps ───────────────────────────────────────────────────────────────

def _monomials(nvars: int, d: int) -> List[Tuple[int, ...]]:
    """Degree-d exponent vectors in graded-lex order (x first)."""
    if nvars == 2:
        return [(d - j, j) for j in range(d + 1)]
    out = []
    for a in range(d, -1, -1):
        for b in range(d - a, -1, -1):
            out.append((a, b, d - a - b))
    return out


def _is_homogeneous_of(p: Poly, d: int) -> bool:
    return p.is_zero or all(sum(m) == d for m in p.monoms())


@dataclass(frozen=True)
class MapSpec:
    space: str
    degree: int
    forms: Tuple[Poly, ...] = ()
    components: Tuple["MapSpec", ...] = ()
    base_point_free: str = "unchecked"

    # constructors

    @classmethod
    def p1(cls, f1, f2) -> "MapSpec":
        F1, F2 = Poly(f1, X, Y, domain=QQ), Poly(f2, X, Y, domain=QQ)
        d = max(F1.total_degree(), F2.total_degree())
        if d < 1 or not _is_homogeneous_of(F1, d) or not _is_homogeneous_of(F2, d):
            raise PreconditionError("P1 map needs two homogeneous forms of one degree d >= 1")
        if F1.gcd(F2).total_degree() > 0:
            raise PreconditionError("P1 map forms share a common factor")
        return cls("P1", d, (F1, F2), (), "checked")

    @classmethod
    def p2(cls, f1, f2, f3, verify: bool = True) -> "MapSpec":
        forms = tuple(Poly(f, X, Y, Z, domain=QQ) for f in (f1, f2, f3))
        d = max(f.total_degree() for f in forms)
        if d < 1 or not all(_is_homogeneous_of(f, d) for f in forms):
            raise PreconditionError("P2 map needs three homogeneous forms of one degree d >= 1")
        spec = cls("P2", d, forms, (), "unchecked")
        if verify:
            if not spec.check_base_points():
                raise PreconditionError("P2 map has a base point")
            spec = cls("P2", d, forms, (), "checked")
        return spec

    @classmethod
    def split(cls, maps: Sequence["MapSpec"]) -> "MapSpec":
        if not maps or any(m.space != "P1" for m in maps):
            raise PreconditionError("split maps are built from P1 maps")
        return cls("P1xN", max(m.degree for m in maps), (), tuple(maps), "checked")

    @classmethod
    def from_affine(cls, expr) -> "MapSpec":
        """P1 map from a rational function in x (expression or string)."""
        e = parse_map_expr(expr) if isinstance(expr, str) else expr
        num, den = fraction(together(e))
        pn, pd = Poly(num, X, domain=QQ), Poly(den, X, domain=QQ)
        d = max(pn.degree(), pd.degree())
        if d < 1:
            raise PreconditionError("constant maps are not endomorphisms")
        hom = lambda p: Poly(Y ** d * p.as_expr().subs(X, X / Y), X, Y, domain=QQ)
        return cls.p1(hom(pn).as_expr().expand(), hom(pd).as_expr().expand())

    @classmethod
    def polynomial_p2(cls, e1, e2) -> "MapSpec":
        """Extend an affine polynomial map (x, y) -> (e1, e2) to P2."""
        p1 = Poly(parse_map_expr(e1) if isinstance(e1, str) else e1, X, Y, domain=QQ)
        p2 = Poly(parse_map_expr(e2) if isinstance(e2, str) else e2, X, Y, domain=QQ)
        d = max(p1.total_degree(), p2.total_degree())
        hom = lambda p: (Z ** d * p.as_expr().subs({X: X / Z, Y: Y / Z}, simultaneous=True)).expand()
        return cls.p2(hom(p1), hom(p2), Z ** d)

    # structure

    @property
    def gens(self) -> Tuple[Symbol, ...]:
        return _GENS[self.space]

    @property
    def factor_count(self) -> int:
        return len(self.components) if self.space == "P1xN" else 1

    def check_base_points(self) -> bool:
        """No common zero of the forms: each variable has a pure-power leading monomial."""
        gb = groebner([f.as_expr() for f in self.forms], X, Y, Z, order='grevlex')
        lead = [Poly(g, X, Y, Z).monoms(order='grevlex')[0] for g in gb.exprs]
        return all(any(m[i] > 0 and sum(m) == m[i] for m in lead) for i in range(3))

    def affine_numerator(self) -> Poly:
        return Poly(self.forms[0].as_expr().subs(Y, 1), X, domain=QQ)

    def affine_denominator(self) -> Poly:
        return Poly(self.forms[1].as_expr().subs(Y, 1), X, domain=QQ)

    def is_polynomial(self) -> bool:
        """P1 map fixing infinity with no finite poles."""
        return self.space == "P1" and self.affine_denominator().degree() == 0

    def to_dict(self) -> dict:
        if self.space == "P1xN":
            return {"space": "P1xN", "n": len(self.components),
                    "coeffs": [c.to_dict()["coeffs"] for c in self.components]}
        mons = _monomials(len(self.gens), self.degree)
        coeffs = [[rational_to_str(f.coeff_monomial(m)) for m in mons] for f in self.forms]
        return {"space": self.space, "n": 1, "coeffs": coeffs}

    @classmethod
    def from_dict(cls, data: dict) -> "MapSpec":
        space = data.get("space")
        if space not in SPACES:
            raise PreconditionError(f"unknown space {space!r}")
        if space == "P1xN":
            comps = [cls.from_dict({"space": "P1", "coeffs": c}) for c in data["coeffs"]]
            if "n" in data and int(data["n"]) != len(comps):
                raise PreconditionError("factor count does not match n")
            return cls.split(comps)
        rows = data["coeffs"]
        gens = _GENS[space]
        if space == "P1":
            d = len(rows[0]) - 1
        else:
            d = int((math.isqrt(8 * len(rows[0]) + 1) - 3) // 2)
        mons = _monomials(len(gens), d)
        if any(len(r) != len(mons) for r in rows) or len(rows) != len(gens):
            raise PreconditionError("coefficient table does not match the monomial basis")
        exprs = []
        for r in rows:
            e = 0
            for m, c in zip(mons, r):
                term = to_rational(c)
                for g, k in zip(gens, m):
                    term = term * g ** k
                e += term
            exprs.append(e)
        return cls.p1(*exprs) if space == "P1" else cls.p2(*exprs)

    def __repr__(self):
        if self.space == "P1xN":
            return f"MapSpec(P1xN, {list(self.components)})"
        return f"MapSpec({self.space}, [" + " : ".join(str(f.as_expr()) for f in self.forms) + "])"


def parse_map_expr(text: str):
    """Parse "x^2 - 1" style input in the variables x, y."""
    return parse_expr(text, local_dict={"x": X, "y": Y, "z": Z},
                      transformations=standard_transformations + (convert_xor,))


# ─── Evaluation ─────────────────────────────────────────────────────────

def eval_form(p: Poly, values: Sequence[AlgebraicNumber]) -> AlgebraicNumber:
    """Evaluate a multivariate rational Poly at algebraic coordinates."""
    values = _unify(values)
    fld = common_field(values)
    acc = fld.zero()
    powers: Dict[Tuple[int, int], AlgebraicNumber] = {}
    for monom, c in p.terms():
        term = fld.rational(Rational(c))
        for i, k in enumerate(monom):
            if k:
                if (i, k) not in powers:
                    powers[(i, k)] = values[i] ** k
                term = term * powers[(i, k)]
        acc = acc + term
    return acc


def evaluate(f: MapSpec, x: ProjPoint) -> ProjPoint:
    """Image of a point, canonically scaled."""
    expected = "P1" if f.space == "P1xN" else f.space
    if f.space == "P1xN":
        if x.space != "P1xN" or len(x.factors) != len(f.components):
            raise PreconditionError("point does not lie in the map's product space")
        images = [evaluate(g, ProjPoint("P1", (c,))).coords for g, c in zip(f.components, x.factors)]
        return ProjPoint.make("P1xN", images)
    if x.space != expected:
        raise PreconditionError(f"point in {x.space} given to a {f.space} map")
    image = [eval_form(F, x.coords) for F in f.forms]
    if all(c.is_zero() for c in image):
        raise IndeterminatePointError(f"indeterminate point {x!r}")
    return ProjPoint.make(f.space, [image])


# ─── Orbits ─────────────────────────────────────────────────────────────

@dataclass
class OrbitReport:
    points: List[ProjPoint]
    tail: Optional[int] = None
    cycle: Optional[int] = None

    @property
    def preperiodic(self) -> bool:
        return self.cycle is not None

    def to_dict(self) -> dict:
        return {"points": [p.to_dict() for p in self.points],
                "preperiodic": self.preperiodic, "tail": self.tail, "cycle": self.cycle}


def orbit(f: MapSpec, x: ProjPoint, n: int, height_bits_cap: int = HEIGHT_BITS_CAP) -> OrbitReport:
    """
    Forward orbit x, f(x), ..., f^n(x) with cycle detection.

    Raises:
        FieldCapError: coordinates outgrow the height cap
    """
    if n < 0:
        raise PreconditionError("orbit length must be nonnegative")
    points = [x]
    seen = {x.key(): 0}
    report = OrbitReport(points)
    for i in range(1, n + 1):
        nxt = evaluate(f, points[-1])
        if nxt.height_bits() > height_bits_cap:
            raise FieldCapError(f"orbit coordinates exceed {height_bits_cap} bits at step {i}")
        points.append(nxt)
        k = nxt.key()
        if report.cycle is None and k in seen:
            report.tail, report.cycle = seen[k], i - seen[k]
            log.debug(f"orbit repeats: tail {report.tail}, cycle {report.cycle}")
        seen.setdefault(k, i)
    return report


def is_preperiodic(f: MapSpec, x: ProjPoint, max_steps: int) -> Optional[Tuple[int, int]]:
    """(tail, cycle) when the orbit repeats within max_steps, else None."""
    seen = {x.key(): 0}
    cur = x
    for i in range(1, max_steps + 1):
        cur = evaluate(f, cur)
        k = cur.key()
        if k in seen:
            return seen[k], i - seen[k]
        seen[k] = i
    return None


# ─── Composition ────────────────────────────────────────────────────────

def compose(f: MapSpec, g: MapSpec) -> MapSpec:
    """f after g."""
    if f.space != g.space:
        raise PreconditionError("cannot compose maps on different spaces")
    if f.space == "P1xN":
        if len(f.components) != len(g.components):
            raise PreconditionError("split maps have different factor counts")
        return MapSpec.split([compose(a, b) for a, b in zip(f.components, g.components)])
    subs = dict(zip(f.gens, [G.as_expr() for G in g.forms]))
    forms = [F.as_expr().subs(subs, simultaneous=True).expand() for F in f.forms]
    if f.space == "P1":
        return MapSpec.p1(*forms)
    return MapSpec.p2(*forms, verify=False)


def iterate(f: MapSpec, n: int) -> MapSpec:
    if n < 1:
        raise PreconditionError("iterate needs n >= 1")
    result = f
    for _ in range(n - 1):
        result = compose(f, result)
    return result


def mobius(a, b, c, d) -> MapSpec:
    """x -> (a x + b)/(c x + d)."""
    a, b, c, d = (to_rational(v) for v in (a, b, c, d))
    if a * d - b * c == 0:
        raise PreconditionError("singular Mobius matrix")
    return MapSpec.p1(a * X + b * Y, c * X + d * Y)


def mobius_inverse(m: MapSpec) -> MapSpec:
    (a, b), (c, d) = [[m.forms[i].coeff_monomial(X), m.forms[i].coeff_monomial(Y)] for i in range(2)]
    return mobius(d, -b, -c, a)


def conjugate(f: MapSpec, m: MapSpec) -> MapSpec:
    """m^-1 o f o m."""
    return compose(mobius_inverse(m), compose(f, m))


# ─── Derivatives and multipliers ────────────────────────────────────────

def chart_jacobian(f: MapSpec, x: ProjPoint) -> List[List[AlgebraicNumber]]:
    """
    Jacobian of f at a fixed point in the affine chart of x's last nonzero
    coordinate.
    """
    coords = x.coords
    gens = f.gens
    i = max(k for k, c in enumerate(coords) if not c.is_zero())
    others = [k for k in range(len(gens)) if k != i]
    Fi = f.forms[i]
    den = eval_form(Fi, coords)
    if den.is_zero():
        raise PreconditionError("point is not fixed in its chart")
    jac = []
    for j in others:
        Fj = f.forms[j]
        fj_val = eval_form(Fj, coords)
        row = []
        for k in others:
            dFj = eval_form(Fj.diff(gens[k]), coords)
            dFi = eval_form(Fi.diff(gens[k]), coords)
            row.append((dFj * den - fj_val * dFi) / (den * den))
        jac.append(row)
    return jac


def _sqrt_adjoin(delta: AlgebraicNumber) -> Tuple[NumberField, AlgebraicNumber, AlgebraicNumber]:
    """Field containing delta's field and a square root s of delta; returns (L, gen image, s)."""
    m = minimal_polynomial(delta)
    sq = Poly(m.as_expr().subs(X, X ** 2), X, domain=QQ)
    target = mpmath.sqrt(delta.numeric())
    factors = [fac for fac, _ in factor_poly_q(sq, None)]
    best = min(factors, key=lambda fac: min(abs(z - target) for z, _ in NumberField(fac).complex_roots))
    s_field = NumberField.from_root(best, target)
    s = s_field.generator()
    if delta.field.degree == 1:
        return s_field, s_field.rational(0), s
    fld, imgs = joint_field([delta.field.generator(), s], PRIMITIVE_K_MAX)
    return fld, imgs[0], imgs[1]


def eigenvalues(jac: List[List[AlgebraicNumber]]) -> List[AlgebraicNumber]:
    if len(jac) == 1:
        return [jac[0][0]]
    (a, b), (c, d) = jac
    tr, det = a + d, a * d - b * c
    disc = tr * tr - 4 * det
    if disc.is_zero():
        return [tr / 2, tr / 2]
    fld, gen_img, s = _sqrt_adjoin(disc)
    tr_l = tr.lift(gen_img) if tr.field.degree > 1 else fld.rational(tr.coords[0])
    return [(tr_l + s) / 2, (tr_l - s) / 2]


# ─── Fixed points ───────────────────────────────────────────────────────

@dataclass
class FixedPointData:
    point: ProjPoint
    multipliers: List[AlgebraicNumber]
    multiplicity: int = 1
    degenerate: bool = False
    orbit_key: str = ""

    def to_dict(self) -> dict:
        return {"point": self.point.to_dict(),
                "multipliers": [_coord_to_json(m) for m in self.multipliers],
                "multiplicity": self.multiplicity, "degenerate": self.degenerate}


def conjugate_roots(factor: Poly, name: str) -> List[AlgebraicNumber]:
    if factor.degree() == 1:
        return [rational_number(-poly_coeffs(factor)[0])]
    return [NumberField(factor, name, j).generator() for j in range(factor.degree())]


def _fixed_points_p1(f: MapSpec) -> List[FixedPointData]:
    F1, F2 = f.forms
    G = Poly(Y * F1.as_expr() - X * F2.as_expr(), X, Y, domain=QQ)
    if G.is_zero:
        raise DegenerateLocusError("every point is fixed")
    g = Poly(G.as_expr().subs(Y, 1), X, domain=QQ)
    out: List[FixedPointData] = []
    for k, (fac, mult) in enumerate(factor_poly_q(g, None)):
        for root in conjugate_roots(fac, f"a{k}"):
            pt = ProjPoint.affine(root)
            jac = chart_jacobian(f, pt)
            out.append(FixedPointData(pt, [jac[0][0]], mult, mult > 1, str(fac.as_expr())))
    inf_mult = f.degree + 1 - g.degree()
    if inf_mult > 0:
        pt = ProjPoint.infinity()
        jac = chart_jacobian(f, pt)
        out.append(FixedPointData(pt, [jac[0][0]], inf_mult, inf_mult > 1, "inf"))
    return out


def _kpoly_in_y(p: Poly, t_value: AlgebraicNumber) -> list:
    """Coefficients (ascending in y) of p(t, y) with t specialized."""
    fld = t_value.field
    dy = p.degree(Y)
    out = []
    for j in range(dy + 1):
        cj = Poly(p.as_expr().coeff(Y, j), T, domain=QQ) if dy >= 0 else Poly(0, T, domain=QQ)
        acc = fld.zero()
        for c in reversed(cj.all_coeffs()):
            acc = acc * t_value + Rational(c)
        out.append(acc)
    return kpoly_trim(out)


def _fixed_points_p2_affine(f: MapSpec) -> List[FixedPointData]:
    F1, F2, F3 = (F.as_expr().subs(Z, 1) for F in f.forms)
    A0, B0 = (F1 - X * F3).expand(), (F2 - Y * F3).expand()
    zero_count = 0
    for k in range(1, PRIMITIVE_K_MAX + 1):
        A = Poly(A0.subs(X, T - k * Y).expand(), T, Y, domain=QQ)
        B = Poly(B0.subs(X, T - k * Y).expand(), T, Y, domain=QQ)
        R = resultant(A.as_expr().subs(T, X), B.as_expr().subs(T, X), Y)
        if R.is_zero:
            zero_count += 1
            if zero_count >= 2:
                raise DegenerateLocusError("positive-dimensional fixed locus")
            continue
        if R.degree() <= 0:
            return []
        found: List[FixedPointData] = []
        separating = True
        for idx, (fac, mult) in enumerate(factor_poly_q(R, None)):
            fac_t = Poly(fac.as_expr(), X, domain=QQ)
            for t0 in conjugate_roots(fac_t, f"b{idx}"):
                g = kpoly_gcd(_kpoly_in_y(A, t0), _kpoly_in_y(B, t0))
                if len(g) <= 1:
                    continue
                if len(g) > 2:
                    separating = False
                    break
                y0 = -g[0]
                x0 = t0 - k * y0
                pt = ProjPoint.affine(x0, y0)
                found.append(FixedPointData(pt, eigenvalues(chart_jacobian(f, pt)), mult, mult > 1,
                                            str(fac.as_expr())))
            if not separating:
                break
        if separating:
            log.debug(f"P2 fixed points separated by t = x + {k}y")
            return found
    raise DegenerateLocusError(f"no separating projection t = x + k*y with k <= {PRIMITIVE_K_MAX}")


def _fixed_points_p2_infinity(f: MapSpec) -> List[FixedPointData]:
    F1, F2, F3 = (F.as_expr().subs(Z, 0) for F in f.forms)
    H1 = Poly(F3, X, Y, domain=QQ)
    H2 = Poly((X * F2 - Y * F1).expand(), X, Y, domain=QQ)
    if H1.is_zero and H2.is_zero:
        raise DegenerateLocusError("the line at infinity is pointwise fixed")
    G = H2 if H1.is_zero else (H1 if H2.is_zero else H1.gcd(H2))
    if G.total_degree() <= 0:
        return []
    out = []
    g = Poly(G.as_expr().subs(Y, 1), X, domain=QQ)
    for idx, (fac, mult) in enumerate(factor_poly_q(g, None) if g.degree() > 0 else []):
        for root in conjugate_roots(fac, f"c{idx}"):
            pt = ProjPoint.make("P2", [[root, rational_number(1), rational_number(0)]])
            out.append(FixedPointData(pt, eigenvalues(chart_jacobian(f, pt)), mult, mult > 1, str(fac.as_expr())))
    mult = G.total_degree() - max(g.degree(), 0)
    if mult > 0:
        pt = ProjPoint.make("P2", [[rational_number(1), rational_number(0), rational_number(0)]])
        out.append(FixedPointData(pt, eigenvalues(chart_jacobian(f, pt)), mult, mult > 1, "x-axis"))
    return out


def fixed_points(f: MapSpec) -> List[FixedPointData]:
    """
    All fixed points with multipliers, grouped by Galois orbit.

    Raises:
        DegenerateLocusError: the fixed locus of a P2 map is not finite
    """
    if f.space == "P1":
        return _fixed_points_p1(f)
    if f.space == "P2":
        return _fixed_points_p2_affine(f) + _fixed_points_p2_infinity(f)
    per_factor = [_fixed_points_p1(g) for g in f.components]
    out = []
    for combo in itertools.product(*per_factor):
        pt = ProjPoint.make("P1xN", [c.point.coords for c in combo])
        mult = math.prod(c.multiplicity for c in combo)
        out.append(FixedPointData(pt, [c.multipliers[0] for c in combo], mult,
                                  any(c.degenerate for c in combo),
                                  "|".join(c.orbit_key for c in combo)))
    return out


# ─── Degrees ────────────────────────────────────────────────────────────

@dataclass
class DegreeReport:
    topological: int
    dynamical: int

    @property
    def amplified(self) -> bool:
        return self.topological > self.dynamical

    def to_dict(self) -> dict:
        return {"d_f": self.topological, "lambda1": self.dynamical, "amplified": self.amplified}


def degrees(f: MapSpec) -> DegreeReport:
    """Topological degree d_f and first dynamical degree lambda_1."""
    if f.space == "P1":
        return DegreeReport(f.degree, f.degree)
    if f.space == "P2":
        return DegreeReport(f.degree ** 2, f.degree)
    ds = [g.degree for g in f.components]
    return DegreeReport(math.prod(ds), max(ds))


# ─── Preimage chains ────────────────────────────────────────────────────

@dataclass
class ChainLink:
    point: ProjPoint
    field_degree: int

    def to_dict(self) -> dict:
        return {"point": self.point.to_dict(), "field_degree": self.field_degree}


@dataclass
class PreimageChain:
    links: List[ChainLink] = field(default_factory=list)
    ratios_divide: bool = True
    truncated: bool = False
    reason: str = ""

    def to_dict(self) -> dict:
        return {"chain": [l.to_dict() for l in self.links], "ratios_divide": self.ratios_divide,
                "truncated": self.truncated, "reason": self.reason}


def _mp_eval(p: Poly, z):
    return mpmath.polyval([mpmath.mpf(int(c.p)) / int(c.q) for c in p.all_coeffs()], z)


def _preimage_candidates(f: MapSpec, target: ProjPoint) -> List[ProjPoint]:
    """Preimages of a P1 point, in chain-choice order."""
    num, den = f.affine_numerator(), f.affine_denominator()
    a = target.affine_value()
    if a is None:
        R = den
    elif a.is_rational():
        R = Poly(num.as_expr() - a.as_rational() * den.as_expr(), X, domain=QQ)
    else:
        A_y = a.to_poly().as_expr().subs(X, Y)
        R = resultant(a.field.minimal_poly.as_expr().subs(X, Y), num.as_expr() - A_y * den.as_expr(), Y)

    # the norm R also vanishes at preimages of a's conjugates
    check = a is not None and not a.is_rational()
    a_num = a.numeric() if check else None
    tol = mpmath.mpf(10) ** -30

    ranked = []
    for fac, _ in (factor_poly_q(R, None) if R.degree() > 0 else []):
        roots = ([(0, rational_number(-poly_coeffs(fac)[0]))] if fac.degree() == 1
                 else [(j, NumberField(fac, "p", j).generator()) for j in range(fac.degree())])
        for j, root in roots:
            if check:
                with mpmath.workdps(50):
                    z = root.numeric()
                    dv = _mp_eval(den, z)
                    if dv == 0 or abs(_mp_eval(num, z) / dv - a_num) > tol * (1 + abs(a_num)):
                        continue
            tie = root.as_rational() if fac.degree() == 1 else 0
            ranked.append(((fac.degree(), tie, j), root))
    ranked.sort(key=lambda kv: kv[0])
    out = [ProjPoint.affine(v) for _, v in ranked]
    if evaluate(f, ProjPoint.infinity()).key() == target.key():
        out.append(ProjPoint.infinity())
    return out


def _point_degree(pt: ProjPoint) -> int:
    return 1 if pt.is_infinite() else own_field(pt.affine_value())[0].degree


def preimage_chain(f: MapSpec, p0: ProjPoint, n: int,
                   degree_cap: int = FIELD_DEGREE_CAP) -> PreimageChain:
    """
    A chain p0, p1, ..., pn with f(p_i) = p_(i-1), choosing the lowest-degree
    preimage, then the smallest rational one, then the first embedding.

    Each p_i generates a field containing p_(i-1), so the prefix degree is
    the degree of the newest point.
    """
    if f.space != "P1" or f.degree < 2:
        raise PreconditionError("preimage chains need a P1 map of degree >= 2")
    chain = PreimageChain([ChainLink(p0, _point_degree(p0))])
    fact = math.factorial(f.degree)
    for step in range(1, n + 1):
        cands = _preimage_candidates(f, chain.links[-1].point)
        if not cands:
            chain.truncated, chain.reason = True, f"no preimage found at step {step}"
            break
        nxt = cands[0]
        prev = chain.links[-1].field_degree
        deg = max(_point_degree(nxt), prev)
        if deg > degree_cap:
            chain.truncated, chain.reason = True, f"field degree {deg} exceeds cap {degree_cap}"
            log.warning(chain.reason)
            break
        if deg % prev or fact % (deg // prev):
            chain.ratios_divide = False
        chain.links.append(ChainLink(nxt, deg))
    return chain
