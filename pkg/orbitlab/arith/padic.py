"""
p-adic numbers at capped absolute precision.

A nonzero PadicElement is p^v * u with u a unit known modulo p^(prec - v);
the zero-at-precision element has valuation +inf and is known modulo p^prec.
Also here: Newton polygons, Hensel lifting, log/exp, Strassmann counting
for one-variable series and the places of a number field above p.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from sympy import Poly, QQ, Rational, ZZ, multiplicity, resultant as _sympy_resultant
from sympy.polys.factortools import dup_zz_hensel_lift

from orbitlab.app_settings import DEFAULT_PRECISION, GUARD_DIGITS
from orbitlab.arith.exactnum import (
    AlgebraicNumber, NumberField, X, poly_coeffs, poly_from_coeffs, rational_to_str, to_rational,
)
from orbitlab.errors import HenselError, InconclusiveTruncationError, PrecisionError, PreconditionError
from orbitlab.utils.logger import get_logger

log = get_logger('padic')

INF = math.inf


def valuation_q(r, p: int):
    """p-adic valuation of a rational; +inf for zero."""
    r = to_rational(r)
    if r == 0:
        return INF
    return multiplicity(p, abs(int(r.p))) - multiplicity(p, int(r.q))


# ─── Elements ───────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class PadicElement:
    p: int
    valuation: float  # int, or INF for zero at precision
    unit: int
    prec: int

    __hash__ = None

    @classmethod
    def zero(cls, p: int, prec: int = DEFAULT_PRECISION) -> "PadicElement":
        return cls(p, INF, 0, prec)

    @classmethod
    def _normalized(cls, p: int, v: int, s: int, prec: int) -> "PadicElement":
        # s * p^v known modulo p^prec
        if v >= prec:
            return cls.zero(p, prec)
        s %= p ** (prec - v)
        if s == 0:
            return cls.zero(p, prec)
        k = multiplicity(p, s)
        return cls(p, v + k, s // p ** k, prec)

    @classmethod
    def from_rational(cls, r, p: int, prec: int = DEFAULT_PRECISION) -> "PadicElement":
        r = to_rational(r)
        if r == 0:
            return cls.zero(p, prec)
        v = valuation_q(r, p)
        num = int(r.p) // p ** max(v, 0)
        den = int(r.q) // p ** max(-v, 0)
        if v >= prec:
            return cls.zero(p, prec)
        mod = p ** (prec - v)
        return cls(p, v, num * pow(den, -1, mod) % mod, prec)

    @property
    def relative_precision(self) -> int:
        return 0 if self.is_zero() else self.prec - int(self.valuation)

    def is_zero(self) -> bool:
        return self.valuation == INF

    def _parts(self) -> Tuple[int, int]:
        return (self.prec, 0) if self.is_zero() else (int(self.valuation), self.unit)

    def _coerce(self, other) -> "PadicElement":
        if isinstance(other, PadicElement):
            if other.p != self.p:
                raise PreconditionError(f"mixing {self.p}-adic and {other.p}-adic elements")
            return other
        r = to_rational(other)
        v = valuation_q(r, self.p)
        extra = 0 if v == INF else abs(v)
        return PadicElement.from_rational(r, self.p, self.prec + extra)

    def __add__(self, other):
        o = self._coerce(other)
        prec = min(self.prec, o.prec)
        va, ua = self._parts()
        vb, ub = o._parts()
        vmin = min(va, vb)
        if vmin >= prec:
            return PadicElement.zero(self.p, prec)
        s = ua * self.p ** (va - vmin) + ub * self.p ** (vb - vmin)
        return PadicElement._normalized(self.p, vmin, s, prec)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        return PadicElement(self.p, self.valuation, (-self.unit) % self.p ** self.relative_precision, self.prec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if self.is_zero() or o.is_zero():
            if self.is_zero() and o.is_zero():
                prec = self.prec + o.prec
            elif self.is_zero():
                prec = self.prec + int(o.valuation)
            else:
                prec = o.prec + int(self.valuation)
            return PadicElement.zero(self.p, prec)
        v = int(self.valuation + o.valuation)
        r = min(self.relative_precision, o.relative_precision)
        return PadicElement._normalized(self.p, v, self.unit * o.unit, v + r)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("division by a p-adic zero at precision")
        if self.is_zero():
            return PadicElement.zero(self.p, self.prec - int(o.valuation))
        v = int(self.valuation - o.valuation)
        r = min(self.relative_precision, o.relative_precision)
        mod = self.p ** r
        return PadicElement(self.p, v, self.unit * pow(o.unit, -1, mod) % mod, v + r)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        n = int(n)
        if n < 0:
            return PadicElement.from_rational(1, self.p, self.prec) / (self ** (-n))
        result = PadicElement.from_rational(1, self.p, self.prec + (0 if self.is_zero() else
                                            max(0, -int(self.valuation)) * n))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        """Congruence at the common precision."""
        try:
            return (self - other).is_zero()
        except (PreconditionError, TypeError, ValueError):
            return NotImplemented

    def with_precision(self, prec: int) -> "PadicElement":
        """Drop digits down to a lower absolute precision."""
        if prec >= self.prec:
            return self
        va, ua = self._parts()
        return PadicElement._normalized(self.p, va, ua, prec)

    def digits(self) -> List[int]:
        """Base-p digits of the unit part, least significant first."""
        out, u = [], self.unit
        for _ in range(self.relative_precision):
            out.append(u % self.p)
            u //= self.p
        return out

    def to_rational_residue(self) -> Rational:
        """The rational p^v * u with 0 <= u < p^(prec - v)."""
        if self.is_zero():
            return Rational(0)
        return Rational(self.unit) * Rational(self.p) ** int(self.valuation)

    def norm(self) -> Fraction:
        """|x|_p = p^-v as an exact fraction (0 for zero at precision)."""
        if self.is_zero():
            return Fraction(0)
        return Fraction(1, self.p) ** int(self.valuation)

    def to_dict(self) -> dict:
        val = self.prec if self.is_zero() else int(self.valuation)
        return {"p": self.p, "val": val, "digits": self.digits(), "prec": self.prec}

    @classmethod
    def from_dict(cls, data: dict) -> "PadicElement":
        p, prec = int(data["p"]), int(data["prec"])
        digits = list(data.get("digits", []))
        if not digits:
            return cls.zero(p, prec)
        u = sum(int(d) * p ** i for i, d in enumerate(digits))
        return cls._normalized(p, int(data["val"]), u, prec)

    def __repr__(self):
        if self.is_zero():
            return f"O({self.p}^{self.prec})"
        return f"{self.p}^{int(self.valuation)}*{self.unit} + O({self.p}^{self.prec})"


# ─── Newton polygons ────────────────────────────────────────────────────

@dataclass
class NewtonPolygon:
    prime: int
    vertices: List[Tuple[int, Rational]]
    slopes: List[Tuple[Rational, int]]
    zero_roots: int = 0

    def root_valuations(self) -> List:
        """Valuations of the roots in C_p with multiplicity, zero roots as +inf."""
        out = [INF] * self.zero_roots
        for slope, length in self.slopes:
            out.extend([-slope] * length)
        return out

    def to_dict(self) -> dict:
        return {"prime": self.prime,
                "vertices": [[i, rational_to_str(v)] for i, v in self.vertices],
                "slopes": [[rational_to_str(s), n] for s, n in self.slopes],
                "zero_roots": self.zero_roots}


def _cross(o, a, b) -> Rational:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_hull(points: Sequence[Tuple[int, Rational]]) -> List[Tuple[int, Rational]]:
    hull: List[Tuple[int, Rational]] = []
    for pt in sorted(points):
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        hull.append(pt)
    return hull


def newton_polygon(poly, prime: int) -> NewtonPolygon:
    """
    Newton polygon of a rational polynomial at a prime.

    Args:
        poly: Nonzero Poly in X (or ascending coefficient list)
        prime: p >= 2

    Returns:
        NewtonPolygon whose slope s with length m means m roots of valuation -s
    """
    coeffs = list(poly) if isinstance(poly, (list, tuple)) else poly_coeffs(poly)
    if prime < 2:
        raise PreconditionError("prime must be at least 2")
    points = [(i, Rational(valuation_q(c, prime))) for i, c in enumerate(coeffs) if to_rational(c) != 0]
    if not points:
        raise PreconditionError("Newton polygon of the zero polynomial")
    hull = lower_hull(points)
    slopes = []
    for (i0, v0), (i1, v1) in zip(hull, hull[1:]):
        slopes.append((Rational(v1 - v0, i1 - i0), i1 - i0))
    return NewtonPolygon(prime, hull, slopes, zero_roots=points[0][0])


# ─── Hensel lifting ─────────────────────────────────────────────────────

def _integral_coeffs(poly) -> List[int]:
    coeffs = [to_rational(c) for c in (poly if isinstance(poly, (list, tuple)) else poly_coeffs(poly))]
    den = math.lcm(*[int(c.q) for c in coeffs]) if coeffs else 1
    ints = [int(c * den) for c in coeffs]
    g = math.gcd(*ints) or 1
    return [c // g for c in ints]


def _eval_mod(coeffs: Sequence[int], x: int, mod: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % mod
    return acc


def hensel_root(poly, prime: int, seed: int, precision: int = DEFAULT_PRECISION) -> PadicElement:
    """
    Lift a simple root mod p to a root mod p^M by Newton iteration.

    Raises:
        HenselError: seed is not a simple root modulo p
    """
    f = _integral_coeffs(poly)
    df = [i * c for i, c in enumerate(f)][1:]
    r = seed % prime
    if _eval_mod(f, r, prime) != 0 or _eval_mod(df, r, prime) == 0:
        raise HenselError(f"Hensel inapplicable: {seed} is not a simple root mod {prime}")
    mod = prime ** precision
    k = 1
    while k < precision:
        k = min(2 * k, precision)
        m = prime ** k
        r = (r - _eval_mod(f, r, m) * pow(_eval_mod(df, r, m), -1, m)) % m
    assert _eval_mod(f, r, mod) == 0
    log.debug(f"hensel lift of {seed} mod {prime} to precision {precision}")
    return PadicElement.from_rational(r, prime, precision)


# ─── log / exp ──────────────────────────────────────────────────────────

def _min_domain_valuation(p: int) -> int:
    return 2 if p == 2 else 1


def padic_log(u: PadicElement) -> PadicElement:
    """log(u) = sum (-1)^(k+1) x^k / k with x = u - 1, for v(x) >= 1 (>= 2 at p = 2)."""
    x = u - 1
    if x.is_zero():
        return PadicElement.zero(u.p, x.prec)
    vx = int(x.valuation)
    if vx < _min_domain_valuation(u.p):
        raise PreconditionError(f"log outside its convergence domain: v(u-1) = {vx}")
    total = PadicElement.zero(u.p, x.prec)
    power = x
    k = 1
    while k * vx - math.log(k, u.p) < x.prec:
        term = power / k
        total = total + (term if k % 2 else -term)
        power = power * x
        k += 1
    return total


def padic_exp(x: PadicElement) -> PadicElement:
    """exp(x) = sum x^k / k! for v(x) >= 1 (>= 2 at p = 2)."""
    one = PadicElement.from_rational(1, x.p, x.prec)
    if x.is_zero():
        return one
    vx = int(x.valuation)
    p = x.p
    if vx < _min_domain_valuation(p):
        raise PreconditionError(f"exp outside its convergence domain: v(x) = {vx}")
    total = one
    term = one
    k = 1
    # v(x^k / k!) >= k * (vx - 1/(p-1))
    while k * (vx * (p - 1) - 1) < x.prec * (p - 1):
        term = term * x / k
        total = total + term
        k += 1
    return total.with_precision(x.prec)


# ─── One-variable series and Strassmann ─────────────────────────────────

IDENTICALLY_ZERO = "identically_zero"


@dataclass
class PadicSeries1:
    """
    Truncated power series sum a_n t^n over Q_p.

    ``tail_valuation`` bounds v(a_n) from below for n > T: +inf for a
    polynomial, None when no certificate is available.
    """
    prime: int
    coefficients: List[PadicElement]
    tail_valuation: Optional[float] = INF

    @property
    def truncation(self) -> int:
        return len(self.coefficients) - 1

    def min_valuation(self):
        return min((c.valuation for c in self.coefficients), default=INF)

    def gauss_norm(self) -> Fraction:
        v = self.min_valuation()
        return Fraction(0) if v == INF else Fraction(1, self.prime) ** int(v)

    def evaluate(self, t: PadicElement) -> PadicElement:
        acc = PadicElement.zero(self.prime, min(c.prec for c in self.coefficients))
        for c in reversed(self.coefficients):
            acc = acc * t + c
        return acc

    def to_dict(self) -> dict:
        tail = None if self.tail_valuation is None else (
            "exact" if self.tail_valuation == INF else rational_to_str(Rational(self.tail_valuation)))
        return {"p": self.prime, "coeffs": [c.to_dict() for c in self.coefficients], "tail": tail}


def strassmann_count(s: PadicSeries1):
    """
    Upper bound on the zeros of a series in the closed unit disk.

    Returns:
        The largest index N attaining the minimal coefficient valuation, or
        IDENTICALLY_ZERO when every coefficient vanishes at precision

    Raises:
        InconclusiveTruncationError: the maximum may continue past the truncation
    """
    vals = [c.valuation for c in s.coefficients]
    vmin = min(vals, default=INF)
    if vmin == INF:
        return IDENTICALLY_ZERO
    n = max(i for i, v in enumerate(vals) if v == vmin)
    if s.tail_valuation is None:
        if n == s.truncation:
            raise InconclusiveTruncationError(
                f"maximal coefficient at the truncation order {n} with no tail certificate")
        return n
    if not s.tail_valuation > vmin:
        raise InconclusiveTruncationError(
            f"tail valuation {s.tail_valuation} does not beat the coefficient minimum {vmin}")
    return n


# ─── Places above p ─────────────────────────────────────────────────────

@dataclass
class PlaceAbove:
    prime: int
    residue_degree: int
    ramification: int
    valuations: Tuple[Rational, ...] = field(default_factory=tuple)
    local_factor: List[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"p": self.prime, "f": self.residue_degree, "e": self.ramification,
                "valuations": {str(i): ("inf" if v == INF else rational_to_str(v))
                               for i, v in enumerate(self.valuations)}}


def _integral_generator(fld: NumberField) -> Tuple[List[int], int]:
    """Monic integral minimal polynomial of D*γ, and D."""
    coeffs = poly_coeffs(fld.minimal_poly)
    n = len(coeffs) - 1
    d = math.lcm(*[int(c.q) for c in coeffs])
    return [int(c * Rational(d) ** (n - i)) for i, c in enumerate(coeffs)], d


def _rescaled(a: AlgebraicNumber, d: int) -> Poly:
    # A(γ) = A(γ'/d) as a polynomial in γ'
    return poly_from_coeffs([c / Rational(d) ** i for i, c in enumerate(a.coords)])


def _factor_mod_p(m_int: List[int], p: int) -> List[List[int]]:
    pm = Poly(list(reversed(m_int)), X, modulus=p)
    _, facs = pm.factor_list()
    if any(k > 1 for _, k in facs):
        return []
    return [[int(c) % p for c in f.monic().all_coeffs()] for f, _ in facs]


def places_above(fld: NumberField, prime: int, elements: Sequence[AlgebraicNumber],
                 precision: int = DEFAULT_PRECISION) -> List[PlaceAbove]:
    """
    Places of a number field above p with element valuations (v(p) = 1).

    Unramified primes are split by Hensel-lifting the factorization of the
    minimal polynomial mod p; a totally ramified prime is detected from a
    one-segment Newton polygon after an integer shift. Anything else asks
    for more precision.

    Raises:
        PrecisionError: factor separation is indeterminate at this precision
    """
    for a in elements:
        if a.field != fld and a.field.degree != 1:
            raise PreconditionError("element does not lie in the given field")

    if fld.degree == 1:
        vals = tuple(Rational(valuation_q(a.coords[0], prime)) if not a.is_zero() else INF for a in elements)
        return [PlaceAbove(prime, 1, 1, vals, [0, 1])]

    lifted = [fld.rational(a.coords[0]) if a.field.degree == 1 else a for a in elements]
    m_int, d = _integral_generator(fld)
    n = len(m_int) - 1
    factors = _factor_mod_p(m_int, prime)

    places: List[PlaceAbove] = []
    if factors:
        if len(factors) == 1:
            local = [list(reversed(m_int))]
        else:
            dense = [ZZ(c) for c in reversed(m_int)]
            local = dup_zz_hensel_lift(ZZ(prime), dense, [[ZZ(c) for c in f] for f in factors], precision, ZZ)
        for phi in local:
            phi_poly = Poly([int(c) for c in phi], X, domain=QQ)
            vals = []
            for a in lifted:
                if a.is_zero():
                    vals.append(INF)
                    continue
                res = Rational(_sympy_resultant(phi_poly.as_expr(), _rescaled(a, d).as_expr(), X))
                v = Rational(valuation_q(res, prime), phi_poly.degree()) if res != 0 else INF
                if v == INF or v * phi_poly.degree() >= precision - GUARD_DIGITS:
                    raise PrecisionError(f"raise precision: element valuation not separated at M={precision}")
                vals.append(v)
            places.append(PlaceAbove(prime, phi_poly.degree(), 1, tuple(vals),
                                     [int(c) for c in reversed(phi)]))
    else:
        for shift in range(prime):
            shifted = Poly(list(reversed(m_int)), X, domain=QQ).as_expr().subs(X, X + shift)
            np_ = newton_polygon(Poly(shifted, X, domain=QQ), prime)
            if len(np_.slopes) == 1 and np_.zero_roots == 0 and (-np_.slopes[0][0]).q == n:
                vals = tuple(INF if a.is_zero() else Rational(valuation_q(a.norm(), prime), n) for a in lifted)
                places.append(PlaceAbove(prime, 1, n, vals, list(m_int)))
                break
        else:
            raise PrecisionError(f"raise precision: cannot separate the places above {prime}")

    total = sum(pl.residue_degree * pl.ramification for pl in places)
    if total != n:
        raise PrecisionError(f"raise precision: place degrees sum to {total}, expected {n}")
    log.debug(f"{len(places)} place(s) above {prime} in a degree {n} field")
    return places
