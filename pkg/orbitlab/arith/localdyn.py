"""
p-adic local dynamics along a rational orbit.

A good prime p is one where the map reduces well, x stays integral and the
reduction of x falls into a residue cycle whose multiplier has finite
order; with m = (cycle length) * (multiplier order) the iterate g = f^m
fixes every residue disk of the cycle and is congruent to the identity
there. The flow Phi(t, y) = sum_k binomial(t, k) Delta^k(y), where
Delta = g - id on orbits, interpolates n -> g^n(y) analytically in t and
reduces return-time questions to zeros of one-variable series.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import Matrix, Poly, QQ, Rational, Symbol, binomial, expand, factorial, primerange, symbols
from sympy.functions.combinatorial.numbers import stirling
from sympy.ntheory import n_order
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from orbitlab.app_settings import (
    DEFAULT_PRECISION, DEFAULT_TRUNCATION, DIRECT_EXACT_BITS, GOOD_PRIME_MAX, GUARD_DIGITS, M_MAX,
    MODULAR_CHECK_PRIMES, N_DIRECT, T_ARC,
)
from orbitlab.arith.exactnum import X, Y
from orbitlab.arith.padic import (
    IDENTICALLY_ZERO, INF, PadicElement, PadicSeries1, PlaceAbove, strassmann_count, valuation_q,
)
from orbitlab.arith.projdyn import Z, FixedPointData, MapSpec, ProjPoint
from orbitlab.arith.tate import PolydiskMap
from orbitlab.errors import (
    ConvergenceError, InconclusiveTruncationError, NotPolydiskSelfMapError, PrecisionError,
    PreconditionError,
)
from orbitlab.utils.logger import get_logger

log = get_logger('localdyn')

_U = Symbol('u')
_W1, _W2 = symbols('w1 w2')


# ─── Coordinates and conditions ─────────────────────────────────────────

def _components(f: MapSpec) -> List[MapSpec]:
    if f.space == "P1":
        return [f]
    if f.space == "P1xN":
        return list(f.components)
    raise PreconditionError("orbit questions are posed for maps of P1 or (P1)^N")


def coordinate_symbols(f: MapSpec) -> Tuple[Symbol, ...]:
    """``x`` on P1, ``x1 .. xN`` on (P1)^N."""
    if f.space == "P1":
        return (X,)
    return tuple(symbols(f"x1:{f.factor_count + 1}"))


def parse_condition(f: MapSpec, condition) -> Poly:
    """A polynomial condition in the coordinate symbols of ``f``."""
    gens = coordinate_symbols(f)
    if isinstance(condition, str):
        local = {str(g): g for g in gens}
        condition = parse_expr(condition, local_dict=local,
                               transformations=standard_transformations + (convert_xor,))
    poly = Poly(condition, *gens, domain=QQ)
    if poly.is_zero:
        raise PreconditionError("the zero polynomial does not cut out a proper subvariety")
    return poly


def _integral_terms(poly: Poly) -> List[Tuple[Tuple[int, ...], int]]:
    """Terms of a primitive integral multiple of ``poly``."""
    terms = poly.terms()
    den = math.lcm(*[int(Rational(c).q) for _, c in terms])
    ints = [(m, int(Rational(c) * den)) for m, c in terms]
    g = math.gcd(*[c for _, c in ints])
    return [(m, c // g) for m, c in ints]


def _start_values(f: MapSpec, x: ProjPoint) -> List[Rational]:
    if x.space != f.space or len(x.factors) != f.factor_count:
        raise PreconditionError("point and map live on different spaces")
    values = []
    for i in range(f.factor_count):
        v = x.affine_value(i)
        if v is None or not v.is_rational():
            raise PreconditionError("the starting point must have finite rational coordinates")
        values.append(v.as_rational())
    return values


def _integral_forms(g: MapSpec) -> Tuple[List[int], List[int]]:
    """Jointly primitive integral coefficients of (F1, F2), x^d first."""
    d = g.degree
    rows = [[Rational(F.coeff_monomial((d - j, j))) for j in range(d + 1)] for F in g.forms]
    den = math.lcm(*[int(c.q) for row in rows for c in row])
    ints = [[int(c * den) for c in row] for row in rows]
    content = math.gcd(*[c for row in ints for c in row])
    return [c // content for c in ints[0]], [c // content for c in ints[1]]


def homogeneous_resultant(a: Sequence[int], b: Sequence[int]) -> int:
    """Resultant of two binary forms of formal degree d (coefficients x^d first)."""
    d = len(a) - 1
    rows = [[0] * i + list(a) + [0] * (d - 1 - i) for i in range(d)]
    rows += [[0] * i + list(b) + [0] * (d - 1 - i) for i in range(d)]
    return int(Matrix(rows).det())


# ─── Reduction modulo p ─────────────────────────────────────────────────

def _form_mod(coeffs: Sequence[int], a: int, b: int, q: int) -> int:
    d = len(coeffs) - 1
    return sum(c * pow(a, d - j, q) * pow(b, j, q) for j, c in enumerate(coeffs)) % q


def _step_mod(red: Tuple[List[int], List[int]], pt: Tuple[int, int], q: int) -> Optional[Tuple[int, int]]:
    """Image of a normalized point of P1(F_q); None when both forms vanish."""
    a, b = _form_mod(red[0], *pt, q), _form_mod(red[1], *pt, q)
    if b:
        return (a * pow(b, -1, q) % q, 1)
    return (1, 0) if a else None


def _affine_mod(coeffs: Sequence[int], z: int, q: int, derivative: bool = False) -> int:
    d = len(coeffs) - 1
    if derivative:
        return sum(c * (d - j) * pow(z, d - j - 1, q) for j, c in enumerate(coeffs) if d - j > 0) % q
    return sum(c * pow(z, d - j, q) for j, c in enumerate(coeffs)) % q


@dataclass
class ResidueCycle:
    """Where the reduction of one coordinate of x ends up modulo p."""
    tail: int
    cycle: List[int]
    multiplier: int
    period: int

    def to_dict(self) -> dict:
        return {"tail": self.tail, "cycle": self.cycle, "multiplier": self.multiplier,
                "period": self.period}


@dataclass
class GoodPrimeReport:
    prime: int
    reduction: List[List[List[int]]]
    good_reduction: bool
    periodic_residue: bool
    period: int
    cycles: List[ResidueCycle]
    failures: Dict[int, str] = field(default_factory=dict)

    @property
    def tail(self) -> int:
        return max(c.tail for c in self.cycles)

    def to_dict(self) -> dict:
        return {
            "prime": self.prime,
            "reduction": self.reduction,
            "good_reduction": self.good_reduction,
            "periodic_residue": self.periodic_residue,
            "period": self.period,
            "tail": self.tail,
            "cycles": [c.to_dict() for c in self.cycles],
            "failures": {str(p): r for p, r in self.failures.items()},
        }


def _residue_cycle(red, start: int, p: int) -> Tuple[Optional[ResidueCycle], str]:
    seen: Dict[Tuple[int, int], int] = {}
    path: List[Tuple[int, int]] = []
    pt = (start % p, 1)
    while pt not in seen:
        seen[pt] = len(path)
        path.append(pt)
        pt = _step_mod(red, pt, p)
    tail = seen[pt]
    cycle = path[tail:]
    if any(b == 0 for _, b in cycle):
        return None, "residue cycle passes through infinity"
    mu = 1
    for z, _ in cycle:
        num, den = _affine_mod(red[0], z, p), _affine_mod(red[1], z, p)
        dnum, dden = _affine_mod(red[0], z, p, True), _affine_mod(red[1], z, p, True)
        mu = mu * (dnum * den - num * dden) * pow(den * den, -1, p) % p
    if mu == 0:
        return None, "superattracting residue cycle"
    period = len(cycle) * int(n_order(mu, p))
    return ResidueCycle(tail, [z for z, _ in cycle], mu, period), ""


def _try_prime(f: MapSpec, values: Sequence[Rational], p: int, m_max: int):
    comps = _components(f)
    if any(int(v.q) % p == 0 for v in values):
        return None, "denominator of the point"
    if any(int(Rational(c).q) % p == 0 for g in comps for F in g.forms for c in F.coeffs()):
        return None, "denominator of the map"
    reduction, cycles = [], []
    for g, v in zip(comps, values):
        a, b = _integral_forms(g)
        if homogeneous_resultant(a, b) % p == 0:
            return None, "bad reduction"
        red = ([c % p for c in a], [c % p for c in b])
        cyc, reason = _residue_cycle(red, int(v.p) * pow(int(v.q), -1, p), p)
        if cyc is None:
            return None, reason
        reduction.append([red[0], red[1]])
        cycles.append(cyc)
    m = math.lcm(*[c.period for c in cycles])
    if m > m_max:
        return None, f"period {m} exceeds {m_max}"
    return GoodPrimeReport(p, reduction, True, True, m, cycles), ""


def find_good_prime(f: MapSpec, x: ProjPoint, p_min: int = 3, p_max: int = GOOD_PRIME_MAX,
                    m_max: int = M_MAX) -> GoodPrimeReport:
    """
    Smallest prime in [p_min, p_max] with good reduction along the orbit of x.

    Args:
        f: map of P1 or (P1)^N over Q
        x: starting point with rational affine coordinates
        p_min: first prime tried
        p_max: last prime tried
        m_max: cap on the period m

    Returns:
        GoodPrimeReport with the period m and the residue cycles

    Raises:
        PreconditionError: no prime in range qualifies; the message lists why per prime
    """
    if p_min > p_max:
        raise PreconditionError(f"empty prime range [{p_min}, {p_max}]")
    values = _start_values(f, x)
    failures: Dict[int, str] = {}
    for p in primerange(p_min, p_max + 1):
        report, reason = _try_prime(f, values, int(p), m_max)
        if report is not None:
            report.failures = failures
            log.info(f"good prime {p}: period {report.period}, tail {report.tail}")
            return report
        failures[int(p)] = reason
        log.debug(f"prime {p} rejected: {reason}")
    detail = "; ".join(f"{p}: {r}" for p, r in failures.items()) or "no primes"
    raise PreconditionError(f"no good prime in [{p_min}, {p_max}] ({detail})")


# ─── Series over Q_p with certified tails ───────────────────────────────

def _val(c: PadicElement):
    """Valuation lower bound; a zero at precision counts as its precision."""
    return c.prec if c.is_zero() else c.valuation


def _floor_val(s: PadicSeries1):
    return min([_val(c) for c in s.coefficients] + [s.tail_valuation])


def _s_zero(p: int, K: int, prec: int) -> PadicSeries1:
    return PadicSeries1(p, [PadicElement.zero(p, prec) for _ in range(K + 1)], INF)


def _s_const(c: PadicElement, K: int) -> PadicSeries1:
    s = _s_zero(c.p, K, c.prec)
    s.coefficients[0] = c
    return s


def _s_add(a: PadicSeries1, b: PadicSeries1) -> PadicSeries1:
    coeffs = [x + y for x, y in zip(a.coefficients, b.coefficients)]
    return PadicSeries1(a.prime, coeffs, min(a.tail_valuation, b.tail_valuation))


def _s_scale(a: PadicSeries1, c) -> PadicSeries1:
    c = a.coefficients[0]._coerce(c)
    return PadicSeries1(a.prime, [x * c for x in a.coefficients], a.tail_valuation + _val(c))


def _s_mul(a: PadicSeries1, b: PadicSeries1) -> PadicSeries1:
    K = a.truncation
    prec = min(c.prec for c in a.coefficients + b.coefficients)
    out = [PadicElement.zero(a.prime, prec) for _ in range(K + 1)]
    dropped = INF
    for i, ai in enumerate(a.coefficients):
        if ai.is_zero():
            continue
        for j, bj in enumerate(b.coefficients):
            if bj.is_zero():
                continue
            if i + j <= K:
                out[i + j] = out[i + j] + ai * bj
            else:
                dropped = min(dropped, ai.valuation + bj.valuation)
    tail = min(dropped, a.tail_valuation + _floor_val(b), b.tail_valuation + _floor_val(a))
    return PadicSeries1(a.prime, out, tail)


def _s_compose(a: PadicSeries1, b: PadicSeries1) -> PadicSeries1:
    """a(b(u)) for b of Gauss norm at most 1."""
    K = a.truncation
    acc = _s_const(a.coefficients[-1], K)
    for c in reversed(a.coefficients[:-1]):
        acc = _s_add(_s_mul(acc, b), _s_const(c, K))
    acc.tail_valuation = min(acc.tail_valuation, a.tail_valuation)
    return acc


def _s_identity(p: int, K: int, prec: int) -> PadicSeries1:
    s = _s_zero(p, K, prec)
    s.coefficients[1] = PadicElement.from_rational(1, p, prec)
    return s


def _s_from_rationals(coeffs: Sequence[Rational], p: int, K: int, prec: int) -> PadicSeries1:
    kept = [PadicElement.from_rational(c, p, prec) for c in coeffs[:K + 1]]
    kept += [PadicElement.zero(p, prec)] * (K + 1 - len(kept))
    tail = min((valuation_q(c, p) for c in coeffs[K + 1:]), default=INF)
    return PadicSeries1(p, kept, tail)


def _s_inverse(d: PadicSeries1) -> PadicSeries1:
    """1/d for d_0 a unit and v(d_k) >= k."""
    d0 = d.coefficients[0]
    if d0.is_zero() or d0.valuation != 0:
        raise PreconditionError("the map has a pole in the residue disk")
    K = d.truncation
    inv = [1 / d0]
    for n in range(1, K + 1):
        acc = PadicElement.zero(d.prime, d0.prec)
        for k in range(1, n + 1):
            acc = acc + d.coefficients[k] * inv[n - k]
        inv.append(-acc / d0)
    return PadicSeries1(d.prime, inv, Fraction(K + 1))


def _disk_series(g: MapSpec, z: int, z_next: int, p: int, K: int, prec: int) -> PadicSeries1:
    """(g(z + p u) - z_next) / p as a series in u."""
    def shifted(poly: Poly) -> List[Rational]:
        e = expand(poly.as_expr().subs(X, z + p * _U))
        return list(reversed(Poly(e, _U, domain=QQ).all_coeffs()))
    num = _s_from_rationals(shifted(g.affine_numerator()), p, K, prec)
    den = _s_from_rationals(shifted(g.affine_denominator()), p, K, prec)
    image = _s_mul(num, _s_inverse(den))
    image.coefficients[0] = image.coefficients[0] - z_next
    return _s_scale(image, Rational(1, p))


def _contraction(g_series: PadicSeries1) -> Fraction:
    """min valuation of g(u) - u over the closed unit disk."""
    p, K = g_series.prime, g_series.truncation
    prec = min(c.prec for c in g_series.coefficients)
    diff = _s_add(g_series, _s_scale(_s_identity(p, K, prec), -1))
    return _floor_val(diff)


# ─── Arcs and flows ─────────────────────────────────────────────────────

@dataclass
class ArcComponent:
    """
    One coordinate of an arc. In ``global`` mode the map is affine with
    p-integral coefficients and g - id is measured on all of Z_p; in
    ``residue`` mode it is measured on each disk of the residue cycle in
    the scaled coordinate u = (x - z) / p.
    """
    mode: str
    tail: int
    centers: List[int]
    contraction: List
    shift: int

    def contraction_at(self, n: int):
        """Contraction exponent on the disk holding the n-th orbit point."""
        if self.mode == "global":
            return self.contraction[0]
        return self.contraction[(n - self.tail) % len(self.centers)]

    def to_dict(self) -> dict:
        return {"mode": self.mode, "tail": self.tail, "centers": self.centers,
                "contraction": [str(c) if c != INF else "inf" for c in self.contraction],
                "shift": self.shift}


@dataclass
class ArcFlow:
    """
    Analytic interpolation t -> g^t of g = f^m through the orbit of x.

    ``orbit`` holds f^n(x) in Q_p for n up to tail + m * (T + 1) so that
    every residue class has T + 1 iterates of g available; ``series``
    holds the flow through the center f^tail(x), one series per coordinate.
    """
    map: MapSpec
    prime: int
    period: int
    tail: int
    truncation: int
    precision: int
    components: List[ArcComponent]
    orbit: List[List[PadicElement]]
    series: List[PadicSeries1] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return len(self.components)

    @property
    def center(self) -> List[PadicElement]:
        return self.orbit[self.tail]

    def differences(self, n: int) -> List[List[PadicElement]]:
        """Delta^k(f^n x) for k = 0..T, per coordinate."""
        K, m = self.truncation, self.period
        if n + m * K >= len(self.orbit):
            raise PreconditionError(f"orbit index {n} is outside the computed arc")
        out = []
        for i in range(self.dimension):
            pts = [self.orbit[n + m * j][i] for j in range(K + 1)]
            deltas = []
            for k in range(K + 1):
                acc = PadicElement.zero(self.prime, self.precision)
                for j in range(k + 1):
                    acc = acc + pts[j] * int((-1) ** (k - j) * binomial(k, j))
                deltas.append(acc)
            out.append(deltas)
        return out

    def series_at(self, n: int) -> List[PadicSeries1]:
        """Flow series in t through f^n(x), n >= tail."""
        K, p = self.truncation, self.prime
        out = []
        for comp, deltas in zip(self.components, self.differences(n)):
            c = comp.contraction_at(n)
            coeffs = []
            for j in range(K + 1):
                acc = PadicElement.zero(p, self.precision)
                for k in range(j, K + 1):
                    s = int(stirling(k, j, kind=1, signed=True))
                    if s and not deltas[k].is_zero():
                        acc = acc + deltas[k] * Rational(s, factorial(k))
                coeffs.append(acc)
            if c == INF:
                tail = INF
            else:
                # v(Delta^k / k!) >= k (c - 1/(p-1)) + shift for k > T
                tail = (K + 1) * (Fraction(c) - Fraction(1, p - 1)) + comp.shift
                cap = math.ceil(tail)
                coeffs = [a.with_precision(cap) for a in coeffs]
            tail = min([tail] + [a.prec for a in coeffs])
            out.append(PadicSeries1(p, coeffs, tail))
        return out

    def to_dict(self) -> dict:
        return {
            "prime": self.prime,
            "period": self.period,
            "tail": self.tail,
            "dimension": self.dimension,
            "truncation": self.truncation,
            "center": [c.to_dict() for c in self.center],
            "components": [c.to_dict() for c in self.components],
            "series": [s.to_dict() for s in self.series],
        }


def _padic_apply(g: MapSpec, y: PadicElement) -> PadicElement:
    def ev(poly: Poly) -> PadicElement:
        acc = PadicElement.zero(y.p, y.prec)
        for c in poly.all_coeffs():
            acc = acc * y + Rational(c)
        return acc
    den = ev(g.affine_denominator())
    if den.is_zero() or den.valuation != 0:
        raise PreconditionError("orbit leaves the residue disks where the map is a unit")
    return ev(g.affine_numerator()) / den


def _affine_coefficients(g: MapSpec) -> Optional[Tuple[Rational, Rational]]:
    if g.degree != 1 or not g.is_polynomial():
        return None
    num = g.affine_numerator()
    den = Rational(g.affine_denominator().LC())
    return Rational(num.coeff_monomial(X)) / den, Rational(num.coeff_monomial(1)) / den


def _global_contraction(g: MapSpec, m: int, p: int) -> Optional[Fraction]:
    ab = _affine_coefficients(g)
    if ab is None:
        return None
    alpha, beta = ab
    if valuation_q(alpha, p) != 0 or valuation_q(beta, p) < 0:
        return None
    alpha_m = alpha ** m
    beta_m = m * beta if alpha == 1 else beta * (alpha_m - 1) / (alpha - 1)
    c = min(valuation_q(alpha_m - 1, p), valuation_q(beta_m, p))
    return c if c == INF else Fraction(c)


def _residue_iterates(g: MapSpec, cyc: ResidueCycle, m: int, p: int, K: int, prec: int) -> List[PadicSeries1]:
    maps = [_disk_series(g, z, cyc.cycle[(k + 1) % len(cyc.cycle)], p, K, prec)
            for k, z in enumerate(cyc.cycle)]
    out = []
    for k in range(len(cyc.cycle)):
        acc = _s_identity(p, K, prec)
        for s in range(m):
            acc = _s_compose(maps[(k + s) % len(maps)], acc)
        out.append(acc)
    return out


def build_arc(f: MapSpec, report: GoodPrimeReport, x: ProjPoint, T: int = T_ARC,
              M: int = DEFAULT_PRECISION, m_max: int = M_MAX) -> ArcFlow:
    """
    Build the flow of f^m through the orbit of x at the report's prime.

    When g - id is not small enough the period is multiplied by p (then
    p^2) as long as it stays within ``m_max``.

    Raises:
        ConvergenceError: the difference operator never dropped below p^(-1/(p-1))
    """
    p = report.prime
    values = _start_values(f, x)
    comps = _components(f)
    prec = M + GUARD_DIGITS
    needed = 2 if p == 2 else 1
    m = report.period
    global_ok = [_global_contraction(g, 1, p) is not None for g in comps]
    disk_maps: Dict[int, List[PadicSeries1]] = {
        i: _residue_iterates(g, report.cycles[i], m, p, T, prec)
        for i, g in enumerate(comps) if not global_ok[i]
    }

    factor = 1
    while True:
        arc_comps = []
        for i, (g, cyc) in enumerate(zip(comps, report.cycles)):
            if global_ok[i]:
                arc_comps.append(ArcComponent("global", cyc.tail, [], [_global_contraction(g, m * factor, p)], 0))
            else:
                arc_comps.append(ArcComponent("residue", cyc.tail, list(cyc.cycle),
                                              [_contraction(s) for s in disk_maps[i]], 1))
        worst = min(c for comp in arc_comps for c in comp.contraction)
        if worst >= needed:
            break
        if m * factor * p > m_max:
            raise ConvergenceError(
                f"iterate further: |f^{m * factor} - id| = {p}^-{worst} is not below {p}^(-1/({p}-1))")
        log.debug(f"contraction {worst} < {needed} at period {m * factor}; raising the period")
        factor *= p
        for i, maps in disk_maps.items():
            raised = []
            for s in maps:
                acc = s
                for _ in range(p - 1):
                    acc = _s_compose(s, acc)
                raised.append(acc)
            disk_maps[i] = raised

    period = m * factor
    tail = report.tail
    orbit = [[PadicElement.from_rational(v, p, prec) for v in values]]
    for _ in range(tail + period * (T + 1)):
        orbit.append([_padic_apply(g, y) for g, y in zip(comps, orbit[-1])])
    arc = ArcFlow(f, p, period, tail, T, prec, arc_comps, orbit)
    arc.series = arc.series_at(tail)
    log.info(f"arc at p={p}: period {period}, contraction {worst}")
    return arc


def _binomials(t: PadicElement, K: int) -> List[PadicElement]:
    out = [PadicElement.from_rational(1, t.p, t.prec)]
    for k in range(1, K + 1):
        out.append(out[-1] * (t - (k - 1)) / k)
    return out


def flow_evaluate(arc: ArcFlow, t, n: Optional[int] = None) -> List[PadicElement]:
    """
    Phi(t, f^n x) for t in Z_p, coordinatewise; n defaults to the center.

    For integer t the value is f^(n + m t)(x) at precision.
    """
    n = arc.tail if n is None else n
    if not isinstance(t, PadicElement):
        t = PadicElement.from_rational(t, arc.prime, arc.precision)
    if not t.is_zero() and t.valuation < 0:
        raise PreconditionError("the flow parameter must lie in Z_p")
    bins = _binomials(t, arc.truncation)
    out = []
    for deltas in arc.differences(n):
        acc = PadicElement.zero(arc.prime, arc.precision)
        for b, d in zip(bins, deltas):
            acc = acc + b * d
        out.append(acc)
    return out


# ─── Return times ───────────────────────────────────────────────────────

def _exact_step(g: MapSpec, v: Optional[Rational]) -> Optional[Rational]:
    if v is None:
        a = Rational(g.forms[0].coeff_monomial((g.degree, 0)))
        b = Rational(g.forms[1].coeff_monomial((g.degree, 0)))
    else:
        a, b = Rational(g.affine_numerator().eval(v)), Rational(g.affine_denominator().eval(v))
    return None if b == 0 else a / b


def _vanishes(terms, point: Sequence[Optional[Rational]]) -> bool:
    if any(v is None for v in point):
        return False
    total = Rational(0)
    for mon, c in terms:
        term = Rational(c)
        for v, e in zip(point, mon):
            term *= v ** e
        total += term
    return total == 0


def _bits(v: Optional[Rational]) -> int:
    return 0 if v is None else max(abs(int(v.p)).bit_length(), int(v.q).bit_length())


def _reduce_point(v: Optional[Rational], q: int) -> Tuple[int, int]:
    if v is None or int(v.q) % q == 0:
        return (1, 0)
    return (int(v.p) * pow(int(v.q), -1, q) % q, 1)


def _rejects(terms, pts: Sequence[Tuple[int, int]], q: int) -> bool:
    if any(b == 0 for _, b in pts):
        return False
    total = 0
    for mon, c in terms:
        term = c
        for (a, _), e in zip(pts, mon):
            term = term * pow(a, e, q)
        total += term
    return total % q != 0


def _direct_search(f: MapSpec, values: Sequence[Rational], conditions: Sequence[Poly],
                   n_direct: int) -> Tuple[List[int], List[int], int]:
    """
    Return times up to ``n_direct``: exact while heights stay in the window,
    then a sieve modulo MODULAR_CHECK_PRIMES.

    Returns:
        (exact hits, unconfirmed candidates, last exactly checked n)
    """
    comps = _components(f)
    term_sets = [_integral_terms(c) for c in conditions]
    point: List[Optional[Rational]] = list(values)
    hits: List[int] = []
    n = 0
    while True:
        if all(_vanishes(t, point) for t in term_sets):
            hits.append(n)
        if n == n_direct:
            return hits, [], n
        if max(_bits(v) for v in point) > DIRECT_EXACT_BITS:
            break
        point = [_exact_step(g, v) for g, v in zip(comps, point)]
        n += 1

    last_exact = n
    log.debug(f"exact search stopped at n={n}; sieving modulo {MODULAR_CHECK_PRIMES}")
    reds = {q: [[[c % q for c in form] for form in _integral_forms(g)] for g in comps]
            for q in MODULAR_CHECK_PRIMES}
    state = {q: [_reduce_point(v, q) for v in point] for q in MODULAR_CHECK_PRIMES}
    unconfirmed: List[int] = []
    for n in range(last_exact + 1, n_direct + 1):
        alive = []
        for q in list(state):
            nxt = [_step_mod(red, pt, q) for red, pt in zip(reds[q], state[q])]
            if any(pt is None for pt in nxt):
                del state[q]
                continue
            state[q] = nxt
            alive.append(q)
        if not alive:
            log.warning(f"modular sieve lost every prime at n={n}")
            break
        # a prime rejects n only when the reduced point is affine and some condition is a unit
        if not any(_rejects(t, state[q], q) for t in term_sets for q in alive):
            unconfirmed.append(n)
    return hits, unconfirmed, last_exact


def return_times_bruteforce(f: MapSpec, x: ProjPoint, conditions, n: int) -> List[int]:
    """Every k <= n with f^k(x) on Z, by exact arithmetic only."""
    comps = _components(f)
    polys = [parse_condition(f, c) for c in _as_list(conditions)]
    term_sets = [_integral_terms(c) for c in polys]
    point: List[Optional[Rational]] = _start_values(f, x)
    hits = []
    for k in range(n + 1):
        if all(_vanishes(t, point) for t in term_sets):
            hits.append(k)
        point = [_exact_step(g, v) for g, v in zip(comps, point)]
    return hits


def _as_list(conditions) -> list:
    return list(conditions) if isinstance(conditions, (list, tuple)) else [conditions]


def _substitute(terms, series: Sequence[PadicSeries1]) -> PadicSeries1:
    p, K = series[0].prime, series[0].truncation
    prec = min(c.prec for s in series for c in s.coefficients)
    total = _s_zero(p, K, prec)
    powers: Dict[Tuple[int, int], PadicSeries1] = {}
    for mon, c in terms:
        term = _s_const(PadicElement.from_rational(c, p, prec), K)
        for i, e in enumerate(mon):
            if e == 0:
                continue
            if (i, e) not in powers:
                acc = series[i]
                for _ in range(e - 1):
                    acc = _s_mul(acc, series[i])
                powers[(i, e)] = acc
            term = _s_mul(term, powers[(i, e)])
        total = _s_add(total, term)
    total.tail_valuation = min([total.tail_valuation] + [c.prec for c in total.coefficients])
    return total


@dataclass
class ClassVerdict:
    residue: int
    status: str
    bound: Optional[int]
    hits: List[int]
    certified: bool

    def to_dict(self) -> dict:
        return {"residue": self.residue, "status": self.status, "bound": self.bound,
                "hits": self.hits, "certified": self.certified}


@dataclass
class DMLVerdict:
    hits: List[int]
    progressions: List[Dict[str, int]]
    confidence: str
    n_max: int
    prime: int
    period: int
    classes: List[ClassVerdict] = field(default_factory=list)
    unconfirmed: List[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "hits": self.hits,
            "progressions": self.progressions,
            "confidence": self.confidence,
            "n_max": self.n_max,
            "prime": self.prime,
            "period": self.period,
            "classes": [c.to_dict() for c in self.classes],
            "unconfirmed": self.unconfirmed,
        }


def dml_decide(f: MapSpec, x: ProjPoint, conditions, arc: ArcFlow, n_direct: int = N_DIRECT) -> DMLVerdict:
    """
    Decide {n >= 0 : f^n(x) in Z} for Z cut out by the given polynomials.

    Each residue class n = tail + j + m i is either a full progression (the
    flow series of every condition vanishes at precision) or finite with at
    most Strassmann-many members; finite members come from direct search.

    Raises:
        PrecisionError: direct search contradicts the local analysis
    """
    polys = [parse_condition(f, c) for c in _as_list(conditions)]
    term_sets = [_integral_terms(c) for c in polys]
    values = _start_values(f, x)
    hits, unconfirmed, last_exact = _direct_search(f, values, polys, n_direct)
    hit_set = set(hits)
    m, n0 = arc.period, arc.tail

    classes: List[ClassVerdict] = []
    progressions: List[Dict[str, int]] = []
    for j in range(m):
        start = n0 + j
        members = [n for n in hits if n >= start and (n - start) % m == 0]
        local = [_substitute(t, arc.series_at(start)) for t in term_sets]
        counts, inconclusive = [], False
        for s in local:
            try:
                counts.append(strassmann_count(s))
            except InconclusiveTruncationError:
                inconclusive = True
        finite_counts = [c for c in counts if c != IDENTICALLY_ZERO]
        if not finite_counts and not inconclusive:
            missing = [n for n in range(start, last_exact + 1, m) if n not in hit_set]
            if missing:
                raise PrecisionError(f"class {start} mod {m} vanishes locally but n={missing[0]} is no hit")
            progressions.append({"a": start, "b": m})
            classes.append(ClassVerdict(start, "full", None, members, True))
            continue
        if not finite_counts:
            classes.append(ClassVerdict(start, "unknown", None, members, False))
            continue
        bound = min(finite_counts)
        if len(members) > bound:
            raise PrecisionError(
                f"class {start} mod {m}: {len(members)} direct hits exceed the Strassmann bound {bound}")
        classes.append(ClassVerdict(start, "finite", bound, members, len(members) == bound))

    full_starts = [(pr["a"], pr["b"]) for pr in progressions]
    finite_hits = sorted(n for n in hits if not any(n >= a and (n - a) % b == 0 for a, b in full_starts))
    certified = all(c.certified for c in classes) and not unconfirmed
    verdict = DMLVerdict(finite_hits, progressions, "certified" if certified else "evidence",
                         n_direct, arc.prime, m, classes, unconfirmed)
    log.info(f"dml: hits {finite_hits}, progressions {progressions}, {verdict.confidence}")
    return verdict


# ─── Invariant polydisks ────────────────────────────────────────────────

def _affine_pair(f: MapSpec):
    """Affine polynomial components (e1, e2) in x, y of a P2 or split map."""
    if f.space == "P2":
        den = Poly(f.forms[2].as_expr().subs(Z, 1), X, Y, domain=QQ)
        if den.total_degree() != 0:
            raise PreconditionError("invariant polydisks are built for polynomial maps of A^2")
        c = Rational(den.LC())
        return tuple(f.forms[i].as_expr().subs(Z, 1) / c for i in (0, 1))
    if f.space == "P1xN" and f.factor_count == 2:
        out = []
        for g, var in zip(f.components, (X, Y)):
            if not g.is_polynomial():
                raise PreconditionError("invariant polydisks are built for polynomial maps of A^2")
            num = g.affine_numerator().as_expr() / Rational(g.affine_denominator().LC())
            out.append(num.subs(X, var))
        return tuple(out)
    raise PreconditionError("invariant polydisks need a map of A^2 or of P1 x P1")


@dataclass
class PolydiskResult:
    map: PolydiskMap
    radius_exponent: int
    swapped: bool
    reduction: List[List[int]]

    def to_dict(self) -> dict:
        return {"r": self.radius_exponent, "swapped": self.swapped, "reduction": self.reduction,
                "map": self.map.to_dict()}


def _scale_exponent(local: Sequence[Poly], p: int) -> int:
    """Least r >= 0 with v(c) + r (k - 1) >= 1 for every coefficient c of degree k >= 2."""
    r = 0
    for s in local:
        for mon, c in s.terms():
            k = sum(mon)
            if k >= 2:
                r = max(r, -((valuation_q(c, p) - 1) // (k - 1)))
    return r


def invariant_polydisk(f: MapSpec, o, place, M: int = DEFAULT_PRECISION,
                       T: int = DEFAULT_TRUNCATION) -> PolydiskResult:
    """
    Conjugate f near the rational fixed point o into a self-map of the unit
    polydisk: translate o to the origin, then scale both coordinates by p^r
    with r the least exponent making every nonlinear coefficient divisible
    by p. The reduction mod p is then (l1 z1 + e z2, l2 z2), swapping the
    coordinates when needed.
    """
    if isinstance(place, PlaceAbove):
        if place.residue_degree * place.ramification != 1:
            raise PreconditionError("invariant polydisks are built at places of degree one")
        p = place.prime
    else:
        p = int(place)
    point = o.point if isinstance(o, FixedPointData) else o
    coords = [c for fac in point.factors for c in fac]
    if point.space == "P2":
        if coords[2].is_zero():
            raise PreconditionError("the fixed point lies on the line at infinity")
        o1, o2 = coords[0] / coords[2], coords[1] / coords[2]
    else:
        o1, o2 = point.affine_value(0), point.affine_value(1)
        if o1 is None or o2 is None:
            raise PreconditionError("the fixed point must be affine")
    if not (o1.is_rational() and o2.is_rational()):
        raise PreconditionError("invariant polydisks need a rational fixed point")
    o1, o2 = o1.as_rational(), o2.as_rational()

    e1, e2 = _affine_pair(f)
    shift = {X: o1 + _W1, Y: o2 + _W2}
    local = [Poly(expand(e.subs(shift, simultaneous=True) - oc), _W1, _W2, domain=QQ)
             for e, oc in ((e1, o1), (e2, o2))]
    if any(s.coeff_monomial(1) != 0 for s in local):
        raise PreconditionError("o is not a fixed point of f")
    lin = [[Rational(s.coeff_monomial(_W1)), Rational(s.coeff_monomial(_W2))] for s in local]
    tr, det = lin[0][0] + lin[1][1], lin[0][0] * lin[1][1] - lin[0][1] * lin[1][0]
    if valuation_q(tr, p) < 0 or valuation_q(det, p) < 0:
        raise PreconditionError(f"not attracting/neutral at p={p}: a multiplier has negative valuation")

    r = _scale_exponent(local, p)
    scale = Rational(p) ** r
    scaled = [expand(sum(Rational(c) * scale ** (sum(mon) - 1) * X ** mon[0] * Y ** mon[1]
                         for mon, c in s.terms())) for s in local]

    red = [[int(c.p) * pow(int(c.q), -1, p) % p if valuation_q(c, p) >= 0 else None for c in row]
           for row in lin]
    if any(c is None for row in red for c in row):
        raise NotPolydiskSelfMapError("the linear part has a coefficient of negative valuation")
    swapped = False
    if red[1][0] != 0:
        if red[0][1] != 0:
            raise PreconditionError("the reduction is not triangular in either coordinate order")
        swapped = True
        swap = {X: Y, Y: X}
        scaled = [scaled[1].subs(swap, simultaneous=True), scaled[0].subs(swap, simultaneous=True)]
        red = [[red[1][1], red[1][0]], [red[0][1], red[0][0]]]

    result = PolydiskMap.from_polys(scaled[0], scaled[1], p, T, M)
    for comp in (result.f1, result.f2):
        if comp.valuation() < 0:
            raise NotPolydiskSelfMapError("conjugated map leaves the unit polydisk")
    log.info(f"invariant polydisk at p={p}: r={r}{', swapped' if swapped else ''}")
    return PolydiskResult(result, r, swapped, red)
