"""
Truncated bivariate Tate series over Q_p on the closed unit polydisk,
Gauss norms, pullbacks by polydisk self-maps, the attractor ideal of the
two normal forms and the semiconjugacy psi with its residual.

Norms are reported through valuations: rho(s) = p^-v(s), with v = +inf for
the zero series. A series carries ``tail_valuation``, a lower bound on the
valuation of every discarded coefficient (None when uncertified).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from sympy import Poly, QQ

from orbitlab.app_settings import DEFAULT_PRECISION, DEFAULT_RHO_STEPS, DEFAULT_TRUNCATION, GUARD_DIGITS
from orbitlab.arith.exactnum import X, Y
from orbitlab.arith.padic import INF, PadicElement
from orbitlab.errors import (
    ConvergenceError, NormalFormRequiredError, NotPolydiskSelfMapError, PreconditionError,
)
from orbitlab.utils.logger import get_logger

log = get_logger('tate')

NORMAL_FORMS = ("fixed_line", "semiattracting", "general")


def _min_tail(*tails):
    if any(t is None for t in tails):
        return None
    return min(tails, default=INF)


def _tail_str(p: int, tail, prec: int) -> str:
    if tail is None:
        return "none"
    return f"p^-{prec if tail == INF else int(tail)}"


def _tail_from_str(text: str):
    if text == "none":
        return None
    return int(text.split("^-")[1])


@dataclass
class TateSeries2:
    prime: int
    terms: Dict[Tuple[int, int], PadicElement]
    truncation: int = DEFAULT_TRUNCATION
    precision: int = DEFAULT_PRECISION
    tail_valuation: Optional[float] = INF

    def __post_init__(self):
        # coefficients below p^-M are zero at precision
        self.terms = {k: c for k, c in self.terms.items() if c.valuation < self.precision}

    # construction

    @classmethod
    def zero(cls, p: int, T: int = DEFAULT_TRUNCATION, M: int = DEFAULT_PRECISION) -> "TateSeries2":
        return cls(p, {}, T, M, INF)

    @classmethod
    def from_poly(cls, expr, p: int, T: int = DEFAULT_TRUNCATION, M: int = DEFAULT_PRECISION) -> "TateSeries2":
        """Exact polynomial in x, y with rational coefficients."""
        poly = Poly(expr, X, Y, domain=QQ)
        terms, tail = {}, INF
        for (i, j), c in poly.terms():
            el = PadicElement.from_rational(c, p, M)
            if i + j <= T:
                terms[(i, j)] = el
            else:
                tail = min(tail, el.valuation)
        return cls(p, terms, T, M, tail)

    def _like(self, terms, tail) -> "TateSeries2":
        return TateSeries2(self.prime, terms, self.truncation, self.precision, tail)

    # norms

    def valuation(self):
        """v of the Gauss norm over stored support (+inf for zero)."""
        return min((c.valuation for c in self.terms.values()), default=INF)

    def gauss_norm(self) -> Fraction:
        v = self.valuation()
        return Fraction(0) if v == INF else Fraction(1, self.prime) ** int(v)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, i: int, j: int) -> PadicElement:
        return self.terms.get((i, j), PadicElement.zero(self.prime, self.precision))

    # arithmetic

    def __add__(self, other: "TateSeries2") -> "TateSeries2":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return self._like(out, _min_tail(self.tail_valuation, other.tail_valuation))

    def __neg__(self) -> "TateSeries2":
        return self._like({k: -c for k, c in self.terms.items()}, self.tail_valuation)

    def __sub__(self, other: "TateSeries2") -> "TateSeries2":
        return self + (-other)

    def __mul__(self, other) -> "TateSeries2":
        if not isinstance(other, TateSeries2):
            return self._like({k: c * other for k, c in self.terms.items()}, self.tail_valuation)
        T = self.truncation
        out: Dict[Tuple[int, int], PadicElement] = {}
        dropped = INF
        for (i1, j1), a in self.terms.items():
            for (i2, j2), b in other.terms.items():
                k = (i1 + i2, j1 + j2)
                prod = a * b
                if k[0] + k[1] > T:
                    dropped = min(dropped, prod.valuation)
                    continue
                out[k] = out[k] + prod if k in out else prod
        tails = (self.tail_valuation, other.tail_valuation)
        if None in tails:
            tail = None
        else:
            tail = min(dropped, tails[0] + other.valuation(), tails[1] + self.valuation(), tails[0] + tails[1])
        return self._like(out, tail)

    __rmul__ = __mul__

    def times_y(self) -> "TateSeries2":
        return self * TateSeries2(self.prime, {(0, 1): PadicElement.from_rational(1, self.prime, self.precision)},
                                  self.truncation, self.precision, INF)

    def divided_by_y(self) -> "TateSeries2":
        if any(j == 0 for (_, j) in self.terms):
            raise PreconditionError("series is not divisible by y")
        return self._like({(i, j - 1): c for (i, j), c in self.terms.items()}, self.tail_valuation)

    def to_dict(self) -> dict:
        return {"p": self.prime, "T": self.truncation,
                "terms": [{"i": i, "j": j, "c": c.to_dict()} for (i, j), c in sorted(self.terms.items())],
                "tail": _tail_str(self.prime, self.tail_valuation, self.precision)}

    @classmethod
    def from_dict(cls, data: dict, precision: int = DEFAULT_PRECISION) -> "TateSeries2":
        terms = {(int(t["i"]), int(t["j"])): PadicElement.from_dict(t["c"]) for t in data.get("terms", [])}
        tail = _tail_from_str(data.get("tail", "none"))
        return cls(int(data["p"]), terms, int(data["T"]), precision, tail)


def gauss_norm(s: TateSeries2) -> dict:
    """Gauss norm over stored support, reported with the tail bound."""
    v = s.valuation()
    return {"valuation": "inf" if v == INF else int(v), "norm": str(s.gauss_norm()),
            "tail": _tail_str(s.prime, s.tail_valuation, s.precision)}


# ─── Polydisk maps ──────────────────────────────────────────────────────

@dataclass
class PolydiskMap:
    """
    A self-map (f1, f2) of the unit polydisk. Normal-form tags keep their
    data: ``P`` and ``Q`` for fixed_line (x + yP, yQ), plus ``a`` and ``b``
    for semiattracting (a x + b + P, yQ).
    """
    f1: TateSeries2
    f2: TateSeries2
    tag: str = "general"
    P: Optional[TateSeries2] = None
    Q: Optional[TateSeries2] = None
    a: Optional[PadicElement] = None
    b: Optional[PadicElement] = None

    @property
    def prime(self) -> int:
        return self.f1.prime

    @classmethod
    def fixed_line(cls, P: TateSeries2, Q: TateSeries2) -> "PolydiskMap":
        x = TateSeries2.from_poly(X, P.prime, P.truncation, P.precision)
        f1 = x + P.times_y()
        f2 = Q.times_y()
        return cls(f1, f2, "fixed_line", P, Q)

    @classmethod
    def semiattracting(cls, a: PadicElement, b: PadicElement, P: TateSeries2, Q: TateSeries2) -> "PolydiskMap":
        if a.is_zero() or a.valuation != 0:
            raise PreconditionError("semiattracting form needs |a| = 1")
        x = TateSeries2.from_poly(X, P.prime, P.truncation, P.precision)
        const = TateSeries2(P.prime, {(0, 0): b}, P.truncation, P.precision, INF)
        f1 = x * a + const + P
        return cls(f1, Q.times_y(), "semiattracting", P, Q, a, b)

    @classmethod
    def from_polys(cls, e1, e2, p: int, T: int = DEFAULT_TRUNCATION, M: int = DEFAULT_PRECISION) -> "PolydiskMap":
        return cls(TateSeries2.from_poly(e1, p, T, M), TateSeries2.from_poly(e2, p, T, M))

    def to_dict(self) -> dict:
        return {"tag": self.tag, "f1": self.f1.to_dict(), "f2": self.f2.to_dict()}


def _check_self_map(f: PolydiskMap) -> None:
    for comp in (f.f1, f.f2):
        if comp.valuation() < 0 or (comp.tail_valuation is not None and comp.tail_valuation < 0):
            raise NotPolydiskSelfMapError("not a polydisk self-map: a component has Gauss norm > 1")


def _powers(s: TateSeries2, n: int) -> List[TateSeries2]:
    one = TateSeries2(s.prime, {(0, 0): PadicElement.from_rational(1, s.prime, s.precision)},
                      s.truncation, s.precision, INF)
    out = [one]
    for _ in range(n):
        out.append(out[-1] * s)
    return out


def compose(f: PolydiskMap, s: TateSeries2) -> TateSeries2:
    """
    The pullback s o f, truncated at total degree T.

    Raises:
        NotPolydiskSelfMapError: a component of f has Gauss norm > 1
    """
    _check_self_map(f)
    if s.is_zero():
        return s._like({}, s.tail_valuation)
    di = max(i for i, _ in s.terms)
    dj = max(j for _, j in s.terms)
    p1, p2 = _powers(f.f1, di), _powers(f.f2, dj)
    acc = TateSeries2.zero(s.prime, s.truncation, s.precision)
    for (i, j), c in sorted(s.terms.items()):
        acc = acc + (p1[i] * p2[j]) * c
    # components have norm <= 1, so the discarded tail of s stays bounded
    acc.tail_valuation = _min_tail(acc.tail_valuation, s.tail_valuation)
    return acc


def pullback(f: PolydiskMap, s: TateSeries2, n: int) -> TateSeries2:
    for _ in range(n):
        s = compose(f, s)
    return s


# ─── J^f membership ─────────────────────────────────────────────────────

@dataclass
class RhoSequence:
    valuations: List[float]
    in_attractor_ideal: bool
    evidence_steps: int
    threshold: int

    def norms(self, p: int) -> List[Fraction]:
        return [Fraction(0) if v == INF else Fraction(1, p) ** int(v) for v in self.valuations]

    def to_dict(self) -> dict:
        return {"valuations": ["inf" if v == INF else int(v) for v in self.valuations],
                "in_J": self.in_attractor_ideal, "confidence": f"evidence({self.evidence_steps})",
                "threshold": self.threshold}


def rho_f_seminorm(f: PolydiskMap, s: TateSeries2, n_max: int = DEFAULT_RHO_STEPS) -> RhoSequence:
    """
    Valuations of (f^n)* s for n = 0..n_max as a monotone envelope; s is
    declared in J^f once the norm drops below p^(-M + guard).
    """
    if n_max < 1:
        raise PreconditionError("n_max must be at least 1")
    threshold = s.precision - GUARD_DIGITS
    vals: List[float] = []
    cur = s
    for n in range(n_max + 1):
        v = cur.valuation()
        vals.append(max(v, vals[-1]) if vals else v)
        if vals[-1] == INF or vals[-1] >= threshold:
            vals.extend([vals[-1]] * (n_max - n))
            break
        if n < n_max:
            cur = compose(f, cur)
    return RhoSequence(vals, vals[-1] >= threshold, n_max, threshold)


def contraction_constants(f: PolydiskMap, check_degree: int = 4) -> Tuple[int, int]:
    """
    (v_b, m) with b = p^-v_b = rho(Q) and m = 1, so that
    rho(f*(y h)) <= b rho(y h) for every h.

    The bound is structural (f2 = y Q and rho(f1) <= 1); it is also checked
    on the monomials y x^i y^j of degree up to ``check_degree``.

    Raises:
        NormalFormRequiredError: f carries no normal-form tag
    """
    if f.tag not in ("fixed_line", "semiattracting"):
        raise NormalFormRequiredError("normal form required: tag must be fixed_line or semiattracting")
    _check_self_map(f)
    vb = f.Q.valuation()
    if vb < 1:
        raise PreconditionError("contraction needs rho(Q) < 1")
    one = PadicElement.from_rational(1, f.prime, f.f1.precision)
    T = min(check_degree, f.f1.truncation - 1)
    for deg in range(T + 1):
        for i in range(deg + 1):
            mono = TateSeries2(f.prime, {(i, deg - i + 1): one}, f.f1.truncation, f.f1.precision, INF)
            if compose(f, mono).valuation() < vb:
                raise ConvergenceError(f"contraction fails on y*x^{i}*y^{deg - i}")
    log.debug(f"contraction constant b = {f.prime}^-{int(vb)}, m = 1")
    return (int(vb) if vb != INF else vb), 1


# ─── Attractor and semiconjugacy ────────────────────────────────────────

@dataclass
class AttractorData:
    generator: TateSeries2
    psi: Tuple[TateSeries2, TateSeries2]
    contraction: Tuple[float, int]
    C_valuation: float
    beta_valuation: float
    residuals: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        fmt = lambda v: "inf" if v == INF else int(v)
        return {"generator": self.generator.to_dict(),
                "psi": [self.psi[0].to_dict(), self.psi[1].to_dict()],
                "contraction": {"b": f"p^-{fmt(self.contraction[0])}", "m": self.contraction[1]},
                "C": f"p^-{fmt(self.C_valuation)}", "beta": f"p^-{fmt(self.beta_valuation)}",
                "residuals": [fmt(v) for v in self.residuals]}


def attractor_psi(f: PolydiskMap, max_terms: Optional[int] = None) -> AttractorData:
    """
    psi = (x + sum_{i >= 0} (f*)^i (y P), 0) for a fixed_line map, summed
    until terms vanish at precision; J^f is generated by y.

    Raises:
        ConvergenceError: the terms stop decaying
    """
    if f.tag != "fixed_line":
        raise NormalFormRequiredError("attractor_psi handles the fixed_line normal form")
    vb, m = contraction_constants(f)
    if f.P.valuation() < 1 and not f.P.is_zero():
        raise PreconditionError("fixed_line form needs rho(P) < 1")
    p, T, M = f.prime, f.f1.truncation, f.f1.precision
    psi1 = TateSeries2.from_poly(X, p, T, M)
    term = f.P.times_y()
    limit = max_terms or 2 * M + 2
    last_v = -1
    for i in range(limit):
        if term.is_zero():
            break
        v = term.valuation()
        if i > 1 and v <= last_v:
            raise ConvergenceError(f"psi series terms stopped decaying at step {i}")
        psi1 = psi1 + term
        last_v = v
        term = compose(f, term)
    else:
        if not term.is_zero():
            raise ConvergenceError("psi series did not reach precision")
    psi = (psi1, TateSeries2.zero(p, T, M))
    residuals = [semiconjugacy_residual(f, psi, n) for n in range(4)]
    finite = [(r - n * vb) for n, r in enumerate(residuals) if r != INF]
    c_val = min(finite) if finite else INF
    generator = TateSeries2.from_poly(Y, p, T, M)
    return AttractorData(generator, psi, (vb, m), c_val, vb, residuals)


def semiconjugacy_residual(f: PolydiskMap, psi: Tuple[TateSeries2, TateSeries2], n: int = 0) -> float:
    """Valuation of (f*)^n (psi_1 o f - psi_1); f restricted to y = 0 is the identity."""
    diff = compose(f, psi[0]) - psi[0]
    return pullback(f, diff, n).valuation()
