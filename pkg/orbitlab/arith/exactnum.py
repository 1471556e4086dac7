"""
Exact arithmetic foundation: rationals, polynomials over QQ, factorization,
resultants, number fields with certified complex embeddings, and algebraic
numbers in a power basis.

Polynomials are sympy ``Poly`` objects over ``QQ`` in the generator ``X``
(bivariate ones in ``X, Y``). Rationals are sympy ``Rational``. Complex
embeddings come from ``mpmath.polyroots`` and carry an a posteriori
inclusion radius ``n * |p(z) / p'(z)|``.
"""

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import mpmath
from sympy import Poly, QQ, Rational, Symbol, factor_list, resultant as _sympy_resultant

from orbitlab.app_settings import (
    FACTOR_DEGREE_CAP, PRIMITIVE_K_MAX, ROOT_DPS, ROOT_EPSILON, ROOT_MAX_DPS,
)
from orbitlab.errors import IndeterminateError, PreconditionError, ResolutionError
from orbitlab.utils.logger import get_logger

log = get_logger('exactnum')

X = Symbol('x')
Y = Symbol('y')

RationalLike = Union[int, Rational, str]


# ─── Rationals and polynomials ──────────────────────────────────────────

def to_rational(value: RationalLike) -> Rational:
    """Exact rational from an int, a sympy number or a "num/den" string."""
    if isinstance(value, str):
        value = value.strip()
    r = Rational(value)
    if not r.is_Rational:
        raise PreconditionError(f"not a rational number: {value!r}")
    return r


def rational_to_str(r: RationalLike) -> str:
    """Serialize as "num/den", den omitted when 1."""
    r = Rational(r)
    return str(r.p) if r.q == 1 else f"{r.p}/{r.q}"


def poly_from_coeffs(coeffs: Sequence[RationalLike], gen: Symbol = X) -> Poly:
    """Build a univariate Poly from ascending coefficients."""
    desc = [to_rational(c) for c in reversed(list(coeffs))] or [Rational(0)]
    return Poly(desc, gen, domain=QQ)


def poly_coeffs(p: Poly) -> List[Rational]:
    """Ascending coefficients; the zero polynomial gives []."""
    if p.is_zero:
        return []
    return [Rational(c) for c in reversed(p.all_coeffs())]


def poly_to_json(p: Poly) -> List[str]:
    return [rational_to_str(c) for c in poly_coeffs(p)]


def poly_from_json(data: Sequence[str], gen: Symbol = X) -> Poly:
    return poly_from_coeffs([to_rational(c) for c in data], gen)


def as_poly(p, *gens) -> Poly:
    gens = gens or (X,)
    if isinstance(p, Poly):
        return Poly(p.as_expr(), *gens, domain=QQ)
    return Poly(p, *gens, domain=QQ)


def _canonical_key(p: Poly) -> tuple:
    return (p.degree(), tuple(poly_coeffs(p)))


def factor_poly_q(p, max_degree: Optional[int] = FACTOR_DEGREE_CAP) -> List[Tuple[Poly, int]]:
    """
    Factor a polynomial over QQ into monic irreducibles.

    Args:
        p: Nonzero univariate polynomial (Poly or expression in X)
        max_degree: Refuse inputs above this degree (None disables the cap)

    Returns:
        List of (monic irreducible factor, multiplicity), sorted by degree
        then ascending coefficients
    """
    p = as_poly(p)
    if p.is_zero:
        raise PreconditionError("cannot factor the zero polynomial")
    if max_degree is not None and p.degree() > max_degree:
        raise PreconditionError(f"degree {p.degree()} exceeds factorization cap {max_degree}")
    if p.degree() <= 0:
        return []
    _, factors = factor_list(p)
    out = [(Poly(f, X, domain=QQ).monic(), m) for f, m in factors if f.degree() > 0]
    out.sort(key=lambda fm: _canonical_key(fm[0]))
    return out


def resultant(p, q, eliminate: Symbol = Y) -> Poly:
    """
    Sylvester resultant of two bivariate polynomials.

    Degree-0 inputs follow res(a, q) = a^deg(q).

    Args:
        p: Polynomial in X, Y (Poly or expression)
        q: Polynomial in X, Y
        eliminate: The variable to eliminate (X or Y)

    Returns:
        Poly in the remaining variable
    """
    other = X if eliminate == Y else Y
    P = as_poly(p, X, Y)
    Q = as_poly(q, X, Y)
    if P.is_zero and Q.is_zero:
        raise PreconditionError("resultant of two zero polynomials is undefined")
    if P.is_zero or Q.is_zero:
        return Poly(0, other, domain=QQ)
    dp = P.degree(eliminate)
    dq = Q.degree(eliminate)
    if dq == 0:
        return Poly(Q.as_expr() ** dp, other, domain=QQ)
    if dp == 0:
        return Poly(P.as_expr() ** dq, other, domain=QQ)
    return Poly(_sympy_resultant(P.as_expr(), Q.as_expr(), eliminate), other, domain=QQ)


# ─── Certified complex roots ────────────────────────────────────────────

def _mp_coeffs(coeffs_desc: Tuple[Rational, ...]) -> list:
    return [mpmath.mpf(int(c.p)) / int(c.q) for c in coeffs_desc]


def _root_key(z) -> tuple:
    scale = mpmath.mpf(10) ** 25
    return (-int(mpmath.nint(z.real * scale)), -int(mpmath.nint(z.imag * scale)))


@lru_cache(maxsize=512)
def _certified_roots(coeffs_desc: Tuple[Rational, ...], dps: int) -> Tuple[tuple, ...]:
    """Roots of a squarefree polynomial with inclusion radii, at ``dps`` digits."""
    n = len(coeffs_desc) - 1
    with mpmath.workdps(dps):
        cs = _mp_coeffs(coeffs_desc)
        if n == 1:
            z = mpmath.mpc(-cs[1] / cs[0])
            return ((z, mpmath.mpf(0)),)
        try:
            zs = mpmath.polyroots(cs, maxsteps=200 + 20 * n, extraprec=2 * dps)
        except mpmath.libmp.libhyper.NoConvergence:
            zs = mpmath.polyroots(cs, maxsteps=2000, extraprec=8 * dps)
        dcs = [c * (n - i) for i, c in enumerate(cs[:-1])]
        slack = mpmath.mpf(10) ** (-(dps - 8))
        out = []
        for z in zs:
            z = mpmath.mpc(z)
            deriv = mpmath.polyval(dcs, z)
            if deriv == 0:
                radius = mpmath.inf
            else:
                radius = n * abs(mpmath.polyval(cs, z)) / abs(deriv) + slack
            out.append((z, radius))
        out.sort(key=lambda zr: _root_key(zr[0]))
        return tuple(out)


def _separated(roots) -> bool:
    rmax = max(r for _, r in roots)
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i][0] - roots[j][0]) <= 2 * rmax:
                return False
    return True


def certified_roots(p: Poly, dps: int = ROOT_DPS) -> Tuple[tuple, ...]:
    """
    Complex roots of a squarefree polynomial, pairwise separated by more
    than twice the largest inclusion radius.

    Returns:
        Tuple of (mpc value, mpf radius) in canonical order: decreasing
        real part, then decreasing imaginary part
    """
    desc = tuple(Rational(c) for c in p.monic().all_coeffs())
    while dps <= ROOT_MAX_DPS:
        roots = _certified_roots(desc, dps)
        if _separated(roots):
            return roots
        log.debug(f"root separation failed at {dps} digits, refining")
        dps *= 2
    raise IndeterminateError(f"could not separate the roots of {p.as_expr()}")


def choose_factor(factors: Sequence[Poly], value, dps: int = 50) -> Poly:
    """
    Pick the factor vanishing at a numeric algebraic value.

    The smallest evaluation must beat the runner-up by six orders of
    magnitude, otherwise the choice is refused.
    """
    if len(factors) == 1:
        return factors[0]
    with mpmath.workdps(dps):
        scored = sorted(
            (abs(mpmath.polyval(_mp_coeffs(tuple(Rational(c) for c in f.all_coeffs())), value)), i)
            for i, f in enumerate(factors)
        )
    (a, ix), (b, _) = scored[:2]
    if b > a * 10 ** 6:
        return factors[ix]
    raise ResolutionError("multiple candidate factors vanish at the given value")


# ─── Number fields ──────────────────────────────────────────────────────

@dataclass(frozen=True)
class NumberField:
    """QQ(γ) with γ the root of ``minimal_poly`` chosen by ``embedding``."""
    minimal_poly: Poly
    generator_name: str = field(default="g", compare=False)
    embedding: int = 0

    @property
    def degree(self) -> int:
        return self.minimal_poly.degree()

    @cached_property
    def complex_roots(self) -> Tuple[tuple, ...]:
        return certified_roots(self.minimal_poly)

    @property
    def generator_value(self):
        return self.complex_roots[self.embedding][0]

    def generator(self) -> "AlgebraicNumber":
        if self.degree == 1:
            return AlgebraicNumber(self, (-poly_coeffs(self.minimal_poly)[0],))
        coords = [Rational(0)] * self.degree
        coords[1] = Rational(1)
        return AlgebraicNumber(self, tuple(coords))

    def zero(self) -> "AlgebraicNumber":
        return self.rational(0)

    def one(self) -> "AlgebraicNumber":
        return self.rational(1)

    def rational(self, value: RationalLike) -> "AlgebraicNumber":
        coords = [Rational(0)] * self.degree
        coords[0] = to_rational(value)
        return AlgebraicNumber(self, tuple(coords))

    def conjugate_fields(self) -> List["NumberField"]:
        """The same abstract field under each complex embedding."""
        return [NumberField(self.minimal_poly, self.generator_name, j) for j in range(self.degree)]

    @classmethod
    def from_root(cls, minimal_poly: Poly, approx, name: str = "g") -> "NumberField":
        """Field whose generator is the root of ``minimal_poly`` nearest ``approx``."""
        mp = as_poly(minimal_poly).monic()
        roots = certified_roots(mp)
        dists = sorted((abs(z - approx), j) for j, (z, _) in enumerate(roots))
        if len(dists) > 1 and not dists[1][0] > 10 ** 6 * dists[0][0]:
            raise IndeterminateError("approximate value does not single out a root")
        return cls(mp, name, dists[0][1])

    def to_dict(self) -> dict:
        return {"min_poly": poly_to_json(self.minimal_poly),
                "generator_name": self.generator_name,
                "embedding": self.embedding}

    @classmethod
    def from_dict(cls, data: dict) -> "NumberField":
        mp = poly_from_json(data["min_poly"])
        if mp.LC() != 1:
            raise PreconditionError("minimal polynomial must be monic")
        if mp.degree() < 1 or len(factor_poly_q(mp, None)) != 1 or factor_poly_q(mp, None)[0][1] != 1:
            raise PreconditionError("minimal polynomial must be irreducible over QQ")
        return cls(mp, data.get("generator_name", "g"), int(data.get("embedding", 0)))


RATIONALS = NumberField(Poly([1, 0], X, domain=QQ), "q", 0)


def quadratic_field(d: int, name: str = "sqrt") -> NumberField:
    """QQ(sqrt(d)) with the root of positive real (or imaginary) part."""
    return NumberField(Poly([1, 0, -d], X, domain=QQ), f"{name}{d}", 0)


# ─── Algebraic numbers ──────────────────────────────────────────────────

@dataclass(frozen=True)
class AlgebraicNumber:
    """Element of a number field as a reduced power-basis coordinate vector."""
    field: NumberField
    coords: Tuple[Rational, ...]

    def __post_init__(self):
        if len(self.coords) != self.field.degree:
            raise PreconditionError("coordinate count must equal the field degree")

    @classmethod
    def from_poly(cls, fld: NumberField, p: Poly) -> "AlgebraicNumber":
        rem = p.rem(fld.minimal_poly)
        coords = poly_coeffs(rem)
        coords += [Rational(0)] * (fld.degree - len(coords))
        return cls(fld, tuple(coords))

    @classmethod
    def from_rational(cls, fld: NumberField, value: RationalLike) -> "AlgebraicNumber":
        return fld.rational(value)

    def to_poly(self) -> Poly:
        return poly_from_coeffs(self.coords)

    # arithmetic

    def _coerce(self, other) -> "AlgebraicNumber":
        if isinstance(other, AlgebraicNumber):
            if other.field != self.field:
                if other.field.degree == 1:
                    return self.field.rational(other.coords[0])
                if self.field.degree == 1:
                    raise TypeError("promote rational operand")
                raise PreconditionError("operands live in different number fields")
            return other
        return self.field.rational(other)

    def __add__(self, other):
        if isinstance(other, AlgebraicNumber) and self.field.degree == 1 and other.field.degree > 1:
            return other.__add__(self)
        o = self._coerce(other)
        return AlgebraicNumber(self.field, tuple(a + b for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicNumber(self.field, tuple(-a for a in self.coords))

    def __sub__(self, other):
        return self + (-other if isinstance(other, AlgebraicNumber) else -to_rational(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, AlgebraicNumber) and self.field.degree == 1 and other.field.degree > 1:
            return other.__mul__(self)
        o = self._coerce(other)
        if self.field.degree == 1:
            return AlgebraicNumber(self.field, (self.coords[0] * o.coords[0],))
        return AlgebraicNumber.from_poly(self.field, self.to_poly() * o.to_poly())

    __rmul__ = __mul__

    def inverse(self) -> "AlgebraicNumber":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a number field")
        if self.field.degree == 1:
            return AlgebraicNumber(self.field, (1 / self.coords[0],))
        return AlgebraicNumber.from_poly(self.field, self.to_poly().invert(self.field.minimal_poly))

    def __truediv__(self, other):
        if isinstance(other, AlgebraicNumber):
            if self.field.degree == 1 and other.field.degree > 1:
                return other.inverse() * self
            return self * self._coerce(other).inverse()
        return self * (1 / to_rational(other))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        n = int(n)
        if n < 0:
            return self.inverse() ** (-n)
        result, base = self.field.one(), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # predicates and views

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coords[1:])

    def as_rational(self) -> Rational:
        if not self.is_rational():
            raise PreconditionError("element is not rational")
        return self.coords[0]

    def norm(self) -> Rational:
        """Field norm N_{K/QQ}: product over all embeddings."""
        if self.is_rational():
            return self.coords[0] ** self.field.degree
        m = self.field.minimal_poly
        return Rational(_sympy_resultant(m.as_expr(), self.to_poly().as_expr(), X))

    def trace(self) -> Rational:
        """Field trace: sum over all embeddings (Newton sums of the minimal polynomial)."""
        n = self.field.degree
        if n == 1:
            return self.coords[0]
        a = poly_coeffs(self.field.minimal_poly)
        # power sums s_k of the roots via Newton's identities (monic minimal polynomial)
        s = [Rational(n)]
        for k in range(1, n):
            val = -k * a[n - k]
            for i in range(1, k):
                val -= a[n - i] * s[k - i]
            s.append(val)
        return sum((c * s[i] for i, c in enumerate(self.coords)), Rational(0))

    def lift(self, generator_image: "AlgebraicNumber") -> "AlgebraicNumber":
        """Rewrite in another field given the image of this field's generator."""
        if self.field.degree == 1:
            return generator_image.field.rational(self.coords[0])
        acc = generator_image.field.zero()
        for c in reversed(self.coords):
            acc = acc * generator_image + c
        return acc

    def numeric(self, embedding: Optional[int] = None, dps: int = ROOT_DPS):
        """Complex value under an embedding (default: the field's own)."""
        j = self.field.embedding if embedding is None else embedding
        z = self.field.complex_roots[j][0]
        with mpmath.workdps(dps):
            return mpmath.polyval(_mp_coeffs(tuple(reversed(self.coords))), z)

    def height(self) -> int:
        """Naive height: largest numerator or denominator among coordinates."""
        return max(max(abs(int(c.p)), int(c.q)) for c in self.coords)

    def canonical_key(self) -> tuple:
        return (tuple(poly_coeffs(self.field.minimal_poly)), self.field.embedding,
                tuple((int(c.p), int(c.q)) for c in self.coords))

    def to_dict(self) -> dict:
        return {"field": self.field.to_dict(), "coords": [rational_to_str(c) for c in self.coords]}

    @classmethod
    def from_dict(cls, data: dict) -> "AlgebraicNumber":
        fld = NumberField.from_dict(data["field"]) if "field" in data else RATIONALS
        coords = [to_rational(c) for c in data["coords"]]
        coords += [Rational(0)] * (fld.degree - len(coords))
        return cls(fld, tuple(coords))

    def __repr__(self):
        if self.is_rational():
            return f"AlgebraicNumber({rational_to_str(self.coords[0])})"
        g = self.field.generator_name
        terms = [f"{rational_to_str(c)}*{g}^{i}" for i, c in enumerate(self.coords) if c != 0]
        return f"AlgebraicNumber({' + '.join(terms)})"


def rational_number(value: RationalLike) -> AlgebraicNumber:
    return RATIONALS.rational(value)


def minimal_polynomial(a: AlgebraicNumber) -> Poly:
    """Minimal polynomial over QQ of an element (monic)."""
    if a.is_rational():
        return Poly([1, -a.as_rational()], X, domain=QQ)
    m = a.field.minimal_poly.as_expr().subs(X, Y)
    charpoly = _sympy_resultant(m, X - a.to_poly().as_expr().subs(X, Y), Y)
    factors = factor_poly_q(Poly(charpoly, X, domain=QQ), None)
    return factors[0][0]


def own_field(a: AlgebraicNumber) -> Tuple[NumberField, AlgebraicNumber]:
    """Shrink an element to QQ(a); returns the field and a as its generator."""
    if a.is_rational():
        return RATIONALS, RATIONALS.rational(a.as_rational())
    mp = minimal_polynomial(a)
    if mp.degree() == a.field.degree:
        fld = NumberField.from_root(mp, a.numeric(), a.field.generator_name)
    else:
        fld = NumberField.from_root(mp, a.numeric())
    return fld, fld.generator()


# ─── Polynomials over a number field (ascending lists) ──────────────────

KPoly = List[AlgebraicNumber]


def kpoly_trim(f: KPoly) -> KPoly:
    f = list(f)
    while f and f[-1].is_zero():
        f.pop()
    return f


def kpoly_from_poly(fld: NumberField, p: Poly) -> KPoly:
    return kpoly_trim([fld.rational(c) for c in poly_coeffs(p)])


def kpoly_mul(f: KPoly, g: KPoly) -> KPoly:
    if not f or not g:
        return []
    out = [f[0].field.zero() for _ in range(len(f) + len(g) - 1)]
    for i, a in enumerate(f):
        if a.is_zero():
            continue
        for j, b in enumerate(g):
            out[i + j] = out[i + j] + a * b
    return kpoly_trim(out)


def kpoly_add(f: KPoly, g: KPoly) -> KPoly:
    if len(f) < len(g):
        f, g = g, f
    out = list(f)
    for i, b in enumerate(g):
        out[i] = out[i] + b
    return kpoly_trim(out)


def kpoly_divmod(f: KPoly, g: KPoly) -> Tuple[KPoly, KPoly]:
    g = kpoly_trim(g)
    if not g:
        raise ZeroDivisionError("division by the zero polynomial")
    r = kpoly_trim(f)
    q = [g[0].field.zero() for _ in range(max(len(r) - len(g) + 1, 0))]
    inv_lc = g[-1].inverse()
    while len(r) >= len(g):
        coef = r[-1] * inv_lc
        shift = len(r) - len(g)
        q[shift] = coef
        for i, b in enumerate(g):
            r[shift + i] = r[shift + i] - coef * b
        r = kpoly_trim(r[:-1] if r[-1].is_zero() else r)
    return kpoly_trim(q), r


def kpoly_gcd(f: KPoly, g: KPoly) -> KPoly:
    """Monic gcd over the coefficient field."""
    a, b = kpoly_trim(f), kpoly_trim(g)
    while b:
        _, r = kpoly_divmod(a, b)
        a, b = b, r
    if not a:
        return []
    inv = a[-1].inverse()
    return [c * inv for c in a]


def kpoly_eval(f: KPoly, x: AlgebraicNumber) -> AlgebraicNumber:
    acc = x.field.zero()
    for c in reversed(f):
        acc = acc * x + c
    return acc


# ─── Primitive elements ─────────────────────────────────────────────────

def _shifted_resultant(ma: Poly, mb: Poly, k: int) -> Poly:
    left = ma.as_expr().subs(X, X - k * Y)
    right = mb.as_expr().subs(X, Y)
    return Poly(_sympy_resultant(left, right, Y), X, domain=QQ)


def primitive_element(a: AlgebraicNumber, b: AlgebraicNumber,
                      k_max: int = PRIMITIVE_K_MAX) -> Tuple[NumberField, AlgebraicNumber, AlgebraicNumber]:
    """
    A single field QQ(γ) = QQ(a, b) together with the images of a and b.

    γ = a + k*b for the first k in 1..k_max whose shifted resultant is
    squarefree; the image of a is the common root of its minimal polynomial
    and m_b((γ - x)/k), found by a gcd over QQ(γ).

    Raises:
        ResolutionError: no shift up to k_max is primitive
    """
    fa, ga = own_field(a)
    fb, gb = own_field(b)
    if fb.degree == 1:
        return fa, ga, fa.rational(gb.coords[0])
    if fa.degree == 1:
        return fb, fb.rational(ga.coords[0]), gb

    ma, mb = fa.minimal_poly, fb.minimal_poly
    a_num, b_num = fa.generator_value, fb.generator_value
    for k in range(1, k_max + 1):
        R = _shifted_resultant(ma, mb, k)
        if not R.is_sqf:
            log.debug(f"shift k={k} not primitive (resultant not squarefree)")
            continue
        factors = [f for f, _ in factor_poly_q(R, None)]
        gamma_num = a_num + k * b_num
        m_gamma = choose_factor(factors, gamma_num)
        fld = NumberField.from_root(m_gamma, gamma_num)
        gamma = fld.generator()

        # m_b((γ - x)/k) as a polynomial in x over QQ(γ)
        lin = [gamma / k, fld.rational(Rational(-1, k))]
        h: KPoly = []
        power: KPoly = [fld.one()]
        for c in poly_coeffs(mb):
            h = kpoly_add(h, [t * c for t in power])
            power = kpoly_mul(power, lin)
        g = kpoly_gcd(kpoly_from_poly(fld, ma), h)
        if len(g) != 2:
            log.debug(f"shift k={k}: gcd degree {len(g) - 1}, skipping")
            continue
        a_img = -g[0]
        b_img = (gamma - a_img) / k
        log.debug(f"primitive element a + {k}b of degree {fld.degree}")
        return fld, a_img, b_img
    raise ResolutionError(f"no primitive shift a + k*b with k <= {k_max}")


def joint_field(elements: Sequence[AlgebraicNumber],
                k_max: int = PRIMITIVE_K_MAX) -> Tuple[NumberField, List[AlgebraicNumber]]:
    """Common field of all elements with their images, by iterated primitive elements."""
    if not elements:
        raise PreconditionError("need at least one element")
    fld, gen = own_field(elements[0])
    images = [gen]
    for e in elements[1:]:
        new_fld, gen_img, e_img = primitive_element(fld.generator(), e, k_max)
        images = [img.lift(gen_img) for img in images] + [e_img]
        fld = new_fld
    return fld, images


def field_generated_degree(points: Sequence[AlgebraicNumber], k_max: int = PRIMITIVE_K_MAX) -> int:
    """Degree over QQ of the field generated by all points."""
    fld, _ = joint_field(list(points), k_max)
    return fld.degree


# ─── Complex absolute values ────────────────────────────────────────────

def _abs_with_error(coeffs: Tuple[Rational, ...], z, radius, dps: int):
    with mpmath.workdps(dps):
        cs = _mp_coeffs(tuple(reversed(coeffs)))
        value = mpmath.polyval(cs, z)
        reach = abs(z) + radius
        spread = mpmath.mpf(0)
        for i, c in enumerate(coeffs):
            if i and c != 0:
                spread += i * abs(mpmath.mpf(int(c.p)) / int(c.q)) * reach ** (i - 1)
        err = radius * spread + mpmath.mpf(10) ** (-(dps - 10)) * (1 + abs(value))
        return abs(value), err


def complex_abs_values(a: AlgebraicNumber, eps: float = ROOT_EPSILON) -> List[Tuple[float, float]]:
    """
    Moduli of a under every complex embedding of its field.

    Returns:
        One (|σ(a)|, error bound) per embedding, in canonical root order

    Raises:
        IndeterminateError: error bounds cannot be pushed below eps
    """
    dps = ROOT_DPS
    desc = tuple(Rational(c) for c in a.field.minimal_poly.all_coeffs())
    while dps <= ROOT_MAX_DPS:
        roots = _certified_roots(desc, dps)
        if _separated(roots):
            out = [_abs_with_error(a.coords, z, r, dps) for z, r in roots]
            if all(err <= eps for _, err in out):
                return [(float(v), float(e)) for v, e in out]
        dps *= 2
    raise IndeterminateError(f"moduli of {a!r} not certified to {eps}")


def compare_to(value: float, error: float, threshold: float, eps: float = ROOT_EPSILON) -> Optional[int]:
    """Certified sign of value - threshold: 1, -1, or None when within the margin."""
    if value - error - eps > threshold:
        return 1
    if value + error + eps < threshold:
        return -1
    return None
