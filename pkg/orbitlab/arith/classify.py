"""
Classification of P1 endomorphisms of degree >= 2: critical orbits,
ramification portraits, orbifold signatures, and the monomial / Lattes /
nonexceptional verdict with semiconjugacy witnesses.

Dynamics commutes with Galois conjugation, so critical points are handled
one Galois orbit at a time: a node is keyed by the minimal polynomial of
its affine coordinate (or by infinity) and a repeated node already proves
preperiodicity.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from sympy import Poly, QQ, Rational

from orbitlab.app_settings import FIELD_DEGREE_CAP, HEIGHT_BITS_CAP, HEIGHT_GROWTH_STEPS, N_BOUND
from orbitlab.arith.exactnum import (
    X, Y, factor_poly_q, minimal_polynomial, poly_from_json, poly_to_json, rational_to_str,
)
from orbitlab.arith.projdyn import (
    MapSpec, ProjPoint, conjugate_roots, compose, conjugate, evaluate, mobius, mobius_inverse,
)
from orbitlab.errors import FieldCapError, PreconditionError
from orbitlab.utils.logger import get_logger

log = get_logger('classify')

INF = math.inf

MONOMIAL_SIGNATURES = {(INF, INF)}
CHEBYSHEV_SIGNATURES = {(2, 2, INF)}
LATTES_SIGNATURES = {(2, 2, 2, 2), (2, 4, 4), (3, 3, 3), (2, 3, 6)}


# ─── Galois-orbit nodes ─────────────────────────────────────────────────

@dataclass
class OrbitNode:
    key: tuple
    point: ProjPoint
    size: int

    def label(self) -> str:
        if self.key == ("inf",):
            return "inf"
        if self.size == 1:
            return rational_to_str(self.point.affine_value().as_rational())
        return "root of " + " ".join(self.key)


def node_of(pt: ProjPoint) -> OrbitNode:
    a = pt.affine_value()
    if a is None:
        return OrbitNode(("inf",), pt, 1)
    if a.is_rational():
        return OrbitNode(("q", rational_to_str(a.as_rational())), pt, 1)
    mp = minimal_polynomial(a)
    return OrbitNode(tuple(poly_to_json(mp)), pt, mp.degree())


def _point_height(pt: ProjPoint) -> int:
    a = pt.affine_value()
    return 0 if a is None else a.height()


# ─── Critical points ────────────────────────────────────────────────────

@dataclass
class CriticalOrbit:
    node: OrbitNode
    ramification: int
    orbit: List[OrbitNode] = field(default_factory=list)
    tail: Optional[int] = None
    cycle: Optional[int] = None
    status: str = "unknown"  # preperiodic | escaping | unknown

    def to_dict(self) -> dict:
        return {"point": self.node.label(), "conjugates": self.node.size, "e": self.ramification,
                "orbit": [n.label() for n in self.orbit], "tail": self.tail, "cycle": self.cycle,
                "status": self.status}


@dataclass
class CriticalData:
    critical: List[CriticalOrbit]
    bound_used: int

    @property
    def pcf(self) -> Optional[bool]:
        if any(c.status == "escaping" for c in self.critical):
            return False
        if all(c.status == "preperiodic" for c in self.critical):
            return True
        return None

    @property
    def confidence(self) -> str:
        return "evidence" if self.pcf is None else "certified"

    def to_dict(self) -> dict:
        return {"critical": [c.to_dict() for c in self.critical], "pcf": self.pcf,
                "confidence": self.confidence, "bound_used": self.bound_used}


def critical_points(f: MapSpec) -> List[Tuple[OrbitNode, int]]:
    """Critical Galois orbits with ramification index e, from the Jacobian of (F1, F2)."""
    if f.space != "P1" or f.degree < 2:
        raise PreconditionError("classification needs a P1 map of degree >= 2")
    F1, F2 = f.forms
    W = Poly(F1.diff(X) * F2.diff(Y) - F1.diff(Y) * F2.diff(X), X, Y, domain=QQ)
    w = Poly(W.as_expr().subs(Y, 1), X, domain=QQ)
    out = []
    for k, (fac, mult) in enumerate(factor_poly_q(w, None) if w.degree() > 0 else []):
        rep = conjugate_roots(fac, f"c{k}")[0]
        out.append((node_of(ProjPoint.affine(rep)), mult + 1))
    inf_mult = 2 * f.degree - 2 - max(w.degree(), 0)
    if inf_mult > 0:
        out.append((node_of(ProjPoint.infinity()), inf_mult + 1))
    total = sum((e - 1) * n.size for n, e in out)
    if total != 2 * f.degree - 2:
        raise PreconditionError(f"ramification total {total} differs from 2d-2 = {2 * f.degree - 2}")
    return out


def critical_orbits(f: MapSpec, n_bound: int = N_BOUND) -> CriticalData:
    """
    Forward orbits of all critical points with cycle detection.

    PCF is certified when every critical orbit closes up; non-PCF is
    certified after HEIGHT_GROWTH_STEPS consecutive strict height increases.
    """
    data = CriticalData([], n_bound)
    for node, e in critical_points(f):
        co = CriticalOrbit(node, e, [node])
        seen = {node.key: 0}
        cur, growth, last_h = node.point, 0, _point_height(node.point)
        for i in range(1, n_bound + 1):
            try:
                cur = evaluate(f, cur)
                if cur.height_bits() > HEIGHT_BITS_CAP or cur.field().degree > FIELD_DEGREE_CAP:
                    raise FieldCapError("critical orbit outgrew the caps")
            except FieldCapError as e_cap:
                log.warning(f"{e_cap}; verdict stays at evidence level")
                break
            nxt = node_of(cur)
            co.orbit.append(nxt)
            if nxt.key in seen:
                co.tail, co.cycle = seen[nxt.key], i - seen[nxt.key]
                co.status = "preperiodic"
                break
            seen[nxt.key] = i
            h = _point_height(cur)
            growth = growth + 1 if h > last_h else 0
            last_h = h
            if growth >= HEIGHT_GROWTH_STEPS:
                co.status = "escaping"
                log.debug(f"critical orbit of {node.label()} escapes by height growth")
                break
        data.critical.append(co)
    return data


# ─── Portraits and signatures ───────────────────────────────────────────

@dataclass
class Portrait:
    nodes: Dict[tuple, OrbitNode]
    image: Dict[tuple, tuple]
    ramification: Dict[tuple, int]
    postcritical: List[tuple]

    def to_dict(self) -> dict:
        label = lambda k: self.nodes[k].label()
        return {"edges": [[label(k), label(v), self.ramification.get(k, 1)]
                          for k, v in sorted(self.image.items(), key=lambda kv: label(kv[0]))],
                "postcritical": sorted(label(k) for k in self.postcritical)}


def ramification_portrait(f: MapSpec, data: Optional[CriticalData] = None) -> Portrait:
    """Graph on Crit and Post with local degrees; needs a PCF map."""
    data = data or critical_orbits(f)
    if data.pcf is not True:
        raise PreconditionError("ramification portrait needs a postcritically finite map")
    nodes, image, ram, post = {}, {}, {}, []
    for co in data.critical:
        ram[co.node.key] = co.ramification
        for a, b in zip(co.orbit, co.orbit[1:]):
            nodes.setdefault(a.key, a)
            nodes.setdefault(b.key, b)
            image[a.key] = b.key
            if b.key not in post:
                post.append(b.key)
        nodes.setdefault(co.node.key, co.node)
    for k in list(nodes):
        if k not in image:
            nxt = node_of(evaluate(f, nodes[k].point))
            nodes.setdefault(nxt.key, nxt)
            image[k] = nxt.key
    return Portrait(nodes, image, ram, post)


def postcritical_set(f: MapSpec) -> List[OrbitNode]:
    p = ramification_portrait(f)
    return [p.nodes[k] for k in p.postcritical]


def orbifold_weights(portrait: Portrait, cap: int = 10 ** 6) -> Dict[tuple, float]:
    """nu(Q) = lcm of e(P) nu(P) over portrait edges P -> Q; infinite on critical cycles."""
    nu: Dict[tuple, float] = {k: 1 for k in portrait.nodes}
    for _ in range(40 * (len(nu) + 1)):
        changed = False
        for p, q in portrait.image.items():
            incoming = portrait.ramification.get(p, 1) * nu[p]
            if incoming == INF or nu[q] == INF:
                new = INF
            else:
                new = math.lcm(int(nu[q]), int(incoming))
                if new > cap:
                    new = INF
            if new != nu[q]:
                nu[q], changed = new, True
        if not changed:
            break
    return nu


def orbifold_signature(f: MapSpec, portrait: Optional[Portrait] = None) -> Tuple:
    portrait = portrait or ramification_portrait(f)
    nu = orbifold_weights(portrait)
    weights = []
    for k, v in nu.items():
        if v > 1:
            weights.extend([v] * portrait.nodes[k].size)
    return tuple(sorted(weights))


# ─── Semiconjugacies ────────────────────────────────────────────────────

def verify_semiconjugacy(pi: MapSpec, h: MapSpec, f: MapSpec) -> bool:
    """Exact test of f o pi = pi o h via the cross-multiplied homogeneous identity."""
    if pi.space != "P1" or h.space != "P1" or f.space != "P1":
        raise PreconditionError("semiconjugacy check works on P1 maps")
    left, right = compose(f, pi), compose(pi, h)
    (a1, a2), (b1, b2) = left.forms, right.forms
    return (a1 * b2 - a2 * b1).is_zero


def chebyshev(d: int) -> MapSpec:
    """T_d with T_d(z + 1/z) = z^d + z^-d."""
    t_prev, t_cur = Poly(2, X, domain=QQ), Poly(X, X, domain=QQ)
    if d == 0:
        raise PreconditionError("Chebyshev degree must be positive")
    for _ in range(d - 1):
        t_prev, t_cur = t_cur, Poly(X, X, domain=QQ) * t_cur - t_prev
    return MapSpec.from_affine(t_cur.as_expr())


def _power_map(c, d: int) -> MapSpec:
    """z -> c z^d (d > 0) or c z^d with negative d."""
    if d > 0:
        return MapSpec.p1(c * X ** d, Y ** d)
    return MapSpec.p1(c * Y ** (-d), X ** (-d))


def _joukowski() -> MapSpec:
    return MapSpec.p1(X ** 2 + Y ** 2, X * Y)


def _send_to_infinity(a: Optional[Rational], b: Optional[Rational]) -> MapSpec:
    """Mobius sending a to 0 and b to infinity (None is infinity)."""
    if b is None:
        return mobius(1, -a, 0, 1)
    if a is None:
        return mobius(0, 1, 1, -b)
    return mobius(1, -a, 1, -b)


def _rational_value(node: OrbitNode):
    if node.key == ("inf",):
        return None
    return node.point.affine_value().as_rational()


def _monomial_witness(f: MapSpec, pair: List[OrbitNode]) -> Optional[dict]:
    if any(n.size != 1 for n in pair):
        return None
    a, b = (_rational_value(n) for n in pair)
    M = _send_to_infinity(a, b)
    # pi = M^-1, h = M o f o M^-1
    h = conjugate(f, mobius_inverse(M))
    H1, H2 = h.forms
    d = f.degree
    for sign in (1, -1):
        lead = H1.coeff_monomial(X ** d if sign > 0 else Y ** d)
        other = H2.coeff_monomial(Y ** d if sign > 0 else X ** d)
        if lead != 0 and other != 0:
            cand = _power_map(lead / other, sign * d)
            pi = mobius_inverse(M)
            if verify_semiconjugacy(pi, cand, f):
                return {"kind": "monomial", "pi": pi.to_dict(), "h": cand.to_dict(), "verified": True}
    return None


def _chebyshev_witness(f: MapSpec, inf_node: OrbitNode, finite: List[OrbitNode]) -> Optional[dict]:
    if inf_node.size != 1 or len(finite) != 2 or any(n.size != 1 for n in finite):
        return None
    q = _rational_value(inf_node)
    M = mobius(1, 0, 0, 1) if q is None else mobius(0, 1, 1, -q)
    # M sends the totally invariant point to infinity, so both images are finite
    mu = [evaluate(M, n.point).affine_value().as_rational() for n in finite]
    for lo, hi in ((mu[0], mu[1]), (mu[1], mu[0])):
        alpha = Rational(4) / (hi - lo)
        beta = Rational(2) - alpha * hi
        A = mobius(alpha, beta, 0, 1)
        phi_inv = mobius_inverse(compose(A, M))
        pi = compose(phi_inv, _joukowski())
        for sign in (1, -1):
            h = _power_map(sign, f.degree)
            if verify_semiconjugacy(pi, h, f):
                return {"kind": "chebyshev", "pi": pi.to_dict(), "h": h.to_dict(), "verified": True}
    return None


# ─── Verdicts ───────────────────────────────────────────────────────────

@dataclass
class TypeVerdict:
    type: str
    pcf: Optional[bool]
    confidence: str
    bound_used: int
    signature: Tuple = ()
    subtype: str = ""
    witness: Optional[dict] = None

    def to_dict(self) -> dict:
        return {"type": self.type, "pcf": self.pcf, "confidence": self.confidence,
                "bound_used": self.bound_used, "subtype": self.subtype,
                "signature": ["inf" if s == INF else int(s) for s in self.signature],
                "witness": self.witness}


def classify_type(f: MapSpec, n_bound: int = N_BOUND) -> TypeVerdict:
    """
    Monomial, Lattes or nonexceptional.

    Non-PCF maps are nonexceptional; PCF maps are sorted by orbifold
    signature. Monomial-type verdicts carry a verified semiconjugacy to
    z -> c z^(+-d) or z -> +-z^d through z + 1/z.
    """
    data = critical_orbits(f, n_bound)
    if data.pcf is False:
        return TypeVerdict("nonexceptional", False, "certified", n_bound)
    if data.pcf is None:
        log.warning(f"PCF undecided after {n_bound} steps; nonexceptional at evidence level")
        return TypeVerdict("nonexceptional", None, "evidence", n_bound)

    portrait = ramification_portrait(f, data)
    nu = orbifold_weights(portrait)
    signature = orbifold_signature(f, portrait)
    log.debug(f"orbifold signature {signature}")
    heavy = [portrait.nodes[k] for k, v in nu.items() if v == INF]
    if signature in MONOMIAL_SIGNATURES:
        witness = _monomial_witness(f, heavy)
        return TypeVerdict("monomial", True, "certified" if witness else "evidence", n_bound,
                           signature, "power", witness)
    if signature in CHEBYSHEV_SIGNATURES:
        finite = [portrait.nodes[k] for k, v in nu.items() if v == 2]
        witness = _chebyshev_witness(f, heavy[0], finite)
        return TypeVerdict("monomial", True, "certified" if witness else "evidence", n_bound,
                           signature, "chebyshev", witness)
    if signature in LATTES_SIGNATURES:
        return TypeVerdict("lattes", True, "certified", n_bound, signature, "lattes",
                           {"kind": "signature", "signature": [int(s) for s in signature]})
    return TypeVerdict("nonexceptional", True, "certified", n_bound, signature)


# ─── Exceptional points ─────────────────────────────────────────────────

@dataclass
class ExceptionalReport:
    points: List[ProjPoint]
    chart: Optional[dict] = None

    def to_dict(self) -> dict:
        return {"points": [p.to_dict() for p in self.points], "chart": self.chart}


def exceptional_points(f: MapSpec) -> ExceptionalReport:
    """
    Points with finite backward orbit: totally ramified points cycling
    among themselves with period 1 or 2.
    """
    total = [(n, e) for n, e in critical_points(f) if e == f.degree]
    candidates: List[ProjPoint] = []
    for node, _ in total:
        if node.size == 1:
            candidates.append(node.point)
        else:
            fac = poly_from_json(node.key)
            candidates.extend(ProjPoint.affine(r) for r in conjugate_roots(fac, "e"))
    keys = {p.key() for p in candidates}
    points = []
    for p in candidates:
        img = evaluate(f, p)
        if img.key() in keys and evaluate(f, img).key() == p.key():
            points.append(p)

    chart = None
    rational = [p for p in points if p.is_infinite() or p.affine_value().is_rational()]
    if rational:
        target = rational[0]
        a = None if target.is_infinite() else target.affine_value().as_rational()
        M = mobius(1, 0, 0, 1) if a is None else mobius(0, 1, 1, -a)
        g2 = conjugate(compose(f, f), mobius_inverse(M))
        den = Poly(g2.forms[1].as_expr().subs(Y, 1), X, domain=QQ)
        chart = {"send_to_infinity": target.to_dict(), "f2_polynomial": den.degree() == 0}
    return ExceptionalReport(points, chart)
