"""Tests for arith.classify: critical orbits, portraits and type verdicts."""

import math
import random

import pytest

from orbitlab.app_settings import DEFAULT_SEED
from orbitlab.arith.classify import (
    _joukowski,
    chebyshev,
    classify_type,
    critical_orbits,
    critical_points,
    exceptional_points,
    orbifold_signature,
    ramification_portrait,
    verify_semiconjugacy,
)
from orbitlab.arith.exactnum import X
from orbitlab.arith.projdyn import MapSpec, conjugate, mobius
from orbitlab.errors import PreconditionError

LATTES_DOUBLING = "(x^2 + 1)^2 / (4*x*(x^2 - 1))"


def _f(text):
    return MapSpec.from_affine(text)


def test_critical_points_of_quadratic_polynomial():
    crit = critical_points(_f("x^2 + 1"))
    assert sorted(node.label() for node, _ in crit) == ["0", "inf"]
    assert all(e == 2 for _, e in crit)


def test_critical_points_need_degree_two(doubling_map):
    with pytest.raises(PreconditionError):
        critical_points(doubling_map)


def test_critical_orbits_of_basilica():
    data = critical_orbits(_f("x^2 - 1"))
    assert data.pcf is True
    finite = [c for c in data.critical if c.node.label() == "0"][0]
    assert [n.label() for n in finite.orbit] == ["0", "-1", "0"]
    assert (finite.tail, finite.cycle) == (0, 2)


def test_escaping_critical_orbit_certifies_non_pcf():
    data = critical_orbits(_f("x^2 + 1"))
    assert data.pcf is False
    assert data.confidence == "certified"


def test_short_bound_leaves_pcf_undecided():
    verdict = classify_type(_f("x^2 + 1"), n_bound=3)
    assert verdict.pcf is None
    assert verdict.confidence == "evidence"
    assert verdict.type == "nonexceptional"


def test_power_maps_are_monomial(square_map):
    for f in (square_map, _f("x^3")):
        verdict = classify_type(f)
        assert verdict.type == "monomial"
        assert verdict.subtype == "power"
        assert verdict.confidence == "certified"
        assert verdict.witness["verified"] is True


def test_chebyshev_polynomials_are_monomial():
    verdict = classify_type(_f("x^2 - 2"))
    assert verdict.to_dict()["signature"] == [2, 2, "inf"]
    assert verdict.type == "monomial"
    assert verdict.subtype == "chebyshev"
    assert verdict.witness["kind"] == "chebyshev"

    cubic = classify_type(chebyshev(3))
    assert cubic.subtype == "chebyshev"
    assert cubic.confidence == "certified"


def test_basilica_is_nonexceptional_pcf():
    verdict = classify_type(_f("x^2 - 1"))
    assert (verdict.type, verdict.pcf, verdict.confidence) == ("nonexceptional", True, "certified")


def test_non_pcf_map_is_nonexceptional():
    verdict = classify_type(_f("x^2 + 1"))
    assert (verdict.type, verdict.pcf) == ("nonexceptional", False)


def test_lattes_doubling_map():
    verdict = classify_type(_f(LATTES_DOUBLING))
    assert verdict.type == "lattes"
    assert verdict.signature == (2, 2, 2, 2)


def test_orbifold_signature_of_chebyshev():
    assert orbifold_signature(_f("x^2 - 2")) == (2, 2, math.inf)


def test_portrait_needs_pcf():
    with pytest.raises(PreconditionError):
        ramification_portrait(_f("x^2 + 1"))


def test_portrait_edges_carry_local_degree():
    edges = ramification_portrait(_f("x^2 - 2")).to_dict()["edges"]
    assert ["0", "-2", 2] in edges
    assert ["2", "2", 1] in edges


def test_chebyshev_recurrence():
    assert chebyshev(3).affine_numerator().as_expr() == X ** 3 - 3 * X
    with pytest.raises(PreconditionError):
        chebyshev(0)


def test_verify_semiconjugacy_through_joukowski():
    assert verify_semiconjugacy(_joukowski(), _f("x^2"), chebyshev(2))
    assert not verify_semiconjugacy(_joukowski(), _f("x^3"), chebyshev(2))


def test_exceptional_points_of_power_map(square_map):
    report = exceptional_points(square_map)
    assert len(report.points) == 2
    assert report.chart["f2_polynomial"] is True


def test_polynomial_has_only_infinity_exceptional():
    report = exceptional_points(_f("x^2 - 1"))
    assert [p.is_infinite() for p in report.points] == [True]


# seeded properties

def _random_map(rng):
    if rng.random() < 0.5:
        d = rng.randint(2, 4)
        coeffs = [rng.choice([-3, -2, -1, 1, 2, 3])] + [rng.randint(-4, 4) for _ in range(d)]
        return _f(" + ".join(f"({c})*x^{d - k}" for k, c in enumerate(coeffs)))
    while True:
        a, b, c = rng.choice([-2, -1, 1, 2]), rng.randint(-4, 4), rng.randint(-4, 4)
        if a * c * c + b != 0:
            return _f(f"({a}*x^2 + ({b})) / (x + ({c}))")


def _random_mobius(rng):
    while True:
        a, b, c, d = (rng.randint(-3, 3) for _ in range(4))
        if a * d - b * c != 0:
            return mobius(a, b, c, d)


def test_ramification_adds_up_to_riemann_hurwitz():
    rng = random.Random(DEFAULT_SEED)
    for _ in range(20):
        f = _random_map(rng)
        total = sum((e - 1) * node.size for node, e in critical_points(f))
        assert total == 2 * f.degree - 2


@pytest.mark.parametrize("text", ["x^2", "x^2 - 2", "x^2 + 1"])
def test_type_is_invariant_under_conjugation(text):
    rng = random.Random(DEFAULT_SEED)
    f = _f(text)
    expected = classify_type(f).type
    for _ in range(4):
        assert classify_type(conjugate(f, _random_mobius(rng))).type == expected
