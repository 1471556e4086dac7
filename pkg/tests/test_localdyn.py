"""Tests for arith.localdyn: good primes, arcs, flows, return times and polydisks."""

import pytest
from sympy import Rational

from orbitlab.arith.localdyn import (
    build_arc,
    dml_decide,
    find_good_prime,
    flow_evaluate,
    homogeneous_resultant,
    invariant_polydisk,
    return_times_bruteforce,
)
from orbitlab.arith.padic import PadicElement
from orbitlab.arith.projdyn import MapSpec, ProjPoint
from orbitlab.errors import ConvergenceError, NotPolydiskSelfMapError, PreconditionError


def _split(*exprs):
    return MapSpec.split([MapSpec.from_affine(e) for e in exprs])


def test_homogeneous_resultant():
    assert homogeneous_resultant([1, 0, -1], [0, 0, 1]) == 1
    assert homogeneous_resultant([1, 0], [1, 0]) == 0


def test_good_prime_for_doubling(doubling_map):
    report = find_good_prime(doubling_map, ProjPoint.affine(1), p_min=3)
    assert report.prime == 3
    assert report.period == 2
    assert report.cycles[0].cycle == [1, 2]


def test_good_prime_skips_bad_reduction():
    f = _split("2*x", "3*x")
    report = find_good_prime(f, ProjPoint.product([1, 1]), p_min=3)
    assert report.prime == 5
    assert report.period == 4
    assert report.failures[3] == "bad reduction"


def test_superattracting_residue_cycles_have_no_good_prime(square_map):
    with pytest.raises(PreconditionError, match="superattracting"):
        find_good_prime(square_map, ProjPoint.affine(0), p_min=3, p_max=7)


def test_empty_prime_range(doubling_map):
    with pytest.raises(PreconditionError):
        find_good_prime(doubling_map, ProjPoint.affine(1), p_min=11, p_max=7)


def test_translation_flow_is_linear_in_t():
    f = MapSpec.from_affine("x + 1")
    x = ProjPoint.affine(0)
    arc = build_arc(f, find_good_prime(f, x, p_min=5), x, M=20)
    assert arc.period == 5
    assert arc.series[0].coefficients[1] == 5
    assert flow_evaluate(arc, 2)[0] == 10
    assert flow_evaluate(arc, Rational(1, 2))[0] == PadicElement.from_rational(Rational(5, 2), 5, 20)


def test_flow_parameter_must_be_integral():
    f = MapSpec.from_affine("x + 1")
    x = ProjPoint.affine(0)
    arc = build_arc(f, find_good_prime(f, x, p_min=5), x, M=20)
    with pytest.raises(PreconditionError):
        flow_evaluate(arc, Rational(1, 5))


def test_flow_matches_orbit_at_integers(doubling_map):
    x = ProjPoint.affine(1)
    arc = build_arc(doubling_map, find_good_prime(doubling_map, x, p_min=3), x)
    # g = f^2, so t = 3 lands on f^6(1)
    assert flow_evaluate(arc, 3)[0] == 64


def test_period_is_raised_until_contraction_suffices():
    f = MapSpec.from_affine("x + 1")
    x = ProjPoint.affine(0)
    report = find_good_prime(f, x, p_min=2)
    assert (report.prime, report.period) == (2, 2)
    assert build_arc(f, report, x, M=20).period == 4
    with pytest.raises(ConvergenceError):
        build_arc(f, report, x, M=20, m_max=2)


def test_bruteforce_return_times(doubling_map):
    assert return_times_bruteforce(doubling_map, ProjPoint.affine(1), "x - 8", 10) == [3]


def test_dml_single_hit(doubling_map):
    x = ProjPoint.affine(1)
    arc = build_arc(doubling_map, find_good_prime(doubling_map, x, p_min=3), x)
    verdict = dml_decide(doubling_map, x, "x - 8", arc, n_direct=60)
    assert verdict.hits == [3]
    assert verdict.progressions == []
    assert verdict.confidence == "certified"
    assert verdict.period == 2


def test_dml_translation_hits_zero_once():
    f = MapSpec.from_affine("x + 1")
    x = ProjPoint.affine(-5)
    arc = build_arc(f, find_good_prime(f, x), x)
    verdict = dml_decide(f, x, "x", arc, n_direct=60)
    assert verdict.hits == [5]
    assert verdict.confidence == "certified"


def test_dml_fixed_point_on_the_subvariety_is_a_progression():
    f = MapSpec.from_affine("x")
    x = ProjPoint.affine(3)
    arc = build_arc(f, find_good_prime(f, x), x)
    verdict = dml_decide(f, x, "x - 3", arc, n_direct=40)
    assert verdict.progressions == [{"a": 0, "b": 1}]
    assert verdict.hits == []
    assert verdict.classes[0].status == "full"


def test_dml_on_split_map_diagonal():
    f = _split("2*x", "3*x")
    x = ProjPoint.product([1, 1])
    arc = build_arc(f, find_good_prime(f, x), x)
    verdict = dml_decide(f, x, "x1 - x2", arc, n_direct=60)
    assert arc.prime == 5 and arc.period == 4
    assert verdict.hits == [0]
    assert verdict.progressions == []
    assert verdict.classes[0].status == "finite"
    assert verdict.classes[0].certified


def test_invariant_polydisk_scales_nonlinear_terms():
    f = _split("4*x + x^2", "3*x")
    result = invariant_polydisk(f, ProjPoint.product([0, 0]), 3)
    assert result.radius_exponent == 1
    assert result.reduction == [[1, 0], [0, 0]]
    assert not result.swapped
    assert result.map.f1.coefficient(2, 0) == 3


def test_invariant_polydisk_of_linear_map():
    result = invariant_polydisk(_split("2*x", "3*x"), ProjPoint.product([0, 0]), 5)
    assert result.radius_exponent == 0
    assert result.reduction == [[2, 0], [0, 3]]


def test_invariant_polydisk_negative_valuation_coefficient():
    result = invariant_polydisk(_split("2*x + x^3/3", "3*x"), ProjPoint.product([0, 0]), 3)
    assert result.radius_exponent == 1
    assert result.map.f1.coefficient(3, 0) == 3


def test_invariant_polydisk_exponent_is_least_per_degree():
    cubic = invariant_polydisk(_split("2*x + x^3/27", "3*x"), ProjPoint.product([0, 0]), 3)
    assert cubic.radius_exponent == 2
    assert cubic.map.f1.coefficient(3, 0) == 3
    mixed = invariant_polydisk(_split("2*x + x^2/3 + x^3/27", "3*x"), ProjPoint.product([0, 0]), 3)
    assert mixed.radius_exponent == 2
    assert mixed.map.f1.coefficient(2, 0) == 3


def test_invariant_polydisk_keeps_exponent_zero_for_divisible_terms():
    result = invariant_polydisk(_split("2*x + 3*x^2", "3*x + 9*x^5"), ProjPoint.product([0, 0]), 3)
    assert result.radius_exponent == 0


def test_invariant_polydisk_swaps_lower_triangular_reduction():
    f = MapSpec.polynomial_p2("2*x", "x + 3*y")
    result = invariant_polydisk(f, ProjPoint.affine(0, 0), 5)
    assert result.swapped
    assert result.reduction == [[3, 1], [0, 2]]


def test_invariant_polydisk_needs_a_fixed_point():
    with pytest.raises(PreconditionError):
        invariant_polydisk(_split("4*x + x^2", "3*x"), ProjPoint.product([1, 1]), 3)


def test_invariant_polydisk_rejects_non_integral_linear_part():
    with pytest.raises((NotPolydiskSelfMapError, PreconditionError)):
        invariant_polydisk(_split("x/3", "x/3"), ProjPoint.product([0, 0]), 3)
