"""Tests for arith.padic: capped-precision elements, Newton polygons, places."""

import random

import pytest
from sympy import Poly, QQ, Rational, roots

from orbitlab.app_settings import DEFAULT_SEED
from orbitlab.arith.exactnum import NumberField, X, quadratic_field
from orbitlab.arith.padic import (
    IDENTICALLY_ZERO,
    INF,
    PadicElement,
    PadicSeries1,
    hensel_root,
    newton_polygon,
    padic_exp,
    padic_log,
    places_above,
    strassmann_count,
    valuation_q,
)
from orbitlab.errors import HenselError, InconclusiveTruncationError, PreconditionError


def _pe(r, p=3, prec=20):
    return PadicElement.from_rational(r, p, prec)


def test_valuation_of_rationals():
    assert valuation_q(12, 2) == 2
    assert valuation_q(Rational(1, 9), 3) == -2
    assert valuation_q(0, 5) == INF


def test_inverse_of_three_mod_powers_of_five():
    assert _pe(Rational(1, 3), p=5, prec=10) * 3 == 1


def test_sum_gains_valuation():
    assert (_pe(2) + 1).valuation == 1
    assert (_pe(-1) + 1).is_zero()


def test_equality_is_congruence_at_precision():
    assert _pe(1, prec=5) == _pe(1 + 3 ** 5, prec=5)
    assert not (_pe(1, prec=6) == _pe(1 + 3 ** 5, prec=6))


def test_division_and_negative_powers():
    assert _pe(6) / _pe(3) == 2
    assert (_pe(3) ** -2) * 9 == 1


def test_mixing_primes_is_rejected():
    with pytest.raises(PreconditionError):
        _pe(1, p=3) + _pe(1, p=5)


def test_digits_roundtrip_through_dict():
    a = _pe(Rational(7, 2), p=3, prec=8)
    assert PadicElement.from_dict(a.to_dict()) == a


def test_newton_polygon_of_eisenstein_polynomial():
    np_ = newton_polygon([-3, 0, 1], 3)
    assert np_.root_valuations() == [Rational(1, 2), Rational(1, 2)]


def test_newton_polygon_separates_root_valuations():
    # roots 2 and 3
    np_ = newton_polygon([6, -5, 1], 2)
    assert sorted(np_.root_valuations()) == [0, 1]


def test_newton_polygon_counts_zero_roots():
    np_ = newton_polygon([0, 0, 2, 1], 2)
    assert np_.zero_roots == 2
    assert np_.root_valuations()[:2] == [INF, INF]


def test_hensel_lifts_square_root_of_two_mod_seven():
    r = hensel_root([-2, 0, 1], 7, 3, precision=12)
    assert r * r == PadicElement.from_rational(2, 7, 12)


def test_hensel_refuses_non_root():
    with pytest.raises(HenselError):
        hensel_root([-2, 0, 1], 7, 1)


def test_log_is_additive_and_exp_inverts_it():
    u, w = _pe(4), _pe(10)
    assert padic_log(u * w) == padic_log(u) + padic_log(w)
    assert padic_exp(padic_log(u)).with_precision(15) == _pe(4, prec=15)


def test_log_outside_domain():
    with pytest.raises(PreconditionError):
        padic_log(_pe(2))


def test_strassmann_bound_is_last_index_of_maximal_norm():
    s = PadicSeries1(3, [_pe(3), _pe(1), _pe(9), _pe(3)], INF)
    assert strassmann_count(s) == 1


def test_strassmann_identically_zero():
    s = PadicSeries1(3, [PadicElement.zero(3, 20)] * 3, INF)
    assert strassmann_count(s) == IDENTICALLY_ZERO


def test_strassmann_without_tail_certificate_is_inconclusive():
    s = PadicSeries1(3, [_pe(3), _pe(1)], None)
    with pytest.raises(InconclusiveTruncationError):
        strassmann_count(s)


def test_split_prime_gives_two_degree_one_places():
    fld = quadratic_field(2)
    a = 3 + fld.generator()  # norm 7
    places = places_above(fld, 7, [a])
    assert [(pl.residue_degree, pl.ramification) for pl in places] == [(1, 1), (1, 1)]
    assert sorted(pl.valuations[0] for pl in places) == [0, 1]


def test_inert_prime_gives_one_place():
    fld = NumberField.from_root(X ** 2 + 1, 1j)
    places = places_above(fld, 3, [fld.rational(3)])
    assert len(places) == 1
    assert places[0].residue_degree == 2
    assert places[0].valuations[0] == 1


def test_totally_ramified_prime():
    fld = quadratic_field(2)
    places = places_above(fld, 2, [fld.generator()])
    assert len(places) == 1
    assert places[0].ramification == 2
    assert places[0].valuations[0] == Rational(1, 2)


# seeded properties

def _random_roots(rng, p, count):
    return [rng.choice([1, -1]) * rng.randint(1, 40) * p ** rng.randint(0, 3) for _ in range(count)]


def _from_roots(roots, zeros=0, extra=1):
    expr = X ** zeros * extra
    for r in roots:
        expr *= X - r
    return Poly(expr, X, domain=QQ)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_newton_slopes_are_root_valuations(p):
    rng = random.Random(DEFAULT_SEED + p)
    for _ in range(15):
        roots = _random_roots(rng, p, rng.randint(1, 5))
        zeros = rng.randint(0, 2)
        np_ = newton_polygon(_from_roots(roots, zeros), p)
        assert np_.zero_roots == zeros
        assert sorted(np_.root_valuations()) == sorted([valuation_q(r, p) for r in roots] + [INF] * zeros)
        assert sum(length for _, length in np_.slopes) == len(roots)


@pytest.mark.parametrize("p", [3, 5])
def test_strassmann_count_matches_roots_in_the_unit_disk(p):
    rng = random.Random(DEFAULT_SEED + p)
    for _ in range(15):
        integral = _random_roots(rng, p, rng.randint(1, 4))
        outside = [Rational(1, p * rng.randint(1, 4)) for _ in range(rng.randint(0, 2))]
        poly = _from_roots(integral + outside, extra=rng.choice([1, 2, 4, 7]))
        coeffs = [_pe(c, p=p, prec=30) for c in reversed(poly.all_coeffs())]
        brute = sum(m for r, m in roots(poly.as_expr(), X).items() if valuation_q(r, p) >= 0)
        assert strassmann_count(PadicSeries1(p, coeffs, INF)) == brute
