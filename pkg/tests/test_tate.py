"""Tests for arith.tate: Tate series, pullbacks, contraction and the attractor."""

import random

import pytest
from sympy import Rational

from orbitlab.app_settings import DEFAULT_SEED
from orbitlab.arith.exactnum import X, Y
from orbitlab.arith.padic import INF, PadicElement
from orbitlab.arith.tate import (
    PolydiskMap,
    TateSeries2,
    attractor_psi,
    compose,
    contraction_constants,
    gauss_norm,
    rho_f_seminorm,
    semiconjugacy_residual,
)
from orbitlab.errors import NormalFormRequiredError, NotPolydiskSelfMapError


def _fixed_line(p=3, T=8, M=20):
    const = TateSeries2.from_poly(3, p, T, M)
    return PolydiskMap.fixed_line(const, const)


def test_from_poly_keeps_tail_bound():
    s = TateSeries2.from_poly(X ** 5 + 9 * X ** 6 + 1, 3, T=4, M=20)
    assert set(s.terms) == {(0, 0)}
    assert s.tail_valuation == 0


def test_product_drops_terms_above_truncation():
    a = TateSeries2.from_poly(X ** 3, 3, T=4, M=20)
    b = TateSeries2.from_poly(X ** 2, 3, T=4, M=20)
    prod = a * b
    assert prod.is_zero()
    assert prod.tail_valuation == 0


def test_gauss_norm_report():
    s = TateSeries2.from_poly(9 * X + 3 * Y, 3)
    report = gauss_norm(s)
    assert report["valuation"] == 1
    assert report["norm"] == "1/3"


def test_fixed_line_map_components():
    f = _fixed_line()
    assert f.tag == "fixed_line"
    assert f.f1.coefficient(1, 0) == 1
    assert f.f1.coefficient(0, 1) == 3
    assert f.f2.coefficient(0, 1) == 3


def test_pullback_of_coordinate_function():
    f = _fixed_line()
    s = compose(f, TateSeries2.from_poly(X, 3, 8, 20))
    assert s.coefficient(1, 0) == 1
    assert s.coefficient(0, 1) == 3


def test_map_leaving_the_polydisk_is_rejected():
    f = PolydiskMap.from_polys(X / 3, Y, 3)
    with pytest.raises(NotPolydiskSelfMapError):
        compose(f, TateSeries2.from_poly(X, 3))


def test_contraction_constants_of_fixed_line():
    assert contraction_constants(_fixed_line()) == (1, 1)


def test_contraction_needs_normal_form():
    f = PolydiskMap.from_polys(X + 3 * Y, 3 * Y, 3)
    with pytest.raises(NormalFormRequiredError):
        contraction_constants(f)


def test_rho_of_y_reaches_the_attractor_ideal():
    f = _fixed_line(T=8, M=10)
    rho = rho_f_seminorm(f, TateSeries2.from_poly(Y, 3, 8, 10), n_max=10)
    assert rho.valuations[:7] == [0, 1, 2, 3, 4, 5, 6]
    assert len(rho.valuations) == 11
    assert rho.in_attractor_ideal


def test_rho_of_x_stays_at_one():
    f = _fixed_line(T=8, M=10)
    rho = rho_f_seminorm(f, TateSeries2.from_poly(X, 3, 8, 10), n_max=5)
    assert rho.valuations == [0] * 6
    assert not rho.in_attractor_ideal


def test_attractor_psi_sums_geometric_series():
    # psi_1 = x + (3 + 9 + 27 + ...) y = x - 3/2 y
    f = _fixed_line()
    data = attractor_psi(f)
    psi1, psi2 = data.psi
    assert psi1.coefficient(1, 0) == 1
    assert psi1.coefficient(0, 1) == PadicElement.from_rational(Rational(-3, 2), 3, 20)
    assert psi2.is_zero()
    assert data.generator.coefficient(0, 1) == 1
    assert data.contraction == (1, 1)


def test_semiconjugacy_residual_vanishes_at_precision():
    f = _fixed_line()
    data = attractor_psi(f)
    assert semiconjugacy_residual(f, data.psi) >= 18
    assert all(r == INF or r >= 18 for r in data.residuals)


# seeded properties

def _random_poly(rng, p, min_val, degree=2):
    """Integral polynomial in x, y whose Gauss valuation is exactly min_val."""
    expr = p ** min_val * rng.choice([1, 2, -1, -2])
    for i in range(degree + 1):
        for j in range(degree + 1 - i):
            if (i, j) != (0, 0):
                expr += p ** min_val * rng.randint(-9, 9) * X ** i * Y ** j
    return expr


def test_gauss_norm_is_multiplicative_and_ultrametric():
    rng = random.Random(DEFAULT_SEED)
    for _ in range(30):
        va, vb = rng.randint(0, 3), rng.randint(0, 3)
        a = TateSeries2.from_poly(_random_poly(rng, 3, va), 3, T=8, M=20)
        b = TateSeries2.from_poly(_random_poly(rng, 3, vb), 3, T=8, M=20)
        assert a.valuation() == va
        assert (a * b).valuation() == va + vb
        assert (a + b).valuation() >= min(va, vb)
        assert gauss_norm(a * b)["valuation"] == va + vb


def test_fixed_line_maps_contract_and_semiconjugate():
    rng = random.Random(DEFAULT_SEED)
    T, M = 6, 12
    for _ in range(10):
        P = TateSeries2.from_poly(_random_poly(rng, 3, 1, degree=1), 3, T, M)
        Q = TateSeries2.from_poly(_random_poly(rng, 3, rng.randint(1, 2), degree=1), 3, T, M)
        f = PolydiskMap.fixed_line(P, Q)
        vb, m = contraction_constants(f)
        assert (vb, m) == (Q.valuation(), 1)
        rho = rho_f_seminorm(f, TateSeries2.from_poly(Y, 3, T, M), n_max=4)
        assert all(v == INF or v >= n * vb for n, v in enumerate(rho.valuations))
        data = attractor_psi(f)
        assert all(r == INF or r >= M - 2 for r in data.residuals)


def test_contraction_constant_tracks_the_valuation_of_q():
    rng = random.Random(DEFAULT_SEED)
    zero = TateSeries2.zero(3, 6, 10)
    for _ in range(25):
        k = rng.randint(1, 4)
        Q = TateSeries2.from_poly(_random_poly(rng, 3, k, degree=1), 3, 6, 10)
        assert contraction_constants(PolydiskMap.fixed_line(zero, Q)) == (k, 1)
