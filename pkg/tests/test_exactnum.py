"""Tests for arith.exactnum: factorization, number fields and embeddings."""

import random

import mpmath
import pytest
from sympy import Poly, QQ, Rational

from orbitlab.app_settings import DEFAULT_SEED
from orbitlab.arith.exactnum import (
    AlgebraicNumber,
    NumberField,
    X,
    Y,
    certified_roots,
    compare_to,
    complex_abs_values,
    factor_poly_q,
    field_generated_degree,
    joint_field,
    minimal_polynomial,
    primitive_element,
    quadratic_field,
    rational_number,
    rational_to_str,
    resultant,
    to_rational,
)
from orbitlab.errors import PreconditionError


def test_rationals_serialize_exactly():
    assert to_rational("3/4") == Rational(3, 4)
    assert to_rational(" -6/8 ") == Rational(-3, 4)
    assert rational_to_str(Rational(-3, 4)) == "-3/4"
    assert rational_to_str(Rational(10, 2)) == "5"


def test_factor_poly_orders_factors_canonically():
    factors = factor_poly_q(X ** 4 - 1)
    assert [f.as_expr() for f, _ in factors] == [X - 1, X + 1, X ** 2 + 1]
    assert all(m == 1 for _, m in factors)


def test_factor_poly_reports_multiplicity():
    factors = factor_poly_q((X - 2) ** 3 * (X + 5))
    assert (Poly(X - 2, X, domain=QQ), 3) in factors


def test_factor_poly_refuses_degree_above_cap():
    with pytest.raises(PreconditionError):
        factor_poly_q(X ** 20 + 1, max_degree=16)


def test_resultant_eliminates_y():
    r = resultant(X - Y, Y ** 2 - 2, eliminate=Y)
    assert r.monic() == Poly(X ** 2 - 2, X, domain=QQ)


def test_resultant_with_constant_factor():
    r = resultant(Rational(3), Y ** 2 - X, eliminate=Y)
    assert r == Poly(9, X, domain=QQ)


def test_certified_roots_are_ordered_by_real_part():
    roots = certified_roots(Poly(X ** 2 - 2, X, domain=QQ))
    assert len(roots) == 2
    assert abs(roots[0][0].real - 1.41421356) < 1e-6
    assert abs(roots[1][0].real + 1.41421356) < 1e-6


def test_generator_satisfies_its_minimal_polynomial(sqrt3_field):
    g = sqrt3_field.generator()
    assert g * g == sqrt3_field.rational(3)
    assert (1 + g) * (1 + g).inverse() == sqrt3_field.one()


def test_norm_trace_and_minimal_polynomial(sqrt3_field):
    a = 2 + sqrt3_field.generator()
    assert a.norm() == 1
    assert a.trace() == 4
    assert minimal_polynomial(a) == Poly(X ** 2 - 4 * X + 1, X, domain=QQ)


def test_field_from_dict_rejects_reducible_polynomial():
    with pytest.raises(PreconditionError):
        NumberField.from_dict({"min_poly": ["-1", "0", "1"]})


def test_algebraic_number_dict_roundtrip(sqrt3_field):
    a = sqrt3_field.generator() * Rational(1, 2) + 7
    assert AlgebraicNumber.from_dict(a.to_dict()) == a


def test_primitive_element_of_two_square_roots():
    s2 = quadratic_field(2).generator()
    s3 = quadratic_field(3).generator()
    fld, a, b = primitive_element(s2, s3)
    assert fld.degree == 4
    assert a * a == fld.rational(2)
    assert b * b == fld.rational(3)


def test_joint_field_of_rationals_stays_rational():
    fld, images = joint_field([rational_number(2), rational_number(Rational(1, 3))])
    assert fld.degree == 1
    assert images[1].as_rational() == Rational(1, 3)


def test_field_generated_degree():
    s2 = quadratic_field(2).generator()
    assert field_generated_degree([s2, s2 + 1]) == 2


def test_complex_moduli_of_unit_in_real_quadratic_field(sqrt3_field):
    a = 2 + sqrt3_field.generator()
    moduli = complex_abs_values(a)
    assert len(moduli) == 2
    (big, e1), (small, e2) = moduli
    assert compare_to(big, e1, 1.0) == 1
    assert compare_to(small, e2, 1.0) == -1
    assert abs(big * small - 1.0) < 1e-8


def test_compare_to_is_indeterminate_inside_margin():
    assert compare_to(1.0, 0.0, 1.0) is None
    assert compare_to(1.5, 0.1, 1.0) == 1


# seeded properties

def _random_monic(rng):
    d = rng.randint(1, 6)
    return Poly([1] + [rng.randint(-6, 6) for _ in range(d)], X, domain=QQ)


def test_factorization_reconstructs_random_polynomials():
    rng = random.Random(DEFAULT_SEED)
    for _ in range(40):
        p = _random_monic(rng)
        if rng.random() < 0.3:
            p = p * Poly(X - rng.randint(-3, 3), X, domain=QQ) ** 2
        factors = factor_poly_q(p, None)
        product = Poly(1, X, domain=QQ)
        for fac, mult in factors:
            assert fac.LC() == 1
            assert fac.is_irreducible
            product = product * fac ** mult
        assert product == p


def test_certified_roots_are_separated_roots():
    rng = random.Random(DEFAULT_SEED)
    for _ in range(20):
        p = _random_monic(rng).sqf_part()
        roots = certified_roots(p)
        assert len(roots) == p.degree()
        for k, (z, radius) in enumerate(roots):
            with mpmath.workdps(60):
                coeffs = [mpmath.mpf(int(c.p)) / int(c.q) for c in p.all_coeffs()]
                assert abs(mpmath.polyval(coeffs, z)) < 1e-20 * max(1, abs(z)) ** p.degree()
            for w, other in roots[k + 1:]:
                assert abs(z - w) > radius + other
