"""Tests for arith.projdyn: points, maps, orbits, multipliers and preimage chains."""

import random

import pytest
from sympy import Rational

from orbitlab.app_settings import DEFAULT_SEED
from orbitlab.arith.exactnum import X, Y, rational_number
from orbitlab.arith.projdyn import (
    MapSpec,
    ProjPoint,
    Z,
    compose,
    conjugate,
    degrees,
    evaluate,
    fixed_points,
    is_preperiodic,
    iterate,
    mobius,
    orbit,
    preimage_chain,
)
from orbitlab.errors import (
    DegenerateLocusError,
    FieldCapError,
    IndeterminatePointError,
    PreconditionError,
)


def _value(pt, factor=0):
    return pt.affine_value(factor).as_rational()


def test_points_are_canonically_scaled():
    pt = ProjPoint.make("P1", [[rational_number(2), rational_number(4)]])
    assert pt.key() == ProjPoint.affine(Rational(1, 2)).key()


def test_point_dict_roundtrip_with_irrational_coordinate(sqrt3_field):
    pt = ProjPoint.affine(sqrt3_field.generator() + 1)
    assert ProjPoint.from_dict(pt.to_dict()).key() == pt.key()


def test_evaluate_affine_and_infinity(square_map):
    assert _value(evaluate(square_map, ProjPoint.affine(3))) == 9
    assert evaluate(square_map, ProjPoint.infinity()).is_infinite()


def test_evaluate_split_map_factorwise():
    f = MapSpec.split([MapSpec.from_affine("2*x"), MapSpec.from_affine("3*x")])
    image = evaluate(f, ProjPoint.product([1, 1]))
    assert (_value(image, 0), _value(image, 1)) == (2, 3)


def test_evaluate_rejects_wrong_space(square_map):
    with pytest.raises(PreconditionError):
        evaluate(square_map, ProjPoint.affine(1, 2))


def test_evaluate_at_indeterminate_point():
    f = MapSpec.p2(X * Z, Y * Z, Z ** 2, verify=False)
    pt = ProjPoint.make("P2", [[rational_number(1), rational_number(0), rational_number(0)]])
    with pytest.raises(IndeterminatePointError):
        evaluate(f, pt)


def test_p1_map_with_common_factor_is_rejected():
    with pytest.raises(PreconditionError):
        MapSpec.p1(X * Y, Y ** 2)


def test_p2_map_with_base_point_is_rejected():
    with pytest.raises(PreconditionError):
        MapSpec.p2(X ** 2, X * Y, Z ** 2)


def test_map_dict_roundtrip():
    f = MapSpec.from_affine("x^2 - 1")
    data = f.to_dict()
    assert data["coeffs"] == [["1", "0", "-1"], ["0", "0", "1"]]
    assert MapSpec.from_dict(data) == f


def test_split_map_dict_checks_factor_count():
    row = [["0", "1"], ["0", "1"]]
    with pytest.raises(PreconditionError):
        MapSpec.from_dict({"space": "P1xN", "n": 3, "coeffs": [row, row]})


def test_orbit_detects_cycle():
    f = MapSpec.from_affine("x^2 - 1")
    report = orbit(f, ProjPoint.affine(0), 4)
    assert [_value(p) for p in report.points] == [0, -1, 0, -1, 0]
    assert (report.tail, report.cycle) == (0, 2)
    assert report.preperiodic


def test_orbit_respects_height_cap(square_map):
    with pytest.raises(FieldCapError):
        orbit(square_map, ProjPoint.affine(2), 10, height_bits_cap=20)


def test_is_preperiodic(square_map):
    assert is_preperiodic(square_map, ProjPoint.affine(-1), 5) == (1, 1)
    assert is_preperiodic(square_map, ProjPoint.affine(2), 5) is None


def test_compose_and_iterate(square_map):
    f2 = iterate(square_map, 2)
    assert f2.forms[0].as_expr() == X ** 4
    assert f2.degree == 4
    with pytest.raises(PreconditionError):
        iterate(square_map, 0)


def test_compose_rejects_mixed_spaces(square_map):
    with pytest.raises(PreconditionError):
        compose(square_map, MapSpec.polynomial_p2("x^2", "y^2"))


def test_conjugate_by_translation(square_map):
    # (x + 1)^2 - 1
    g = conjugate(square_map, mobius(1, 1, 0, 1))
    assert _value(evaluate(g, ProjPoint.affine(1))) == 3


def test_singular_mobius_is_rejected():
    with pytest.raises(PreconditionError):
        mobius(1, 2, 2, 4)


def test_fixed_points_of_square_map(square_map):
    fps = fixed_points(square_map)
    assert len(fps) == 3
    assert sorted(fp.multipliers[0].as_rational() for fp in fps) == [0, 0, 2]
    assert sum(fp.point.is_infinite() for fp in fps) == 1


def test_multiplier_obeys_chain_rule(square_map):
    fps = fixed_points(iterate(square_map, 2))
    one = [fp for fp in fps if not fp.point.is_infinite() and fp.point.affine_value().is_rational()
           and fp.point.affine_value().as_rational() == 1]
    assert len(one) == 1
    assert one[0].multipliers[0].as_rational() == 4


def test_identity_has_degenerate_fixed_locus():
    with pytest.raises(DegenerateLocusError):
        fixed_points(MapSpec.from_affine("x"))


def test_fixed_points_in_the_plane():
    f = MapSpec.polynomial_p2("x^2", "y^2")
    fps = fixed_points(f)
    assert len(fps) == 7
    target = ProjPoint.affine(1, 1).key()
    (fp,) = [fp for fp in fps if fp.point.key() == target]
    assert [m.as_rational() for m in fp.multipliers] == [2, 2]


def test_degrees():
    assert degrees(MapSpec.from_affine("x^2")).to_dict() == {"d_f": 2, "lambda1": 2, "amplified": False}
    rep = degrees(MapSpec.polynomial_p2("x^2", "y^2"))
    assert (rep.topological, rep.dynamical, rep.amplified) == (4, 2, True)
    split = MapSpec.split([MapSpec.from_affine("x^2"), MapSpec.from_affine("x^3")])
    assert (degrees(split).topological, degrees(split).dynamical) == (6, 3)


def test_preimage_chain_prefers_low_degree_then_small_rational(square_map):
    chain = preimage_chain(square_map, ProjPoint.affine(4), 3)
    assert _value(chain.links[1].point) == -2
    assert [link.field_degree for link in chain.links] == [1, 1, 2, 4]
    assert chain.ratios_divide
    assert not chain.truncated


def test_preimage_chain_truncates_at_degree_cap(square_map):
    chain = preimage_chain(square_map, ProjPoint.affine(4), 3, degree_cap=2)
    assert chain.truncated
    assert "exceeds cap" in chain.reason
    assert len(chain.links) == 3


def test_preimage_chain_needs_degree_two(doubling_map):
    with pytest.raises(PreconditionError):
        preimage_chain(doubling_map, ProjPoint.affine(1), 2)


# seeded properties

def test_preimage_chain_degree_ratios_divide_d_factorial():
    rng = random.Random(DEFAULT_SEED)
    for _ in range(20):
        a, b, c = rng.choice([-2, -1, 1, 2]), rng.randint(-3, 3), rng.randint(-5, 5)
        f = MapSpec.from_affine(f"{a}*x^2 + ({b})*x + ({c})")
        chain = preimage_chain(f, ProjPoint.affine(rng.randint(-6, 6)), 3)
        degs = [link.field_degree for link in chain.links]
        assert chain.ratios_divide
        for prev, nxt in zip(degs, degs[1:]):
            assert nxt % prev == 0
            assert 2 % (nxt // prev) == 0


def test_conjugation_commutes_with_iteration():
    rng = random.Random(DEFAULT_SEED)
    f = MapSpec.from_affine("x^2 - 1")
    for _ in range(5):
        while True:
            a, b, c, d = (rng.randint(-3, 3) for _ in range(4))
            if a * d - b * c != 0:
                break
        m = mobius(a, b, c, d)
        lhs, rhs = iterate(conjugate(f, m), 2), conjugate(iterate(f, 2), m)
        for x in (Rational(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(4)):
            pt = ProjPoint.affine(x)
            assert evaluate(lhs, pt).key() == evaluate(rhs, pt).key()
