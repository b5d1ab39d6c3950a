import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from nvsc.novikov import AreaExponent, Monomial, parse
from nvsc.superpotential import SurfaceSpec, build
from nvsc.wallcross import (
    F3_LEFT, F3_RIGHT, Inconsistent, Underdetermined, WallTransform, apply,
    gluing_report, solve_wall_function, verify_gluing,
)

C = 20
Q_Y = Monomial(AreaExponent(1, 0), 0, -1)              # T^A / y
Q_XY = Monomial(AreaExponent(mpq(1, 2), 0), 1, -1)     # T^{A/2} x / y


def P(text, cutoff=C):
    return parse(text, cutoff)


def test_f3_wall_function():
    got = solve_wall_function(P(F3_RIGHT), P(F3_LEFT), Q_Y, 1, 0, 6)
    assert got == [1, 0, 0, 0, 0, 0]


def test_identity_gives_zero_function():
    W = P(F3_RIGHT)
    assert solve_wall_function(W, W, Q_Y, 1, 0, 6) == [0] * 6


def test_f2_to_vianna_chart_roles():
    f2 = build(SurfaceSpec("F2"), 16)
    alt = build(SurfaceSpec("F4", "f4_alt"), 16)
    # the printed transform carries the F2 chart to the alternative F4 chart
    assert solve_wall_function(alt, f2, Q_XY, -1, -1, 6) == [1, 0, 0, 0, 0, 0]
    # with the roles swapped the same wall has the inverse function 1/(1+q)
    assert solve_wall_function(f2, alt, Q_XY, -1, -1, 6) == [(-1) ** k for k in range(1, 7)]


def test_printed_transform_on_f2():
    t = WallTransform(Q_XY, (1,), -1, -1)
    assert apply(t, build(SurfaceSpec("F2"), 16)) == build(SurfaceSpec("F4", "f4_alt"), 16)


def test_f3_transform_left_to_right():
    t = WallTransform(Q_Y, (1,), 1, 0)
    assert apply(t, P(F3_LEFT)) == P(F3_RIGHT)


def test_trivial_transform():
    W = P(F3_RIGHT)
    assert apply(WallTransform(Q_Y, (0, 0, 0), 1, 0), W) == W
    assert apply(WallTransform(Q_Y, (), 1, 0), W) == W


def test_unmoved_target_is_underdetermined():
    W = P("y + T^B/y")
    with pytest.raises(Underdetermined):
        solve_wall_function(W, W, Q_Y, 1, 0, 3)


def test_unrelated_series_are_inconsistent():
    with pytest.raises(Inconsistent):
        solve_wall_function(P("x + y"), P("x + 2y"), Q_Y, 1, 0, 3)
    with pytest.raises(Inconsistent):
        solve_wall_function(P("y + T^B/y + x"), P("y + T^B/y"), Q_Y, 1, 0, 3)


def test_order_beyond_cutoff():
    with pytest.raises(Underdetermined):
        solve_wall_function(P(F3_RIGHT, 5), P(F3_LEFT, 5), Q_Y, 1, 0, 6)


def test_wall_monomial_must_be_small():
    with pytest.raises(ValueError):
        WallTransform(Monomial(AreaExponent(), 1, 0), (1,), 0, 1)


def test_gluing():
    assert verify_gluing(10)
    assert not verify_gluing(10, h="1")
    assert not verify_gluing(10, h="1 + 2T^A/y")


def test_gluing_report_difference():
    r = gluing_report(10, h="1 + 2T^A/y")
    assert r["uv"] == parse("1 + 2T^A/y", 10)
    assert not r["difference"].is_zero()
    assert gluing_report(10)["difference"].is_zero()


# -- properties ------------------------------------------------------------------

coeffs = st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4), min_size=1, max_size=4)
series_text = st.sampled_from([F3_RIGHT, F3_LEFT, "x + y + T^B/y", "x^2 + T^A/(x*y) + 3y"])


@given(coeffs, series_text)
def test_solve_recovers_coefficients(cs, text):
    W = P(text)
    t = WallTransform(Q_Y, cs, 1, 0)
    got = solve_wall_function(apply(t, W), W, Q_Y, 1, 0, len(cs))
    assert got == [mpq(c) for c in cs]


@given(coeffs, series_text)
def test_inverse_undoes_transform(cs, text):
    W = P(text)
    t = WallTransform(Q_XY, cs, -1, -1)
    assert apply(t.inverse(), apply(t, W)) == W


@given(coeffs, series_text, series_text)
def test_transform_is_multiplicative(cs, a, b):
    t = WallTransform(Q_Y, cs, 1, 0)
    A, B = P(a, 10), P(b, 10)
    assert apply(t, A * B) == apply(t, A) * apply(t, B)
    assert apply(t, A + B) == apply(t, A) + apply(t, B)
