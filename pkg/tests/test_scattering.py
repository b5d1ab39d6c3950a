import json
import re
from fractions import Fraction
from math import comb

import pytest
from gmpy2 import mpq

from nvsc import scattering as sc
from nvsc.novikov import AreaExponent, Monomial, ValuationMap, parse
from nvsc.superpotential import SurfaceSpec, build
from nvsc.wallcross import WallTransform

NU = ValuationMap(2, 1)
_cache = {}


def completed(C):
    if C not in _cache:
        _cache[C] = sc.complete(sc.initial_diagram(C), C)
    return _cache[C]


def xy(C):
    return parse("x", C), parse("y", C)


# -- loop products ---------------------------------------------------------------

def test_empty_diagram_is_identity():
    d = sc.Diagram((), 10)
    assert sc.path_ordered_product(d) == xy(10)
    assert sc.path_ordered_product(d, "counterclockwise") == xy(10)
    assert sc.complete(d).walls == ()


def test_initial_walls_fail_at_order_A():
    C = 2 * NU.nu_A
    X, Y = sc.path_ordered_product(sc.initial_diagram(C))
    x, y = xy(C)
    assert (X, Y) != (x, y)
    dx = X * x.invert_unit() - 1
    dy = Y * y.invert_unit() - 1
    assert min(dx.min_valuation(), dy.min_valuation()) == NU.nu_A


def test_initial_commutator_by_hand():
    # first-order bracket: n1 = (1,-1), n2 = (1,1), m1 = (-1,-1), m2 = (1,-1) give
    # q1 q2 (<n1,m2> n2 - <n2,m1> n1) = 4 T^A/y^2 along x; the vertical wall's
    # leading coefficient C(4,3) = 4 is what cancels it
    C = NU.nu_A + mpq(1, 2)
    X, Y = sc.path_ordered_product(sc.initial_diagram(C))
    x, y = xy(C)
    assert X == x - parse("4T^A*x/y^2", C)
    assert Y == y


@pytest.mark.parametrize("m", [4, 6, 8, 10])
def test_completed_loop_is_identity(m):
    d = completed(m * NU.nu_A)
    assert sc.path_ordered_product(d) == xy(m * NU.nu_A)


def test_counterclockwise_loop_is_identity():
    d = completed(6 * NU.nu_A)
    assert sc.path_ordered_product(d, "counterclockwise") == xy(6 * NU.nu_A)
    with pytest.raises(ValueError):
        sc.path_ordered_product(d, "sideways")


# -- wall set --------------------------------------------------------------------

def test_rays_and_their_functions():
    C = 10 * NU.nu_A
    d = completed(C)
    k = 1
    while (2 * k - 1) * NU.nu_A / 2 < C:
        for s in (1, -1):
            w = d.wall((s, -(2 * k - 1)))
            assert w is not None
            q = f"T^{{{2 * k - 1}A/2}}*x^{{{s}}}*y^{{{-(2 * k - 1)}}}"
            t = WallTransform(w.fn.wall_monomial, w.fn.fn_coeffs, *w.clockwise_exponents(w.direction))
            X, Y = t.images(C)
            assert X == parse(f"x*(1+{q})^{2 * k - 1}", C)
            assert Y == parse(f"y*(1+{q})^{{{s}}}", C)
        k += 1
    slopes = {w.direction for w in d.walls}
    assert slopes == {(s, -(2 * j - 1)) for s in (1, -1) for j in range(1, k)} | {(0, -1)}


def test_vertical_wall():
    C = 10 * NU.nu_A
    w = completed(C).wall((0, -1))
    assert w.fn.wall_monomial == Monomial(AreaExponent(1, 0), 0, -2)
    assert w.function(C) == parse("(1-T^A/y^2)^{-4}", C)
    assert list(w.fn.fn_coeffs[:6]) == [comb(j + 3, 3) for j in range(1, 7)]
    # counterclockwise crossing
    X, _ = WallTransform(w.fn.wall_monomial, w.fn.fn_coeffs, -1, 0).images(C)
    assert X == parse("x*(1-T^A/y^2)^4", C)
    half = parse("x*(1-T^A/y^2)^2", C)
    assert X == half.substitute(half, parse("y", C))


def test_prefix_stability():
    small, large = completed(6 * NU.nu_A), completed(10 * NU.nu_A)
    C = small.cutoff
    for w in small.walls:
        other = large.wall(w.direction)
        assert other is not None
        assert other.function(C) == w.function(C)


def test_walls_point_down():
    assert all(w.direction[1] < 0 for w in completed(8 * NU.nu_A).walls)


def test_binomial_factorization():
    assert sc.binomial_factorization([4, 10, 20]) == (-1, -4)
    assert sc.binomial_factorization([3, 3, 1]) == (1, 3)
    assert sc.binomial_factorization([1]) == (1, 1)
    assert sc.binomial_factorization([1, 5]) is None


# -- chambers ----------------------------------------------------------------------

def test_chamber_zero_is_identity():
    assert sc.chamber_transform(completed(6 * NU.nu_A), 0) == xy(12)


def test_chamber_one_and_minus_one():
    C = 12
    d = completed(C)
    assert sc.chamber_transform(d, 1) == (parse("x*(1+T^{A/2}/(x*y))^{-1}", C), parse("y*(1+T^{A/2}/(x*y))", C))
    assert sc.chamber_transform(d, -1) == (parse("x*(1+T^{A/2}*x/y)", C), parse("y*(1+T^{A/2}*x/y)", C))


@pytest.mark.parametrize("k", [-3, -2, -1, 0, 1, 2, 3])
def test_chambers_telescope(k):
    d = completed(12)
    X, Y = sc.chamber_transform(d, k)
    ix, iy = sc.wall_cross(d, k)
    Xn, Yn = sc.chamber_transform(d, k + 1)
    assert (ix.substitute(X, Y), iy.substitute(X, Y)) == (Xn, Yn)


@pytest.mark.parametrize("k", [-3, -2, -1, 0, 1, 2, 3])
def test_chamber_superpotential_pulls_back_to_w0(k):
    d = completed(12)
    X, Y = sc.chamber_transform(d, k)
    assert sc.chamber_superpotential(d, k).substitute(X, Y) == sc.superpotential_f0(12)


PRINTED = {
    -2: "y + (1+T^{A-B})*(T^B/y + T^{A/2+B}/(x*y^2)) + T^{A/2+B}*x/y^2*(1+T^{A/2}/(x*y))^3",
    -1: "y + T^B/y + T^A/y + T^{A/2}/x + T^{A/2+B}*x/y^2",
    0: "y + T^B/y + T^{A/2}*x + T^{A/2}/x",
    1: "y + T^B/y + T^A/y + T^{A/2}*x + T^{A/2+B}/(x*y^2)",
    2: "y + (1+T^{A-B})*(T^B/y + T^{A/2+B}*x/y^2) + T^{A/2+B}/(x*y^2)*(1+T^{A/2}*x/y)^3",
}


def test_printed_chamber_superpotentials():
    C = 12 * NU.nu_A
    Ws = sc.chamber_superpotentials(completed(C), list(PRINTED))
    for k, text in PRINTED.items():
        assert Ws[k] == parse(text, C), k


def test_chamber_beyond_cutoff():
    with pytest.raises(sc.CutoffTooLow):
        sc.chamber_transform(completed(4), 40)


def test_limits():
    C = 8 * NU.nu_A
    d = completed(C)
    W = build(SurfaceSpec("F4"), C)
    y = parse("y", C)
    Wp = sc.limit_superpotential(d, "+")
    Wm = sc.limit_superpotential(d, "-")
    assert Wp == W.substitute(parse("x*(1-T^A/y^2)^{-2}", C), y)
    assert Wm == W.substitute(parse("x*(1-T^A/y^2)^2", C), y)
    assert Wp.substitute(parse("x*(1-T^A/y^2)^4", C), y) == Wm
    with pytest.raises(ValueError):
        sc.limit_superpotential(d, "0")


# -- output -------------------------------------------------------------------------

def test_json_figure():
    d = completed(6 * NU.nu_A)
    doc = json.loads(sc.emit_figure(d, "json"))
    assert doc["cutoff"] == "12"
    assert {tuple(w["dir"]) for w in doc["walls"]} == {w.direction for w in d.walls}
    vert = next(w for w in doc["walls"] if w["dir"] == [0, -1])
    assert vert["factor"] == {"a": "-1", "power": -4}
    assert sc.emit_figure(d, "json") == sc.emit_figure(completed(6 * NU.nu_A), "json")


def test_svg_empty_is_axes_only():
    svg = sc.emit_figure(sc.Diagram((), 6), "svg")
    assert svg.count("<line") == 2 and "<text" not in svg


def test_svg_slopes():
    svg = sc.emit_figure(completed(6 * NU.nu_A), "svg")
    slopes = set(re.findall(r"slope (-?\w+)", svg))
    assert {"1", "-1", "3", "-3", "5", "-5", "inf"} <= slopes
    # every odd slope whose ray monomial lies below the cutoff is drawn
    assert slopes == {str(Fraction(s * j)) for s in (1, -1) for j in (1, 3, 5, 7, 9, 11)} | {"inf"}


def test_bad_format():
    with pytest.raises(ValueError):
        sc.emit_figure(sc.Diagram((), 6), "png")


def test_wall_validation():
    q = Monomial(AreaExponent(mpq(1, 2), 0), 1, -1)
    with pytest.raises(ValueError):
        sc.Wall((2, -2), True, WallTransform(q, (1,), 1, 1))
    with pytest.raises(ValueError):
        sc.Wall((1, -3), True, WallTransform(q, (1,), 3, 1))
    with pytest.raises(ValueError):
        sc.Wall((1, -1), True, WallTransform(q, (1,), 1, 2))
