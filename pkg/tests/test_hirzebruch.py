import pytest
from hypothesis import given, strategies as st

from nvsc import hirzebruch as hz
from nvsc.hirzebruch import (
    BasisMismatch, ConstraintSystem, DiscClass, NotALineFamily, SphereFunctional,
    DIVISOR_FUNCTIONALS as F, cls, convert, enumerate_classes, enumeration_report,
    h_dim, intersect, maslov, obstruction_degree, obstruction_degree_by_transition,
    surface_system, rh_feasible,
)

# F3/F4 basis order: beta1, beta2, sigma, phi
b1, b2, sg, ph = (cls("F3", *(int(i == j) for j in range(4))) for i in range(4))
# F0 chart: alpha0, beta0, A, B
alpha0, beta0, A, B = (cls("F0_chart", *(int(i == j) for j in range(4))) for i in range(4))


def coords(classes):
    return {c.coords for c in classes}


# -- Table 1 -----------------------------------------------------------------

TABLE = {
    # class: (A0, B0, A_inf, B_inf, D_eps, Maslov)
    "alpha0": (alpha0, (-2, 1, 0, 0, 0), -2),
    "beta0": (beta0, (0, 0, 0, 0, 1), 2),
    "A": (A, (0, 1, 0, 1, 2), 4),
    "B": (B, (1, 0, 1, 0, 1), 4),
}


@pytest.mark.parametrize("name", list(TABLE))
def test_intersection_table_row(name):
    c, row, mu = TABLE[name]
    got = tuple(intersect(c, F[f]) for f in ("A0", "B0", "A_inf", "B_inf", "D_eps"))
    assert got == row
    assert maslov(c) == mu
    p1, p2 = hz.maslov_pairings(c)
    assert p1 == p2 == mu


def test_intersect_examples():
    assert intersect(alpha0, F["A0"]) == -2
    assert intersect(beta0, F["D_eps"]) == 1
    assert intersect(cls("F0_chart", 0, 0, 0, 0), F["D_eps"]) == 0


def test_intersect_basis_mismatch():
    with pytest.raises(BasisMismatch):
        intersect(b1, F["A0"])
    with pytest.raises(BasisMismatch):
        b1 + alpha0


def test_class_arithmetic_and_names():
    c = 3 * b2 + sg - b1
    assert c.coords == (-1, 3, 1, 0)
    assert str(c) == "-beta1+3beta2+sigma"
    assert str(cls("F3", 0, 0, 0, 0)) == "0"
    assert c.to_dict() == {"basis": "F3", "coords": [-1, 3, 1, 0], "name": "-beta1+3beta2+sigma"}


def test_class_validation():
    with pytest.raises(ValueError):
        DiscClass((1, 2, 3), "F3")
    with pytest.raises(ValueError):
        DiscClass((1, 2, 3, 4), "P2")


# -- basis change ----------------------------------------------------------------

def test_f4_basis_in_chart():
    f4 = lambda *v: cls("F4", *v)  # noqa: E731
    assert convert(f4(0, 0, 1, 0), "F0_chart") == A - 2 * B       # sigma
    assert convert(f4(0, 0, 0, 1), "F0_chart") == B               # phi
    assert convert(f4(0, 1, 0, 0), "F0_chart") == B - beta0       # beta2
    assert convert(f4(1, 0, 0, 0), "F0_chart") == alpha0 - 2 * beta0 + 2 * B


def test_beta1_meets_divisors_as_expected():
    c = convert(cls("F4", 1, 0, 0, 0), "F0_chart")
    assert [intersect(c, F[f]) for f in ("A0", "B0", "A_inf", "B_inf", "D_eps")] == [0, 1, 2, 0, 0]


def test_convert_unknown_pair():
    with pytest.raises(BasisMismatch):
        convert(b1, "F0_chart")


small = st.tuples(*[st.integers(-6, 6)] * 4)


@given(small, st.sampled_from(list(F)))
def test_basis_change_preserves_pairings(v, fname):
    c = cls("F4", *v)
    chart = convert(c, "F0_chart")
    assert convert(chart, "F4") == c
    s = F[fname]
    assert intersect(chart, s) == intersect(c, hz.pull_back(s, "F4"))


@given(small)
def test_maslov_agrees_across_bases(v):
    c = cls("F4", *v)
    assert maslov(c) == maslov(convert(c, "F0_chart"))


@given(small)
def test_anticanonical_pairings_agree(v):
    p1, p2 = hz.maslov_pairings(cls("F0_chart", *v))
    assert p1 == p2


# -- enumeration ---------------------------------------------------------------

F3_INDEX2_RIGHT = {b1, b2, ph - b2, 3 * b2 + sg - b1, 2 * b2 + sg, b1 + b2 + sg}


def test_f3_index2_right_classes():
    assert set(enumerate_classes(surface_system("f3", 2, "right"), 6)) == F3_INDEX2_RIGHT


def test_f3_index2_left_classes():
    got = set(enumerate_classes(surface_system("f3", 2, "left"), 8))
    assert got == {b1, b2, ph - b2, 2 * b2 + sg, 3 * b2 + sg - b1, 4 * b2 + 2 * sg - b1}


def test_f3_index0_wall_family():
    got = enumerate_classes(surface_system("f3", 0, "wall"), 6)
    assert coords(got) == {(m * (b2 + sg)).coords for m in range(1, 7)}


@pytest.mark.parametrize("side", ["left", "right"])
def test_f3_index0_off_wall_is_empty(side):
    assert enumerate_classes(surface_system("f3", 0, side), 8) == []


def test_f4_index0_family():
    got = enumerate_classes(surface_system("f4", 0), 8)
    f4 = lambda *v: cls("F4", *v)  # noqa: E731
    assert set(got) == {m * f4(0, 2, 1, 0) for m in range(1, 5)}


def test_f4_index2_families_in_chart():
    got = set(enumerate_classes(surface_system("f4", 2), 8))
    step = A - 2 * beta0
    bases = [beta0, B - beta0, alpha0 - 2 * beta0 + 2 * B, A - alpha0 - 2 * beta0]
    expect = set()
    for base in bases:
        for m in range(0, 20):
            c = base + m * step
            if max(map(abs, c.coords)) <= 8:
                expect.add(c)
    assert got == expect
    assert all(maslov(c) == 2 for c in got)


def test_f4_deformed_to_f2_has_no_index0_disc():
    assert enumerate_classes(surface_system("f4", 0, "to_f2"), 8) == []
    assert enumerate_classes(surface_system("f4", 0, "to_f2_nodal"), 8) == []


@pytest.mark.parametrize("key", list(hz.SURFACE_SYSTEMS))
def test_pattern_stability(key):
    sys = hz.SURFACE_SYSTEMS[key]
    small_ = coords(enumerate_classes(sys, 6))
    large = coords(enumerate_classes(sys, 12))
    assert {c for c in large if max(map(abs, c)) <= 6} == small_


@pytest.mark.parametrize("key", list(hz.SURFACE_SYSTEMS))
def test_enumerated_classes_have_right_index(key):
    sys = hz.SURFACE_SYSTEMS[key]
    for c in enumerate_classes(sys, 6):
        assert maslov(c) == 2 * sys.equality[1]


def test_raw_extras_are_reported():
    rep = enumeration_report(surface_system("f3", 2, "right"), 8)
    assert set(rep["classes"]) == F3_INDEX2_RIGHT
    assert len(rep["raw_only"]) > 0
    sys = surface_system("f3", 2, "right")
    for c in rep["raw_only"]:
        assert sys.admits_raw(c) and not sys.admits(c)


def test_infeasible_equality_gives_nothing():
    zero = SphereFunctional("zero", (0, 0, 0, 0), "F3")
    sys = ConstraintSystem("0 = 1", [], (zero, 1))
    assert enumerate_classes(sys, 5) == []


def test_system_rejects_mixed_bases():
    with pytest.raises(BasisMismatch):
        ConstraintSystem("mixed", [(F["A0"], 0)], (hz.half_maslov_functional("F3"), 1))


def test_unknown_system():
    with pytest.raises(KeyError):
        surface_system("f5", 2)


def test_bound_must_be_positive():
    with pytest.raises(ValueError):
        enumerate_classes(surface_system("f3", 2, "right"), 0)


# -- Riemann-Hurwitz, cohomology, obstruction bundles --------------------------

@pytest.mark.parametrize("m", range(1, 11))
def test_rh_even_cover_infeasible(m):
    assert rh_feasible(2 * m, 2 * m) is False


@pytest.mark.parametrize("m", range(0, 11))
def test_rh_odd_cover_feasible(m):
    assert rh_feasible(2 * m + 1, 2 * m) is True


def test_rh_isomorphism_and_errors():
    assert rh_feasible(1, 0)
    with pytest.raises(ValueError):
        rh_feasible(0, 0)
    with pytest.raises(ValueError):
        rh_feasible(2, -1)


@pytest.mark.parametrize("d, i, expected", [(-2, 1, 1), (0, 1, 0), (-1, 0, 0), (-1, 1, 0), (3, 0, 4), (-5, 1, 4)])
def test_h_dim(d, i, expected):
    assert h_dim(d, i) == expected


@given(st.integers(-20, 20))
def test_h_dim_serre_duality_and_euler(d):
    assert h_dim(d, 0) - h_dim(d, 1) == d + 1
    assert h_dim(d, 1) == h_dim(-2 - d, 0)


def test_obstruction_degrees():
    assert obstruction_degree(1, 1) == 1
    assert obstruction_degree(2, 2) == (1, 1)


def test_obstruction_two_routes_agree():
    for n, k in [(1, 1), (2, 2), (3, 3)]:
        assert obstruction_degree(n, k) == obstruction_degree_by_transition(n, k)


def test_obstruction_needs_a_line():
    with pytest.raises(NotALineFamily):
        obstruction_degree(1, 0)
    with pytest.raises(NotALineFamily):
        obstruction_degree_by_transition(2, 1)
