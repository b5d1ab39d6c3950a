"""The acceptance checks, shared by ``nvsc verify-all`` and the test suite."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from math import comb

from gmpy2 import mpq

from . import hirzebruch as hz
from . import scattering as sc
from . import superpotential as spot
from .novikov import (
    DEFAULT_NU, AreaExponent, Monomial, NovikovSeries, ValuationMap, const, from_keys, parse, rat,
)
from .wallcross import F3_LEFT, F3_RIGHT, WallTransform, apply, solve_wall_function, verify_gluing


@dataclass
class CheckResult:
    id: int
    name: str
    formula: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0
    budget: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.id:>2} {self.name} ({self.seconds:.2f}s / {self.budget:g}s) {self.detail}".rstrip()

    def to_dict(self) -> dict:
        return {"id": self.id, "name": self.name, "formula": self.formula, "passed": self.passed,
                "detail": self.detail, "seconds": round(self.seconds, 3), "budget": self.budget}


@dataclass
class Config:
    nu: ValuationMap = DEFAULT_NU
    scatter_cutoff: object = None   # caps the scattering checks when set
    property_cases: int = 1000
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def capped(self, C):
        C = rat(C)
        return C if self.scatter_cutoff is None else min(C, rat(self.scatter_cutoff))


def _q_y(nu):
    return Monomial(AreaExponent(1, 0), 0, -1)


# 1
def check_f3_wall_function(cfg: Config):
    nu = cfg.nu
    C = 20 * nu.nu_B
    got = solve_wall_function(parse(F3_RIGHT, C, nu), parse(F3_LEFT, C, nu), _q_y(nu), 1, 0, 6)
    ok = [int(c) if c.denominator == 1 else c for c in got] == [1, 0, 0, 0, 0, 0]
    return ok, f"c = {[str(c) for c in got]}"


# 2
def check_f3_gluing(cfg: Config):
    ok = verify_gluing(10 * cfg.nu.nu_B, nu=cfg.nu)
    return ok, ""


# 3
def check_f4_closed_form(cfg: Config):
    nu = cfg.nu
    C = 20 * nu.nu_B
    spec = spot.SurfaceSpec("F4", "f4_series")
    W = spot.build(spec, C, nu)
    closed = parse(spot.CLOSED_FORMS["f4_series"], C, nu)
    bad = []
    half = mpq(1, 2)
    for k in range(9):
        if k * nu.nu_A + nu.nu_B < C and W.coeff(AreaExponent(k, 1), 0, -2 * k - 1) != 2 * k + 1:
            bad.append(f"odd k={k}")
        for xe in (1, -1):
            if (half + k) * nu.nu_A + nu.nu_B < C and W.coeff(AreaExponent(half + k, 1), xe, -2 * k - 2) != k + 1:
                bad.append(f"x^{xe} k={k}")
    ok = W == closed and not bad
    return ok, "; ".join(bad) if bad else f"{len(W)} terms"


# 4
def check_f4_to_f2(cfg: Config):
    nu = cfg.nu
    C = 16 * nu.nu_B
    t = WallTransform(Monomial(AreaExponent(mpq(1, 2), 0), 1, -1), (1,), -1, -1, nu)
    got = apply(t, spot.build(spot.SurfaceSpec("F2"), C, nu))
    want = spot.build(spot.SurfaceSpec("F4", "f4_alt"), C, nu)
    return got == want, f"{len(got)} terms"


def completed(cfg: Config, C):
    key = ("diagram", str(C), cfg.nu)
    if key not in cfg.extra:
        cfg.extra[key] = sc.complete(sc.initial_diagram(C, cfg.nu), C)
    return cfg.extra[key]


def diagram_mismatches(d: sc.Diagram) -> list:
    """Differences between a completed diagram and the expected wall set."""
    nu, C = d.nu, d.cutoff
    bad = []
    k = 1
    while (2 * k - 1) * nu.nu_A / 2 < C:
        for s in (1, -1):
            dirn = (s, -(2 * k - 1))
            w = d.wall(dirn) or d.wall((-dirn[0], -dirn[1]))
            q = Monomial(AreaExponent(mpq(2 * k - 1, 2), 0), s, -(2 * k - 1))
            if w is None:
                bad.append(f"no wall along {dirn}")
                continue
            if w.fn.wall_monomial != q or list(w.fn.fn_coeffs) != [1]:
                bad.append(f"wall {dirn} has {w.fn.wall_monomial}, {[str(c) for c in w.fn.fn_coeffs]}")
            # x -> x f^(2k-1), y -> y f^(+-1) when crossed clockwise
            if w.clockwise_exponents(dirn) != (2 * k - 1, s):
                bad.append(f"wall {dirn} crosses with exponents {w.clockwise_exponents(dirn)}")
        k += 1
    vert = d.wall((0, -1))
    q = Monomial(AreaExponent(1, 0), 0, -2)
    if vert is None:
        bad.append("no vertical wall")
    else:
        K = sc._orders_below(C, nu.nu_A)
        want = [comb(j + 3, 3) for j in range(1, K + 1)]
        if vert.fn.wall_monomial != q or list(vert.fn.fn_coeffs) != want:
            bad.append(f"vertical wall {vert.fn.wall_monomial} {[str(c) for c in vert.fn.fn_coeffs]}")
        else:
            # counterclockwise crossing: x -> x (1 - T^A/y^2)^4
            t = WallTransform(q, vert.fn.fn_coeffs, -1, 0, nu)
            ix, iy = t.images(C)
            if ix != parse("x*(1-T^A/y^2)^4", C, nu) or iy != parse("y", C, nu):
                bad.append("vertical crossing is not x -> x(1-T^A/y^2)^4")
    expected = {(1, -1), (-1, -1)} | {(s, -(2 * j - 1)) for s in (1, -1) for j in range(1, k)} | {(0, -1)}
    for w in d.walls:
        if w.direction not in expected and (-w.direction[0], -w.direction[1]) not in expected:
            bad.append(f"unexpected wall {w.direction}")
    return bad


# 5
def check_scattering(cfg: Config):
    C = cfg.capped(10 * cfg.nu.nu_A)
    d = completed(cfg, C)
    X, Y = sc.path_ordered_product(d)
    ident = X == parse("x", C, cfg.nu) and Y == parse("y", C, cfg.nu)
    bad = diagram_mismatches(d)
    ok = ident and not bad
    detail = f"cutoff {C}, {len(d.walls)} walls" + ("" if ident else ", loop product is not the identity")
    return ok, detail + ("; " + "; ".join(bad) if bad else "")


# 6
def check_chambers(cfg: Config):
    C = cfg.capped(12 * cfg.nu.nu_A)
    d = completed(cfg, C)
    Ws = sc.chamber_superpotentials(d, [-2, -1, 0, 1, 2])
    bad = [k for k in (-2, -1, 0, 1, 2) if Ws[k] != parse(spot.FORMULAS[("F4", k)], C, cfg.nu)]
    return not bad, f"cutoff {C}" + (f"; mismatched chambers {bad}" if bad else "")


# 7
def check_limits(cfg: Config):
    nu = cfg.nu
    C = cfg.capped(8 * nu.nu_A)
    d = completed(cfg, C)
    Wp = sc.limit_superpotential(d, "+")
    Wm = sc.limit_superpotential(d, "-")
    W = spot.build(spot.SurfaceSpec("F4", "f4_series"), C, nu)
    y = parse("y", C, nu)
    bad = []
    if Wp != W.substitute(parse("x*(1-T^A/y^2)^{-2}", C, nu), y):
        bad.append("W+ != W(x(1-q)^-2, y)")
    if Wm != W.substitute(parse("x*(1-T^A/y^2)^2", C, nu), y):
        bad.append("W- != W(x(1-q)^2, y)")
    if Wp.substitute(parse("x*(1-T^A/y^2)^4", C, nu), y) != Wm:
        bad.append("W+(x(1-q)^4, y) != W-")
    if Wp != spot.build(spot.SurfaceSpec("F4", "plus_infinity"), C, nu):
        bad.append("W+ differs from the summed form")
    return not bad, f"cutoff {C}" + ("; " + "; ".join(bad) if bad else "")


def _f4_families(bound: int) -> set:
    base = [(0, 1, 0, 0), (0, -1, 0, 1), (1, -2, 0, 2), (-1, -2, 1, 0)]
    step = (0, -2, 1, 0)
    out = set()
    for b in base:
        for m in range(0, 2 * bound + 2):
            v = tuple(b[i] + m * step[i] for i in range(4))
            if max(abs(a) for a in v) <= bound:
                out.add(v)
    return out


ENUMERATION_FIXTURES = {
    "f3 index 2 right": (("f3", 2, "right"),
                         lambda n: {(1, 0, 0, 0), (0, 1, 0, 0), (0, -1, 0, 1), (-1, 3, 1, 0), (0, 2, 1, 0), (1, 1, 1, 0)}),
    "f3 index 0 wall": (("f3", 0, "wall"), lambda n: {(0, m, m, 0) for m in range(1, n + 1)}),
    "f4 index 0": (("f4", 0, None), lambda n: {(0, 2 * m, m, 0) for m in range(1, n // 2 + 1)}),
    "f4 index 2": (("f4", 2, None), _f4_families),
}


# 8
def check_enumeration(cfg: Config):
    bad = []
    for name, (key, expect) in ENUMERATION_FIXTURES.items():
        sys = hz.surface_system(*key)
        got8 = {c.coords for c in hz.enumerate_classes(sys, 8)}
        got16 = {c.coords for c in hz.enumerate_classes(sys, 16)}
        if got8 != expect(8):
            bad.append(f"{name}: bound 8 gives {len(got8)} classes")
        if {c for c in got16 if max(abs(a) for a in c) <= 8} != got8:
            bad.append(f"{name}: not stable from bound 8 to 16")
    return not bad, "; ".join(bad)


# 9
def check_intersection_table(cfg: Config):
    bad = []
    order = ("A0", "B0", "A_inf", "B_inf", "D_eps")
    for name, (coords, row, mu) in hz.INTERSECTION_TABLE.items():
        c = hz.DiscClass(coords, "F0_chart")
        got = tuple(hz.intersect(c, hz.DIVISOR_FUNCTIONALS[f]) for f in order)
        if got != row:
            bad.append(f"{name}: {got}")
        p1, p2 = hz.maslov_pairings(c)
        if not (p1 == p2 == mu):
            bad.append(f"{name}: Maslov {p1}, {p2}")
    return not bad, "; ".join(bad)


# 10
def check_obstruction(cfg: Config):
    a = hz.obstruction_degree(1, 1)
    b = hz.obstruction_degree(2, 2)
    a2 = hz.obstruction_degree_by_transition(1, 1)
    ok = a == 1 and b == (1, 1) and a2 == 1 and hz.h_dim(-2, 1) == 1
    return ok, f"F3 {a} (transition {a2}), F4 {b}"


# 11
def check_riemann_hurwitz(cfg: Config):
    ok = all(not hz.rh_feasible(2 * m, 2 * m) for m in range(1, 11))
    ok &= all(hz.rh_feasible(2 * m + 1, 2 * m) for m in range(0, 11))
    return ok, ""


CRITICAL_PARAMS = ((0.25, 2, 1), (0.1, 3, 1))


# 12
def check_critical_values(cfg: Config):
    tol = 1e-8
    bad, notes = [], []
    for T, a, b in CRITICAL_PARAMS:
        nu = ValuationMap(a, b)
        want = sorted(s * 2 * T ** (a / 2) + r * 2 * T ** (b / 2) for s in (1, -1) for r in (1, -1))
        sets = {}
        for spec in (spot.SurfaceSpec("F4", "f4_series"), spot.SurfaceSpec("F0")):
            got = spot.critical_values_numeric(spec, nu, T, tol)
            sets[spec.surface] = got
            if len(got) != 4 or any(abs(g - w) >= tol for g, w in zip(got, want)):
                bad.append(f"{spec.surface} at T={T}, nu=({a},{b}): {[round(g, 10) for g in got]}")
        if len(sets["F4"]) != len(sets["F0"]) or any(abs(u - v) >= tol for u, v in zip(sets["F4"], sets["F0"])):
            notes.append(f"T={T}: F4 and F0 value sets differ")
    return not bad and not notes, "; ".join(bad + notes)


# -- 13: kernel laws on random series ----------------------------------------

def random_series(rng: random.Random, nu: ValuationMap, C, max_terms: int = 4) -> NovikovSeries:
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        k = (rng.choice((0, 1, 2)) * 360360, rng.randint(0, 2) * 720720, rng.randint(-2, 2), rng.randint(-2, 2))
        terms[k] = mpq(rng.randint(-3, 3), rng.choice((1, 1, 2, 3)))
    return from_keys(terms, C, nu)


def random_unit(rng: random.Random, nu: ValuationMap, C, lead_one: bool = False) -> NovikovSeries:
    """c m (1 + h) with every term of h of positive valuation."""
    c = mpq(1) if lead_one else mpq(rng.choice((1, -1, 2, -2, 3)), rng.choice((1, 2)))
    m = (0, 0, 0, 0) if lead_one else (rng.choice((0, 1)) * 360360, 0, rng.randint(-2, 2), rng.randint(-2, 2))
    terms = {m: c}
    for _ in range(rng.randint(0, 3)):
        dA, dB = rng.choice(((1, 0), (0, 1), (1, 1), (2, 0)))
        k = (m[0] + dA * 360360, m[1] + dB * 720720, m[2] + rng.randint(-2, 2), m[3] + rng.randint(-2, 2))
        if k != m:
            terms[k] = terms.get(k, 0) + mpq(rng.randint(-3, 3))
    return from_keys(terms, C, nu)


def kernel_laws(n: int, seed: int = 0, nu: ValuationMap = DEFAULT_NU) -> dict:
    """Run every kernel law on n random cases; returns law -> number of failures."""
    rng = random.Random(seed)
    C = rat(6)
    C2 = rat(4)
    fails = {k: 0 for k in ("add", "mul", "distributive", "neutral", "invert", "pow", "substitute",
                            "truncation")}
    one, zero = const(1, C, nu), const(0, C, nu)
    for _ in range(n):
        a, b, c = (random_series(rng, nu, C) for _ in range(3))
        if not (a + b == b + a and (a + b) + c == a + (b + c)):
            fails["add"] += 1
        if not (a * b == b * a and (a * b) * c == a * (b * c)):
            fails["mul"] += 1
        if not a * (b + c) == a * b + a * c:
            fails["distributive"] += 1
        if not (a + zero == a and a * one == a):
            fails["neutral"] += 1
        u = random_unit(rng, nu, C)
        if not u * u.invert_unit() == one:
            fails["invert"] += 1
        v = u.min_valuation()
        e = rng.randint(0, 6 if v == 0 else min(6, int((C - 1) / v)))
        rep = one
        for _ in range(e):
            rep = rep * u
        if not (u.power(e) == rep and u.power(-e) == u.power(e).invert_unit()):
            fails["pow"] += 1
        ix = parse("x", C, nu) * random_unit(rng, nu, C, lead_one=True)
        iy = parse("y", C, nu) * random_unit(rng, nu, C, lead_one=True)
        sa, sb = a.substitute(ix, iy), b.substitute(ix, iy)
        if not ((a * b).substitute(ix, iy) == sa * sb and (a + b).substitute(ix, iy) == sa + sb):
            fails["substitute"] += 1
        at, bt = a.truncate(C2), b.truncate(C2)
        if not ((a * b).truncate(C2) == at * bt and (a + b).truncate(C2) == at + bt
                and u.invert_unit().truncate(C2) == u.truncate(C2).invert_unit()
                and a.substitute(ix, iy).truncate(C2) == at.substitute(ix.truncate(C2), iy.truncate(C2))):
            fails["truncation"] += 1
    return fails


def check_kernel(cfg: Config):
    fails = kernel_laws(cfg.property_cases, cfg.seed, cfg.nu)
    bad = {k: v for k, v in fails.items() if v}
    return not bad, f"{cfg.property_cases} cases per law" + (f"; failures {bad}" if bad else "")


CHECKS = [
    (1, "F3 wall function", "h(T^A/y) = 1 + T^A/y", check_f3_wall_function, 1),
    (2, "F3 glued chart", "uv = 1 + T^A w", check_f3_gluing, 1),
    (3, "F4 series vs closed form", "sum form = rational form; 2k+1 and k+1", check_f4_closed_form, 5),
    (4, "F2 to F4 wall crossing", "x' = x(1+T^{A/2}x/y)^-1, y' = y(1+T^{A/2}x/y)^-1", check_f4_to_f2, 1),
    (5, "scattering completion", "rays (1+q)^(2k-1), vertical x -> x(1-T^A/y^2)^4", check_scattering, 60),
    (6, "chamber superpotentials", "W_k for k = -2..2", check_chambers, 10),
    (7, "limit superpotentials", "W(+-inf) = W(x(1-T^A/y^2)^(-+2), y)", check_limits, 30),
    (8, "disc class enumeration", "six basic/extra classes, m(b2+s), m(2b2+s), F4 families", check_enumeration, 5),
    (9, "intersection table", "Table of intersections and Maslov indices", check_intersection_table, 1),
    (10, "obstruction degrees", "Ob = O(1) on P1; O(1,1) on P1 x P1", check_obstruction, 1),
    (11, "Riemann-Hurwitz", "chi' = d chi - R", check_riemann_hurwitz, 1),
    (12, "critical values", "+-2T^{A/2} +-2T^{B/2}", check_critical_values, 10),
    (13, "kernel laws", "ring, inverse, power, substitution, truncation", check_kernel, 30),
]


def run_check(i: int, cfg: Config | None = None) -> CheckResult:
    cfg = cfg or Config()
    cid, name, formula, fn, budget = CHECKS[i - 1]
    t0 = time.perf_counter()
    try:
        ok, detail = fn(cfg)
    except Exception as e:  # a crash is a failed check, reported with its cause
        ok, detail = False, f"{type(e).__name__}: {e}"
    return CheckResult(cid, name, formula, bool(ok), detail, time.perf_counter() - t0, budget)


def run_all(cfg: Config | None = None, only=None) -> list:
    cfg = cfg or Config()
    ids = only or [c[0] for c in CHECKS]
    return [run_check(i, cfg) for i in ids]
