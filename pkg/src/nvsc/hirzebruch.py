"""Disc and sphere classes on F3, F4 and the F0 chart of deformed F4.

Classes are integer 4-vectors in a named basis:

* ``F3`` and ``F4``: (beta1, beta2, sigma, phi), sigma the negative section
  and phi the fiber;
* ``F0_chart``: (alpha0, beta0, A, B) on P1 x P1.

Sphere functionals are covectors giving intersection numbers.  A
constraint system asks for non-negative (or positive) intersections and a
fixed Maslov index, optionally refined by the rule for stable discs that may
contain copies of a rigid negative sphere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "BASES", "DiscClass", "SphereFunctional", "ConstraintSystem", "NegativeSphere",
    "BasisMismatch", "NotALineFamily",
    "intersect", "maslov", "maslov_pairings", "enumerate_classes", "enumeration_report",
    "rh_feasible", "h_dim", "obstruction_degree", "obstruction_degree_by_transition",
    "convert", "INTERSECTION_TABLE", "DIVISOR_FUNCTIONALS", "surface_system", "SURFACE_SYSTEMS",
]

BASES = {
    "F3": ("beta1", "beta2", "sigma", "phi"),
    "F4": ("beta1", "beta2", "sigma", "phi"),
    "F0_chart": ("alpha0", "beta0", "A", "B"),
}


class BasisMismatch(ValueError):
    pass


class NotALineFamily(ValueError):
    pass


@dataclass(frozen=True)
class DiscClass:
    coords: tuple
    basis_tag: str

    def __post_init__(self):
        if self.basis_tag not in BASES:
            raise ValueError(f"unknown basis {self.basis_tag!r}")
        c = tuple(int(v) for v in self.coords)
        if len(c) != 4:
            raise ValueError("classes have four coordinates")
        object.__setattr__(self, "coords", c)

    def _same(self, o: DiscClass):
        if o.basis_tag != self.basis_tag:
            raise BasisMismatch(f"{self.basis_tag} vs {o.basis_tag}")

    def __add__(self, o: DiscClass) -> DiscClass:
        self._same(o)
        return DiscClass(tuple(a + b for a, b in zip(self.coords, o.coords)), self.basis_tag)

    def __sub__(self, o: DiscClass) -> DiscClass:
        self._same(o)
        return DiscClass(tuple(a - b for a, b in zip(self.coords, o.coords)), self.basis_tag)

    def __mul__(self, k: int) -> DiscClass:
        return DiscClass(tuple(k * a for a in self.coords), self.basis_tag)

    __rmul__ = __mul__

    def __str__(self) -> str:
        parts = []
        for c, name in zip(self.coords, BASES[self.basis_tag]):
            if not c:
                continue
            s = name if abs(c) == 1 else f"{abs(c)}{name}"
            parts.append(("-" if c < 0 else "+") + s)
        out = "".join(parts) or "0"
        return out[1:] if out.startswith("+") else out

    def to_dict(self) -> dict:
        return {"basis": self.basis_tag, "coords": list(self.coords), "name": str(self)}


def cls(basis: str, *coords) -> DiscClass:
    return DiscClass(coords, basis)


@dataclass(frozen=True)
class SphereFunctional:
    name: str
    form: tuple
    basis_tag: str

    def __post_init__(self):
        object.__setattr__(self, "form", tuple(Fraction(v) for v in self.form))

    def __call__(self, c: DiscClass):
        return intersect(c, self)

    def to_dict(self) -> dict:
        return {"name": self.name, "basis": self.basis_tag, "form": [str(v) for v in self.form]}


def intersect(c: DiscClass, s: SphereFunctional):
    if c.basis_tag != s.basis_tag:
        raise BasisMismatch(f"class in {c.basis_tag}, functional in {s.basis_tag}")
    v = sum(a * b for a, b in zip(c.coords, s.form))
    return int(v) if v.denominator == 1 else v


# -- bases and Table 1 -------------------------------------------------------

# Rows of F4 classes written in the F0 chart: beta1, beta2, sigma, phi.
# sigma = A - 2B, phi = B and beta0 = B - beta2 come straight from the
# deformation; beta1 = alpha0 - 2 beta0 + 2B is the unique class with the
# intersections of beta1 (1 with B0, 0 with B_inf and D, 0 with A0, 2 with
# A_inf).
_F4_TO_F0 = np.array([
    [1, -2, 0, 2],
    [0, -1, 0, 1],
    [0, 0, 1, -2],
    [0, 0, 0, 1],
], dtype=np.int64)
_F0_TO_F4 = np.rint(np.linalg.inv(_F4_TO_F0)).astype(np.int64)


def convert(c: DiscClass, basis: str) -> DiscClass:
    """Rewrite a class between the F4 basis and the F0 chart."""
    if c.basis_tag == basis:
        return c
    v = np.array(c.coords, dtype=np.int64)
    if (c.basis_tag, basis) == ("F4", "F0_chart"):
        return DiscClass(tuple(int(a) for a in v @ _F4_TO_F0), basis)
    if (c.basis_tag, basis) == ("F0_chart", "F4"):
        return DiscClass(tuple(int(a) for a in v @ _F0_TO_F4), basis)
    raise BasisMismatch(f"no conversion from {c.basis_tag} to {basis}")


def pull_back(s: SphereFunctional, basis: str) -> SphereFunctional:
    """The same functional evaluated on classes of another basis."""
    if s.basis_tag == basis:
        return s
    rows = [convert(DiscClass(tuple(int(i == j) for j in range(4)), basis), s.basis_tag) for i in range(4)]
    return SphereFunctional(s.name, tuple(intersect(r, s) for r in rows), basis)


DIVISOR_FUNCTIONALS = {
    "A0": SphereFunctional("A0", (-2, 0, 0, 1), "F0_chart"),
    "B0": SphereFunctional("B0", (1, 0, 1, 0), "F0_chart"),
    "A_inf": SphereFunctional("A_inf", (0, 0, 0, 1), "F0_chart"),
    "B_inf": SphereFunctional("B_inf", (0, 0, 1, 0), "F0_chart"),
    "D_eps": SphereFunctional("D_eps", (0, 1, 2, 1), "F0_chart"),
}

# Intersection table: row class -> (A0, B0, A_inf, B_inf, D_eps, Maslov).
INTERSECTION_TABLE = {
    "alpha0": ((1, 0, 0, 0), (-2, 1, 0, 0, 0), -2),
    "beta0": ((0, 1, 0, 0), (0, 0, 0, 0, 1), 2),
    "A": ((0, 0, 1, 0), (0, 1, 0, 1, 2), 4),
    "B": ((0, 0, 0, 1), (1, 0, 1, 0, 1), 4),
}

_HALF_MASLOV = {
    "F3": (1, 1, -1, 2),
    "F4": (1, 1, -2, 2),
}


def maslov_pairings(c: DiscClass) -> tuple:
    """Maslov index of an F0-chart class from both anticanonical divisors."""
    if c.basis_tag != "F0_chart":
        raise BasisMismatch("the anticanonical pairings live on the F0 chart")
    f = DIVISOR_FUNCTIONALS
    first = 2 * (f["D_eps"](c) - f["B0"](c) + f["A_inf"](c) + f["B_inf"](c))
    second = 2 * (f["D_eps"](c) + Fraction(1, 2) * f["A0"](c) + Fraction(1, 2) * f["A_inf"](c))
    return first, second


def maslov(c: DiscClass) -> int:
    if c.basis_tag == "F0_chart":
        a, b = maslov_pairings(c)
        if a != b:
            raise ArithmeticError(f"anticanonical pairings disagree on {c}: {a} vs {b}")
        return int(a)
    return 2 * sum(a * b for a, b in zip(c.coords, _HALF_MASLOV[c.basis_tag]))


def half_maslov_functional(basis: str) -> SphereFunctional:
    if basis == "F0_chart":
        return SphereFunctional("mu/2", (-1, 1, 2, 2), basis)
    return SphereFunctional("mu/2", _HALF_MASLOV[basis], basis)


# -- constraint systems ------------------------------------------------------

@dataclass(frozen=True)
class NegativeSphere:
    """A rigid sphere of negative self-intersection that stable discs may contain.

    A class passes if for some k >= 0 copies of the sphere, the rest
    (class - k * sphere) still meets every listed divisor non-negatively and
    meets the sphere non-negatively when k = 0, positively when k > 0 (the
    disc part has to touch the sphere components to be connected).
    """

    name: str
    sphere: DiscClass
    meet: SphereFunctional


@dataclass(frozen=True)
class ConstraintSystem:
    name: str
    inequalities: tuple
    equality: tuple
    negative_spheres: tuple = ()
    description: str = ""

    def __post_init__(self):
        ineq = tuple((s, bool(strict)) for s, strict in self.inequalities)
        object.__setattr__(self, "inequalities", ineq)
        tags = {s.basis_tag for s, _ in ineq} | {self.equality[0].basis_tag}
        tags |= {n.meet.basis_tag for n in self.negative_spheres}
        if len(tags) != 1:
            raise BasisMismatch(f"system {self.name} mixes bases {sorted(tags)}")

    @property
    def basis_tag(self) -> str:
        return self.equality[0].basis_tag

    def raw(self) -> ConstraintSystem:
        return ConstraintSystem(self.name + " (raw)", self.inequalities, self.equality, (), self.description)

    def admits_raw(self, c: DiscClass) -> bool:
        for s, strict in self.inequalities:
            v = intersect(c, s)
            if v < 0 or (strict and v == 0):
                return False
        s, target = self.equality
        return intersect(c, s) == target

    def _residual_ok(self, r: DiscClass) -> bool:
        for s, strict in self.inequalities:
            v = intersect(r, s)
            if v < 0 or (strict and v == 0):
                return False
        return True

    def admits(self, c: DiscClass, max_copies: int = 64) -> bool:
        if not self.admits_raw(c):
            return False
        for ns in self.negative_spheres:
            ok = False
            for k in range(max_copies + 1):
                r = c - ns.sphere * k
                if not self._residual_ok(r):
                    if k > 0:
                        break
                    continue
                m = intersect(r, ns.meet)
                if (k == 0 and m >= 0) or (k > 0 and m > 0):
                    ok = True
                    break
            if not ok:
                return False
        return True

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "basis": self.basis_tag,
            "inequalities": [{**s.to_dict(), "strict": strict} for s, strict in self.inequalities],
            "equality": {**self.equality[0].to_dict(), "target": self.equality[1]},
            "negative_spheres": [{"name": n.name, "class": n.sphere.to_dict(), "meet": n.meet.to_dict()}
                                 for n in self.negative_spheres],
        }


def _grid_solutions(sys: ConstraintSystem, bound: int) -> np.ndarray:
    r = np.arange(-bound, bound + 1, dtype=np.int64)
    pts = np.stack(np.meshgrid(r, r, r, r, indexing="ij"), axis=-1).reshape(-1, 4)
    keep = np.ones(len(pts), dtype=bool)
    for s, strict in sys.inequalities:
        v = pts @ np.array([float(a) for a in s.form])
        keep &= (v > 0) if strict else (v >= 0)
    s, target = sys.equality
    keep &= np.isclose(pts @ np.array([float(a) for a in s.form]), target)
    keep &= np.any(pts != 0, axis=1)
    return pts[keep]


def _canonical(classes: list) -> list:
    return sorted(classes, key=lambda c: (sum(abs(a) for a in c.coords), c.coords))


def enumerate_classes(sys: ConstraintSystem, bound: int = 8) -> list:
    """Nonzero classes with coordinates in [-bound, bound] passing the system."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    out = []
    for p in _grid_solutions(sys, bound):
        c = DiscClass(tuple(int(a) for a in p), sys.basis_tag)
        if sys.admits(c):
            out.append(c)
    return _canonical(out)


def enumeration_report(sys: ConstraintSystem, bound: int = 8) -> dict:
    """Refined classes plus the flagged extras that only the raw inequalities allow."""
    refined = enumerate_classes(sys, bound)
    raw = enumerate_classes(sys.raw(), bound)
    keep = set(refined)
    extras = [c for c in raw if c not in keep]
    return {"system": sys.name, "bound": bound, "classes": refined, "raw_only": extras}


def _f(name, form, basis) -> SphereFunctional:
    return SphereFunctional(name, form, basis)


def _build_systems() -> dict:
    F3, F4, F0 = "F3", "F4", "F0_chart"
    f3 = {
        "F0": _f("F0", (1, 0, 1, 0), F3),
        "F_inf": _f("F_inf", (0, 0, 1, 0), F3),
        "S+3": _f("S+3", (0, 0, 0, 1), F3),
        "E_right": _f("E", (1, 1, -2, 1), F3),
        "E_left": _f("E", (0, 1, -2, 1), F3),
        "E_00": _f("E_00", (2, 1, -1, 1), F3),
        "E_infinf": _f("E_infinf", (0, 1, -1, 1), F3),
    }
    s3 = NegativeSphere("S-3", cls(F3, 0, 0, 1, 0), _f("S-3", (0, 1, -3, 1), F3))
    mu3 = half_maslov_functional(F3)
    f4 = {k: pull_back(v, F4) for k, v in DIVISOR_FUNCTIONALS.items()}
    f4_named = {
        "F0": _f("F0", (1, 0, 1, 0), F4),
        "F_inf": _f("F_inf", (0, 0, 1, 0), F4),
        "S+4": _f("S+4", (0, 0, 0, 1), F4),
        "E_inf": _f("E_inf", (0, 1, -2, 1), F4),
        "E_0": _f("E_0", (2, 1, -2, 1), F4),
        "E_F2": _f("E", (1, 1, -3, 1), F4),
    }
    s4 = NegativeSphere("S-4", cls(F4, 0, 0, 1, 0), _f("S-4", (0, 1, -4, 1), F4))
    mu4 = half_maslov_functional(F4)
    mu0 = half_maslov_functional(F0)
    t = DIVISOR_FUNCTIONALS
    systems = {
        ("f3", 0, "right"): ConstraintSystem(
            "F3 index 0, torus right of the wall fiber",
            [(f3["F0"], 0), (f3["F_inf"], 0), (f3["S+3"], 0), (f3["E_right"], 0)], (mu3, 0), (s3,)),
        ("f3", 0, "left"): ConstraintSystem(
            "F3 index 0, torus left of the wall fiber",
            [(f3["F0"], 0), (f3["F_inf"], 0), (f3["S+3"], 0), (f3["E_left"], 0)], (mu3, 0), (s3,)),
        ("f3", 0, "wall"): ConstraintSystem(
            "F3 index 0, torus meeting the wall fiber",
            [(f3["F0"], 0), (f3["F_inf"], 0), (f3["S+3"], 0), (f3["E_00"], 0), (f3["E_infinf"], 0)],
            (mu3, 0), (s3,)),
        ("f3", 2, "right"): ConstraintSystem(
            "F3 index 2, torus right of the wall fiber",
            [(f3["F0"], 0), (f3["F_inf"], 0), (f3["S+3"], 0), (f3["E_right"], 0)], (mu3, 1), (s3,)),
        ("f3", 2, "left"): ConstraintSystem(
            "F3 index 2, torus left of the wall fiber",
            [(f3["F0"], 0), (f3["F_inf"], 0), (f3["S+3"], 0), (f3["E_left"], 0)], (mu3, 1), (s3,)),
        ("f4", 0, None): ConstraintSystem(
            "F4 index 0",
            [(f4_named["F0"], 0), (f4_named["F_inf"], 0), (f4_named["S+4"], 0),
             (f4_named["E_inf"], 0), (f4_named["E_0"], 0)], (mu4, 0)),
        ("f4", 2, None): ConstraintSystem(
            "F4 index 2 on the F0 chart",
            [(t["A0"], 0), (t["B0"], 0), (t["A_inf"], 0), (t["B_inf"], 0), (t["D_eps"], 0)], (mu0, 1)),
        ("f4", 0, "to_f2"): ConstraintSystem(
            "F4 index 0 after the deformation to F2, smooth discs",
            [(f4_named["F0"], 0), (f4_named["F_inf"], 0), (f4_named["S+4"], 0), (f4_named["E_F2"], 0)],
            (mu4, 0), (s4,)),
        ("f4", 0, "to_f2_nodal"): ConstraintSystem(
            "F4 index 0 after the deformation to F2, disc part of a nodal disc",
            [(f4_named["F0"], 0), (f4_named["F_inf"], 0), (f4_named["S+4"], 0), (f4_named["E_F2"], 1)],
            (mu4, 0)),
    }
    return systems


SURFACE_SYSTEMS = _build_systems()


def surface_system(surface: str, index: int, side: str | None = None) -> ConstraintSystem:
    surface = surface.lower()
    if surface == "f4" and side in ("left", "right"):
        side = None
    key = (surface, int(index), side)
    if key not in SURFACE_SYSTEMS:
        raise KeyError(f"no constraint system for surface={surface} index={index} side={side}")
    return SURFACE_SYSTEMS[key]


# -- small algebraic geometry ------------------------------------------------

def rh_feasible(degree: int, forced_ramification: int) -> bool:
    """Can a degree-d branched cover of a disc by a disc carry this much ramification?

    For discs chi = 1, so Riemann-Hurwitz chi' = d chi - R forces R = d - 1.
    """
    if degree < 1 or forced_ramification < 0:
        raise ValueError("degree must be positive and ramification non-negative")
    return forced_ramification <= degree - 1


def h_dim(degree: int, i: int) -> int:
    """dim H^i(P1, O(degree))."""
    if i == 0:
        return max(degree + 1, 0)
    if i == 1:
        return max(-degree - 1, 0)
    raise ValueError("only H^0 and H^1 exist on P1")


def _family_coefficients(n: int, k: int):
    import sympy as sp
    a = sp.symbols(f"a0:{k}")
    b = sp.symbols(f"b0:{k}")
    Z, Wv = sp.symbols("Z W")
    # sections of O(n) vanishing at [a_i : b_i]: prod (b_i Z - a_i W) times O(n-k)
    poly = sp.Integer(1)
    for i in range(k):
        poly *= b[i] * Z - a[i] * Wv
    P = sp.Poly(sp.expand(poly), Z, Wv)
    coeffs = [P.coeff_monomial(Z ** j * Wv ** (n - j)) for j in range(n + 1)]
    return sp, a, b, coeffs


def _check_line(n: int, k: int):
    if n < 1:
        raise ValueError("n must be positive")
    h0 = n + 1 - k
    if h0 != 1:
        raise NotALineFamily(f"H^0(O({n})(-{k} points)) has dimension {max(h0, 0)}, not 1")


def obstruction_degree(n: int, marked_points: int):
    """Degree of Ob for the family z -> H^0(O(n)(-z_1 - ... - z_k)).

    The fiber is the line spanned by the coefficient vector of prod(z' - z_i)
    in the monomial basis of degree-n forms.  Its multidegree in each z_i is
    the degree of that map into P(H^0(O(n))); the line is the pullback of
    O(-1), so Ob (its dual) has the same multidegree with positive sign.
    Returns an int for one point, a tuple otherwise.
    """
    _check_line(n, marked_points)
    sp, a, b, coeffs = _family_coefficients(n, marked_points)
    degs = []
    for i in range(marked_points):
        ds = set()
        for c in coeffs:
            if c == 0:
                continue
            p = sp.Poly(c, a[i], b[i])
            td = {sum(m) for m in p.monoms()}
            if len(td) != 1:
                raise ArithmeticError("coefficient map is not homogeneous")
            ds |= td
        if len(ds) != 1:
            raise ArithmeticError("coefficients have different degrees")
        g = sp.gcd_list([c for c in coeffs if c != 0])
        if sp.Poly(g, a[i], b[i]).total_degree() != 0:
            raise ArithmeticError("coefficient map has base points")
        degs.append(ds.pop())
    dual = tuple(-d for d in degs)
    ob = tuple(-d for d in dual)
    return ob[0] if marked_points == 1 else ob


def obstruction_degree_by_transition(n: int, marked_points: int):
    """Same degree, from the transition function of the fiber line between the charts.

    Over z != inf take the frame s0(z) = coefficients with (a, b) = (z, 1);
    over z != 0 take s1(w) with (a, b) = (1, w), w = 1/z.  On the overlap
    s0 = g(z) s1 and deg(line) = -ord_z g, so deg Ob = ord_z g.
    """
    _check_line(n, marked_points)
    sp, a, b, coeffs = _family_coefficients(n, marked_points)
    z = sp.symbols("z")
    degs = []
    for i in range(marked_points):
        generic = {a[j]: sp.Integer(j + 2) for j in range(marked_points) if j != i}
        generic.update({b[j]: sp.Integer(2 * j + 3) for j in range(marked_points) if j != i})
        s0 = [sp.expand(c.subs(generic).subs({a[i]: z, b[i]: 1})) for c in coeffs]
        s1 = [sp.expand(c.subs(generic).subs({a[i]: 1, b[i]: 1 / z})) for c in coeffs]
        ratios = {sp.simplify(p / q) for p, q in zip(s0, s1) if q != 0}
        if len(ratios) != 1:
            raise ArithmeticError("frames are not proportional")
        g = ratios.pop()
        num, den = sp.fraction(sp.together(g))
        ordz = sp.degree(num, z) - sp.degree(den, z)
        if sp.Poly(num, z).terms_gcd()[0][0] != sp.degree(num, z) or sp.Poly(den, z).terms_gcd()[0][0] != sp.degree(den, z):
            raise ArithmeticError("transition function is not a monomial in z")
        degs.append(int(ordz))
    return degs[0] if marked_points == 1 else tuple(degs)
