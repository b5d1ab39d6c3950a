"""Wall-crossing automorphisms x -> x f^a, y -> y f^b with f = 1 + sum c_k q^k."""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .novikov import (
    DEFAULT_NU, Monomial, NovikovError, NovikovSeries, ValuationMap,
    const, from_keys, monomial, parse, rat, val,
)

__all__ = [
    "WallTransform", "Inconsistent", "Underdetermined",
    "apply", "solve_wall_function", "verify_gluing", "gluing_report",
]


class Inconsistent(NovikovError):
    """No wall function of the requested shape relates the two series."""


class Underdetermined(NovikovError):
    """Some order of the wall function is not fixed by the data."""


@dataclass(frozen=True)
class WallTransform:
    wall_monomial: Monomial
    fn_coeffs: tuple = ()
    exp_x: int = 0
    exp_y: int = 0
    nu: ValuationMap = field(default=DEFAULT_NU, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "fn_coeffs", tuple(rat(c) for c in self.fn_coeffs))
        if val(self.wall_monomial, self.nu) <= 0:
            raise ValueError("wall monomial must have positive valuation")

    def function(self, cutoff) -> NovikovSeries:
        """The wall function f = 1 + sum c_k q^k as a series."""
        q = self.wall_monomial
        terms = {(0, 0, 0, 0): 1}
        for k, c in enumerate(self.fn_coeffs, 1):
            if c:
                terms[(q ** k).key] = c
        return from_keys(terms, cutoff, self.nu)

    def images(self, cutoff) -> tuple[NovikovSeries, NovikovSeries]:
        f = self.function(cutoff)
        x = monomial(1, xe=1, cutoff=cutoff, nu=self.nu)
        y = monomial(1, ye=1, cutoff=cutoff, nu=self.nu)
        return x * f.power(self.exp_x), y * f.power(self.exp_y)

    def inverse_images(self, cutoff) -> tuple[NovikovSeries, NovikovSeries]:
        # q is invariant when its exponent is orthogonal to (exp_x, exp_y); the
        # inverse is then the same wall with negated exponents.
        f = self.function(cutoff)
        x = monomial(1, xe=1, cutoff=cutoff, nu=self.nu)
        y = monomial(1, ye=1, cutoff=cutoff, nu=self.nu)
        return x * f.power(-self.exp_x), y * f.power(-self.exp_y)

    def inverse(self) -> WallTransform:
        m = self.wall_monomial
        if m.xe * self.exp_x + m.ye * self.exp_y != 0:
            raise ValueError("only walls whose monomial is invariant have a same-shape inverse")
        return WallTransform(m, self.fn_coeffs, -self.exp_x, -self.exp_y, self.nu)


def apply(t: WallTransform, s: NovikovSeries) -> NovikovSeries:
    """s(x f^a, y f^b)."""
    ix, iy = t.images(s.cutoff)
    return s.substitute(ix, iy)


def _residual_window(W_src, W_dst, q, ex, ey, coeffs, cutoff):
    t = WallTransform(q, coeffs, ex, ey, W_dst.nu)
    return apply(t, W_dst).truncate(cutoff) - W_src.truncate(cutoff)


def solve_wall_function(W_src: NovikovSeries, W_dst: NovikovSeries, wall_monomial: Monomial,
                        exp_x: int, exp_y: int, max_order: int) -> list:
    """Find c_1..c_max_order with apply(x f^a, y f^b) W_dst = W_src.

    At order k the unknown c_k enters linearly through q^k times the terms
    of W_dst that the transform moves; every other contribution of c_k sits at
    strictly higher valuation.  The residual is compared on the window below
    where c_{k+1} could first contribute.
    """
    nu = W_dst.nu
    if W_src.nu != nu:
        raise ValueError("series use different valuation maps")
    C = min(W_src.cutoff, W_dst.cutoff)
    q = wall_monomial
    vq = val(q, nu)
    if vq <= 0:
        raise ValueError("wall monomial must have positive valuation")
    # L = sum over terms of n * term, n = a*exp_x + b*exp_y: the first-order
    # effect of f = 1 + q on W_dst.
    lin = from_keys({k: c * (k[2] * exp_x + k[3] * exp_y) for k, c in W_dst.term_map.items()}, C, nu)
    if lin.is_zero():
        if W_src == W_dst:
            raise Underdetermined("the transform does not move any term of the target series")
        raise Inconsistent("the transform cannot change the target series")
    v_lin = lin.min_valuation()
    coeffs: list = []
    for k in range(1, max_order + 1):
        lo = v_lin + k * vq
        hi = v_lin + (k + 1) * vq
        if lo >= C:
            raise Underdetermined(f"order {k} lies beyond the cutoff {C}")
        win = min(hi, C)
        R = _residual_window(W_src, W_dst, q, exp_x, exp_y, coeffs + [0], win)
        Lk = lin.shift((q ** k).key).truncate(win)
        # The earlier orders must already agree below lo.
        bad = [(m, c) for m, c in R.terms() if val(m, nu) < lo]
        if bad:
            raise Inconsistent(f"mismatch below order {k}: {bad[0][0]} has coefficient {bad[0][1]}")
        ck = None
        Lmap = Lk.term_map
        for key, c in R.term_map.items():
            lc = Lmap.get(key)
            if not lc:
                raise Inconsistent(f"order {k}: term {Monomial.from_key(key)} cannot be cancelled")
            cand = -c / lc
            if ck is None:
                ck = cand
            elif ck != cand:
                raise Inconsistent(f"order {k}: conflicting values {ck} and {cand}")
        coeffs.append(mpq(0) if ck is None else ck)
        if ck is not None and any(Lmap.get(key, 0) * ck + R.term_map.get(key, 0) for key in Lmap):
            raise Inconsistent(f"order {k}: the fitted coefficient leaves a residual")
    # Final check over the whole common range.
    t = WallTransform(q, coeffs, exp_x, exp_y, nu)
    top = min(C, v_lin + (max_order + 1) * vq)
    if apply(t, W_dst).truncate(top) != W_src.truncate(top):
        raise Inconsistent("fitted wall function does not reproduce the source series")
    return coeffs


F3_RIGHT = "x + y + T^{A+2B}/(x*y^3) + T^B/y + 2T^{A+B}/y^2 + T^A*x/y"
F3_LEFT = "x + y + T^{A+2B}/(x*y^3) + T^B/y + 2T^{A+B}/y^2 + T^{2A+2B}/(x*y^4)"


def gluing_report(cutoff, h: str = "1 + T^A/y", nu: ValuationMap = DEFAULT_NU) -> dict:
    """Check the glued chart uv = 1 + T^A w of the F3 mirror.

    With (x, y) = (1/v, 1/w) and (x', y') = (u, 1/w), the chart change is
    x' = x h, y' = y.  The check is that u v = x'/x equals 1 + T^A w, and
    that W_left(x', y') = W_right(x, y).
    """
    C = rat(cutoff)
    hs = parse(h, C, nu)
    x = parse("x", C, nu)
    y = parse("y", C, nu)
    xp = x * hs
    # u v = x' / x as a series in w = 1/y
    uv = xp * x.invert_unit()
    expected = parse("1 + T^A/y", C, nu)
    W_left = parse(F3_LEFT, C, nu)
    W_right = parse(F3_RIGHT, C, nu)
    pulled = W_left.substitute(xp, y)
    return {
        "uv_matches": uv == expected,
        "superpotentials_match": pulled == W_right,
        "uv": uv,
        "difference": pulled - W_right,
    }


def verify_gluing(cutoff, h: str = "1 + T^A/y", nu: ValuationMap = DEFAULT_NU) -> bool:
    r = gluing_report(cutoff, h, nu)
    return bool(r["uv_matches"] and r["superpotentials_match"])
