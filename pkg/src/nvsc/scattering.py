"""Rank-two scattering diagrams with Novikov-series wall functions.

Walls are lines or rays through the origin of the (x, y) exponent plane.  A
ray with primitive direction d = (a, b) carries f = 1 + sum c_k q^k in a
monomial q whose exponent is a positive multiple of d.  Crossing the ray
clockwise (as seen with y pointing up) acts by

    x -> x f^(-b),   y -> y f^(a),

i.e. by the primitive normal e = (-b, a).  A full line is two rays, d and -d.

Chambers are counted from chamber 0, the sector containing the positive
y-axis: chamber k > 0 lies after crossing k rays clockwise, chamber -k after
crossing k rays counterclockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from gmpy2 import mpq

from .novikov import (
    DEFAULT_NU, AreaExponent, Monomial, NovikovError, NovikovSeries, ValuationMap,
    const, from_monomial, monomial, parse, rat, rat_str, val,
)
from .wallcross import WallTransform

__all__ = [
    "Wall", "Diagram", "NonTerminating", "CutoffTooLow", "NoStabilization",
    "initial_diagram", "path_ordered_product", "complete", "chamber_transform",
    "wall_cross", "chamber_superpotential", "chamber_superpotentials", "superpotential_f0", "limit_superpotential", "emit_figure",
    "binomial_factorization",
]


class NonTerminating(NovikovError):
    pass


class CutoffTooLow(NovikovError):
    pass


class NoStabilization(NovikovError):
    pass


def _prim(a: int, b: int) -> tuple[int, int]:
    g = math.gcd(a, b)
    return (a // g, b // g)


def angle_key(d) -> tuple:
    """Exact clockwise angle order starting from the positive y-axis."""
    a, b = d
    if a > 0:
        return (1, -Fraction(b, a))
    if a == 0:
        return (0, 0) if b > 0 else (2, 0)
    return (3, -Fraction(b, a))


@dataclass(frozen=True)
class Wall:
    direction: tuple
    is_full_line: bool
    fn: WallTransform
    note: str = ""

    def __post_init__(self):
        d = tuple(int(v) for v in self.direction)
        if math.gcd(*d) != 1:
            raise ValueError(f"direction {d} is not primitive")
        object.__setattr__(self, "direction", d)
        q = self.fn.wall_monomial
        k = _multiple(q, d)
        if k is None:
            raise ValueError(f"wall monomial {q} is not a positive multiple of {d}")
        if (self.fn.exp_x, self.fn.exp_y) != (-d[1], d[0]):
            raise ValueError("wall transform exponents must be the primitive normal (-b, a)")

    @property
    def grading(self) -> tuple:
        """T-exponent per unit of direction: distinguishes parallel walls."""
        q = self.fn.wall_monomial
        k = _multiple(q, self.direction)
        return (q.t.coeff_A / k, q.t.coeff_B / k)

    def halves(self) -> list:
        """(half-direction, sign) pairs; sign -1 means the transform is inverted."""
        d = self.direction
        out = [(d, 1)]
        if self.is_full_line:
            out.append(((-d[0], -d[1]), -1))
        return out

    def function(self, cutoff) -> NovikovSeries:
        return self.fn.function(cutoff)

    def clockwise_exponents(self, half) -> tuple[int, int]:
        return (-half[1], half[0])


def _multiple(q: Monomial, d) -> int | None:
    a, b = d
    if a:
        if q.xe % a or (q.ye * a != q.xe * b):
            return None
        k = q.xe // a
    else:
        if q.xe or q.ye % b:
            return None
        k = q.ye // b
    return k if k > 0 else None


@dataclass(frozen=True)
class Diagram:
    walls: tuple = ()
    cutoff: mpq = mpq(20)
    nu: ValuationMap = DEFAULT_NU
    notes: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "cutoff", rat(self.cutoff))
        ws = sorted(self.walls, key=lambda w: (angle_key(w.direction), w.grading))
        object.__setattr__(self, "walls", tuple(ws))

    def crossings(self) -> list:
        """Half-rays in clockwise order from chamber 0: (angle key, half, wall, sign)."""
        out = []
        for w in self.walls:
            for half, sign in w.halves():
                out.append((angle_key(half), half, w, sign))
        out.sort(key=lambda e: (e[0], e[2].grading))
        return out

    def wall(self, direction) -> Wall | None:
        for w in self.walls:
            if w.direction == tuple(direction):
                return w
        return None

    def right_crossings(self) -> list:
        return [c for c in self.crossings() if c[0][0] == 1]

    def left_crossings(self) -> list:
        return [c for c in reversed(self.crossings()) if c[0][0] == 3]


def initial_diagram(cutoff, nu: ValuationMap = DEFAULT_NU) -> Diagram:
    """The two lines with 1 + T^{A/2}/(xy) and 1 + T^{A/2} x/y."""
    half_A = AreaExponent(mpq(1, 2), 0)
    q1 = Monomial(half_A, -1, -1)
    q2 = Monomial(half_A, 1, -1)
    w1 = Wall((-1, -1), True, WallTransform(q1, (1,), 1, -1, nu), "initial")
    w2 = Wall((1, -1), True, WallTransform(q2, (1,), 1, 1, nu), "initial")
    return Diagram((w1, w2), cutoff, nu)


def _images_identity(C, nu):
    return monomial(1, xe=1, cutoff=C, nu=nu), monomial(1, ye=1, cutoff=C, nu=nu)


def _cross(X, Y, wall: Wall, e, sign, C):
    """Compose one crossing: X <- X f(q(X, Y))^(sign e_x), same for Y."""
    fn = wall.fn
    q = fn.wall_monomial
    nu = X.nu
    qk = from_monomial(q, 1, C, nu)
    w = qk.substitute(X, Y, cutoff=C)
    f = const(1, C, nu)
    wp = const(1, C, nu)
    for c in fn.fn_coeffs:
        wp = wp.mul(w, C)
        if wp.is_zero():
            break
        if c:
            f = f + wp.scale(c)
    ex, ey = sign * e[0], sign * e[1]
    if ex:
        X = X.mul(f.power(ex), C)
    if ey:
        Y = Y.mul(f.power(ey), C)
    return X, Y


def _compose(crossings, C, nu, inverse=False):
    X, Y = _images_identity(C, nu)
    for _, half, wall, _sign in crossings:
        e = wall.clockwise_exponents(half)
        X, Y = _cross(X, Y, wall, e, -1 if inverse else 1, C)
    return X, Y


def path_ordered_product(d: Diagram, orientation: str = "clockwise", cutoff=None):
    """Images of (x, y) after one loop around the origin starting in chamber 0."""
    C = d.cutoff if cutoff is None else rat(cutoff)
    cr = d.crossings()
    if orientation == "clockwise":
        return _compose(cr, C, d.nu)
    if orientation == "counterclockwise":
        return _compose(list(reversed(cr)), C, d.nu, inverse=True)
    raise ValueError("orientation must be clockwise or counterclockwise")


def _grow(coeffs: list, j: int, alpha, K: int) -> list:
    """(1 + sum coeffs) * (1 + alpha q^j), keeping orders up to K."""
    c = [mpq(1)] + list(coeffs) + [mpq(0)] * max(0, K - len(coeffs))
    out = list(c)
    for i in range(0, K + 1 - j):
        out[i + j] += alpha * c[i]
    out = out[1:K + 1]
    while out and not out[-1]:
        out.pop()
    return out


def _orders_below(C, vq) -> int:
    """Largest k with k * vq < C."""
    k = C / vq
    return int(k) - 1 if k.denominator == 1 else int(k)


def complete(initial: Diagram, cutoff=None) -> Diagram:
    """Insert rays order by order until the loop around the origin is trivial.

    Window by window in valuation (each window as wide as the smallest wall
    monomial), the loop product's discrepancy x'/x - 1, y'/y - 1 is read off;
    at each monomial z^m it must be a multiple of the primitive normal of m,
    and a ray in direction m with factor (1 + alpha z^m) cancels it.
    """
    C = initial.cutoff if cutoff is None else rat(cutoff)
    nu = initial.nu
    walls = {(w.direction, w.grading): w for w in initial.walls}
    if not walls:
        return Diagram((), C, nu)
    step = min(val(w.fn.wall_monomial, nu) for w in walls.values())
    v = step
    notes = []
    while v < C:
        top = min(C, v + step)
        d = Diagram(tuple(walls.values()), top, nu)
        X, Y = path_ordered_product(d, "clockwise", top)
        dx = X.shift((0, 0, -1, 0)) - 1
        dy = Y.shift((0, 0, 0, -1)) - 1
        found: dict = {}
        for series, idx in ((dx, 0), (dy, 1)):
            for vv, k, c in series.items_sorted():
                if vv < v:
                    raise NonTerminating(f"discrepancy below the current order at {Monomial.from_key(k)}")
                found.setdefault(k, [mpq(0), mpq(0)])[idx] = c
        for k in sorted(found, key=lambda k: Monomial.from_key(k).sort_key(nu)):
            dxm, dym = found[k]
            m = (k[2], k[3])
            if m == (0, 0):
                raise NonTerminating("discrepancy in a pure T-power")
            if m[0] * dxm + m[1] * dym != 0:
                raise NonTerminating(f"discrepancy at {Monomial.from_key(k)} is not tangent to its wall")
            dirn = _prim(*m)
            e = (-dirn[1], dirn[0])
            alpha = -(dxm * e[0] + dym * e[1]) / (e[0] ** 2 + e[1] ** 2)
            mono = Monomial.from_key(k)
            j0 = _multiple(mono, dirn)
            grading = (mono.t.coeff_A / j0, mono.t.coeff_B / j0)
            key = (dirn, grading)
            old = walls.get(key)
            if old is None:
                K = _orders_below(C, val(mono, nu))
                fn = WallTransform(mono, _grow([], 1, alpha, K), e[0], e[1], nu)
                walls[key] = Wall(dirn, False, fn, "scattered")
                if (dirn[1] > 0):
                    raise NonTerminating(f"ray {dirn} points into the upper half-plane")
                continue
            q = old.fn.wall_monomial
            jq = _multiple(q, dirn)
            if j0 % jq:
                raise NonTerminating(f"monomial {mono} is not a power of the wall monomial {q}")
            j = j0 // jq
            K = _orders_below(C, val(q, nu))
            w_new = Wall(old.direction, old.is_full_line,
                         WallTransform(q, _grow(list(old.fn.fn_coeffs), j, alpha, K), e[0], e[1], nu),
                         old.note)
            walls[key] = w_new
            if old.is_full_line:
                notes.append(f"direction {dirn} coincides with an initial line; functions merged")
        v = top
    final = Diagram(tuple(walls.values()), C, nu, tuple(dict.fromkeys(notes)))
    return final


# -- chambers ---------------------------------------------------------------

def _side(d: Diagram, k: int) -> list:
    cr = d.right_crossings() if k > 0 else d.left_crossings()
    if abs(k) > len(cr):
        raise CutoffTooLow(f"chamber {k} needs {abs(k)} walls on its side but only {len(cr)} lie below the cutoff")
    return cr[:abs(k)]


def _crossing_transform(entry, clockwise: bool) -> WallTransform:
    _, half, wall, sign = entry
    e = wall.clockwise_exponents(half)
    s = 1 if clockwise else -1
    return WallTransform(wall.fn.wall_monomial, wall.fn.fn_coeffs, s * e[0], s * e[1], wall.fn.nu)


def wall_cross(d: Diagram, k: int, cutoff=None):
    """The crossing from chamber k to chamber k+1, as images of x and y.

    For k >= 0 this is the (k+1)-th ray on the right side; for k < 0 it is
    the |k|-th ray on the left side, crossed clockwise on the way back.
    """
    C = d.cutoff if cutoff is None else rat(cutoff)
    entry = _side(d, k + 1)[-1] if k >= 0 else _side(d, k)[-1]
    return _crossing_transform(entry, True).images(C)


def chamber_transform(d: Diagram, k: int, cutoff=None):
    """(x_k, y_k) as series in the chamber-0 coordinates (x, y)."""
    C = d.cutoff if cutoff is None else rat(cutoff)
    X, Y = _images_identity(C, d.nu)
    if k == 0:
        return X, Y
    for entry in _side(d, k):
        _, half, wall, sign = entry
        e = wall.clockwise_exponents(half)
        s = 1 if k > 0 else -1
        X, Y = _cross(X, Y, wall, e, s, C)
    return X, Y


def superpotential_f0(cutoff, nu: ValuationMap = DEFAULT_NU) -> NovikovSeries:
    return parse("y + T^B/y + T^{A/2}*x + T^{A/2}/x", cutoff, nu)


def _step_superpotential(W: NovikovSeries, entry, forward_clockwise: bool) -> NovikovSeries:
    # Going forward across a ray, old coordinates are the inverse crossing of
    # the new ones; q is unchanged by the crossing.
    t = _crossing_transform(entry, not forward_clockwise)
    ix, iy = t.images(W.cutoff)
    return W.substitute(ix, iy)


def chamber_superpotentials(d: Diagram, ks, cutoff=None) -> dict:
    C = d.cutoff if cutoff is None else min(rat(cutoff), d.cutoff)
    W0 = superpotential_f0(C, d.nu)
    out = {0: W0}
    kmax = max([k for k in ks if k > 0], default=0)
    kmin = min([k for k in ks if k < 0], default=0)
    if kmax:
        W = W0
        for i, entry in enumerate(_side(d, kmax), 1):
            W = _step_superpotential(W, entry, True)
            out[i] = W
    if kmin:
        W = W0
        for i, entry in enumerate(_side(d, kmin), 1):
            W = _step_superpotential(W, entry, False)
            out[-i] = W
    return {k: out[k] for k in ks}


def chamber_superpotential(d: Diagram, k: int, cutoff=None) -> NovikovSeries:
    return chamber_superpotentials(d, [k], cutoff)[k]


def limit_superpotential(d: Diagram, sign: str, cutoff=None) -> NovikovSeries:
    """W_k for k -> +inf or -inf, once it no longer changes below the cutoff."""
    C = d.cutoff if cutoff is None else min(rat(cutoff), d.cutoff)
    if sign in ("+", "plus"):
        side, fwd = d.right_crossings(), True
    elif sign in ("-", "minus"):
        side, fwd = d.left_crossings(), False
    else:
        raise ValueError("sign must be + or -")
    vmin = min((val(w.fn.wall_monomial, d.nu) for w in d.walls), default=mpq(1))
    bound = int(C / vmin) + 4
    W = superpotential_f0(C, d.nu)
    for k, entry in enumerate(side):
        if k > bound:
            raise NoStabilization(f"no stabilization within {bound} chambers")
        Wn = _step_superpotential(W, entry, fwd)
        W = Wn
    # Beyond the last ray below the cutoff nothing changes any more.
    return W


# -- factorization and output -----------------------------------------------

def binomial_factorization(coeffs) -> tuple | None:
    """(a, n) with 1 + sum c_k q^k = (1 + a q)^n on the known orders, or None."""
    c = [mpq(v) for v in coeffs]
    if not c or not c[0]:
        return None
    if len(c) == 1:
        return (c[0], 1)
    r = 1 - 2 * c[1] / (c[0] * c[0])
    if not r:
        return None
    n = 1 / r
    if n.denominator != 1:
        return None
    n = int(n)
    a = c[0] / n
    coef = mpq(1)
    for i, ci in enumerate(c, 1):
        coef = coef * (n - i + 1) / i
        if coef * a ** i != ci:
            return None
    return (a, n)


def _wall_record(w: Wall, C) -> dict:
    rec = {"dir": list(w.direction), "line": w.is_full_line, "fn": w.function(C).to_dict()}
    rec["monomial"] = str(w.fn.wall_monomial)
    rec["exp"] = [w.fn.exp_x, w.fn.exp_y]
    fac = binomial_factorization(w.fn.fn_coeffs)
    if fac is not None:
        rec["factor"] = {"a": rat_str(fac[0]), "power": fac[1]}
    if w.note:
        rec["kind"] = w.note
    return rec


def emit_figure(d: Diagram, format: str = "json") -> str:  # noqa: A002
    C = d.cutoff
    if format == "json":
        import json
        doc = {"cutoff": rat_str(C), "nu": d.nu.to_dict(),
               "walls": [_wall_record(w, C) for w in d.walls],
               "notes": list(d.notes)}
        return json.dumps(doc, indent=1, sort_keys=False) + "\n"
    if format != "svg":
        raise ValueError("format must be svg or json")
    size, r = 640, 280
    cx = cy = size // 2
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}" font-family="monospace" font-size="10">',
           f'<line x1="0" y1="{cy}" x2="{size}" y2="{cy}" stroke="#ccc"/>',
           f'<line x1="{cx}" y1="0" x2="{cx}" y2="{size}" stroke="#ccc"/>']
    for i, w in enumerate(d.walls):
        a, b = w.direction
        n = math.hypot(a, b)
        ux, uy = a / n, b / n
        x2, y2 = cx + r * ux, cy - r * uy
        x1, y1 = (cx - r * ux, cy + r * uy) if w.is_full_line else (cx, cy)
        color = "#000" if w.is_full_line else "#c33"
        out.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" stroke="{color}"/>')
        slope = "inf" if a == 0 else str(Fraction(b, a))
        fac = binomial_factorization(w.fn.fn_coeffs)
        q = str(w.fn.wall_monomial)
        cap = f"(1+{q})" if fac == (1, 1) else (f"(1{'+' if fac[0] > 0 else '-'}{'' if abs(fac[0]) == 1 else rat_str(abs(fac[0]))}{q})^{fac[1]}" if fac else f"f({q})")
        lx, ly = cx + (r + 8) * ux, cy - (r + 8) * uy + (i % 3) * 10
        out.append(f'<text x="{lx:.2f}" y="{ly:.2f}" text-anchor="middle">slope {slope}: {_xml(cap)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _xml(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
