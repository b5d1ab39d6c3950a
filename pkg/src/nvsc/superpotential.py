"""Superpotential builders, closed-form checks and numeric critical values."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import comb

import numpy as np

from .novikov import (
    DEFAULT_NU, AreaExponent, Monomial, NovikovError, NovikovSeries, ValuationMap,
    _enc, _pos, from_keys, monomial, parse, rat, val,
)

__all__ = [
    "SurfaceSpec", "IllegalChamber", "NoClosedForm", "NoConvergence", "NonUnimodular",
    "FORMULAS", "build", "closed_form_equal", "series_identity",
    "critical_points_numeric", "critical_values_numeric", "critical_values_closed_form", "gradient_check",
    "monomial_change", "inverse_monomial_map", "UNSCALED_TO_SERIES",
]

log = logging.getLogger(__name__)


class IllegalChamber(NovikovError, ValueError):
    pass


class NoClosedForm(NovikovError, ValueError):
    pass


class NoConvergence(NovikovError, ArithmeticError):
    pass


class NonUnimodular(NovikovError, ValueError):
    pass


# Finite chart formulas, in the parser's syntax.
FORMULAS = {
    ("F0", "default"): "y + T^B/y + T^{A/2}*x + T^{A/2}/x",
    ("F2", "default"): "y + T^B/y + T^A/y + T^{A/2}*x + T^{A/2+B}/(x*y^2)",
    ("F3", "f3_right"): "x + y + T^{A+2B}/(x*y^3) + T^B/y + 2T^{A+B}/y^2 + T^A*x/y",
    ("F3", "f3_left"): "x + y + T^{A+2B}/(x*y^3) + T^B/y + 2T^{A+B}/y^2 + T^{2A+2B}/(x*y^4)",
    ("F4", "f4_alt"): "y + (1+T^{A-B})*(T^B/y + T^{A/2+B}*x/y^2) + T^{A/2+B}/(x*y^2)*(1+T^{A/2}*x/y)^3",
    ("F4", 1): "y + T^B/y + T^A/y + T^{A/2}*x + T^{A/2+B}/(x*y^2)",
    ("F4", -1): "y + T^B/y + T^A/y + T^{A/2}/x + T^{A/2+B}*x/y^2",
    ("F4", -2): "y + (1+T^{A-B})*(T^B/y + T^{A/2+B}/(x*y^2)) + T^{A/2+B}*x/y^2*(1+T^{A/2}/(x*y))^3",
}
FORMULAS[("F4", 0)] = FORMULAS[("F0", "default")]
FORMULAS[("F4", 2)] = FORMULAS[("F4", "f4_alt")]

CLOSED_FORMS = {
    "f4_series": "y + T^A/y + T^B*y*(y^2+T^A)/(y^2-T^A)^2 + T^{A/2+B}*y^2*(x+1/x)/(y^2-T^A)^2",
    "plus_infinity": "y + T^A/y + T^B*y*(y^2+T^A)/(y^2-T^A)^2 + T^{A/2+B}/(x*y^2)"
                     " + T^{A/2+B}*x/y^2*(1-T^A/y^2)^{-4}",
}

_CHAMBERS = {
    "F0": {"default"},
    "F2": {"default"},
    "F3": {"default", "f3_left", "f3_right"},
    "F4": {"default", "f4_series", "f4_unscaled", "f4_alt", "chamber_k", "plus_infinity", "minus_infinity"},
}
_ALIASES = {
    "series": "f4_series", "alt": "f4_alt", "unscaled": "f4_unscaled", "left": "f3_left", "right": "f3_right",
    "plus": "plus_infinity", "minus": "minus_infinity", "+inf": "plus_infinity", "-inf": "minus_infinity",
    "chamber": "chamber_k",
}


@dataclass(frozen=True)
class SurfaceSpec:
    surface: str
    chamber: str = "default"
    k: int | None = None

    def __post_init__(self):
        s = self.surface.upper()
        if s not in _CHAMBERS:
            raise IllegalChamber(f"unknown surface {self.surface!r}")
        ch = _ALIASES.get(self.chamber, self.chamber)
        if ch.startswith("chamber_") and ch != "chamber_k":
            try:
                k = int(ch[len("chamber_"):])
            except ValueError:
                raise IllegalChamber(f"bad chamber label {self.chamber!r}") from None
            object.__setattr__(self, "k", k)
            ch = "chamber_k"
        if ch not in _CHAMBERS[s]:
            raise IllegalChamber(f"chamber {self.chamber!r} is not defined for {s}")
        if ch == "chamber_k" and self.k is None:
            raise IllegalChamber("chamber_k needs an integer k")
        if ch != "chamber_k" and self.k is not None:
            raise IllegalChamber("k only applies to chamber_k")
        if ch == "default":
            ch = {"F3": "f3_right", "F4": "f4_series"}.get(s, ch)
        object.__setattr__(self, "surface", s)
        object.__setattr__(self, "chamber", ch)

    @property
    def label(self) -> str:
        return f"{self.surface}/{self.chamber}" + ("" if self.k is None else f"/{self.k}")


def _sum_terms(C, nu: ValuationMap, x_pm: bool = True, unscaled: bool = False) -> dict:
    """Terms of the series form, generated coefficient by coefficient."""
    terms = {}

    def put(tA, tB, xe, ye, c):
        if tA * nu.nu_A + tB * nu.nu_B < C:
            terms[(_enc(tA), _enc(tB), xe, ye)] = terms.get((_enc(tA), _enc(tB), xe, ye), 0) + c

    half = rat(1) / 2
    put(0, 0, 0, 1, 1)
    put(1, 0, 0, -1, 1)
    k = 0
    while k * nu.nu_A < C:
        put(k, 1, 0, -2 * k - 1, 2 * k + 1)
        if unscaled:
            put(k, 0, 1, -2 * k, k + 1)
            put(k + 1, 2, -1, -2 * k - 4, k + 1)
        else:
            put(half + k, 1, 1, -2 * k - 2, k + 1)
            put(half + k, 1, -1, -2 * k - 2, k + 1)
        k += 1
    return terms


def _plus_infinity_terms(C, nu: ValuationMap) -> dict:
    terms = {}
    half = rat(1) / 2

    def put(tA, tB, xe, ye, c):
        if tA * nu.nu_A + tB * nu.nu_B < C:
            terms[(_enc(tA), _enc(tB), xe, ye)] = c

    put(0, 0, 0, 1, 1)
    put(1, 0, 0, -1, 1)
    put(half, 1, -1, -2, 1)
    k = 0
    while k * nu.nu_A < C:
        put(k, 1, 0, -2 * k - 1, 2 * k + 1)
        put(half + k, 1, 1, -2 * k - 2, comb(k + 3, 3))
        k += 1
    return terms


def build(spec: SurfaceSpec, cutoff=None, nu: ValuationMap = DEFAULT_NU) -> NovikovSeries:
    C = _pos(cutoff, nu)
    s, ch = spec.surface, spec.chamber
    if s == "F4" and ch == "f4_series":
        return from_keys(_sum_terms(C, nu), C, nu)
    if s == "F4" and ch == "f4_unscaled":
        return from_keys(_sum_terms(C, nu, unscaled=True), C, nu)
    if s == "F4" and ch == "plus_infinity":
        return from_keys(_plus_infinity_terms(C, nu), C, nu)
    if s == "F4" and ch == "minus_infinity":
        W = from_keys(_sum_terms(C, nu), C, nu)
        return W.substitute(parse("x*(1-T^A/y^2)^2", C, nu), parse("y", C, nu))
    if s == "F4" and ch == "chamber_k":
        if (s, spec.k) in FORMULAS:
            return parse(FORMULAS[(s, spec.k)], C, nu)
        from . import scattering
        d = scattering.complete(scattering.initial_diagram(C, nu), C)
        return scattering.chamber_superpotential(d, spec.k)
    return parse(FORMULAS[(s, ch)], C, nu)


def closed_form_equal(spec: SurfaceSpec, cutoff=None, nu: ValuationMap = DEFAULT_NU) -> bool:
    """Compare the series built term by term with the expanded rational closed form."""
    if spec.surface != "F4" or spec.chamber not in CLOSED_FORMS:
        raise NoClosedForm(f"no closed form for {spec.label}")
    C = _pos(cutoff, nu)
    return build(spec, C, nu) == parse(CLOSED_FORMS[spec.chamber], C, nu)


def series_identity(name: str, cutoff=None, nu: ValuationMap = DEFAULT_NU) -> bool:
    """The two one-variable sums, q = T^A/y^2: odd numbers and tetrahedral numbers."""
    C = _pos(cutoff, nu)
    q = Monomial(AreaExponent(1, 0), 0, -2)
    vq = val(q, nu)
    if name == "odd":
        coef, closed = (lambda k: 2 * k + 1), "(1+T^A/y^2)/(1-T^A/y^2)^2"
    elif name == "binom":
        coef, closed = (lambda k: comb(k + 3, 3)), "(1-T^A/y^2)^{-4}"
    else:
        raise NoClosedForm(f"unknown identity {name!r}")
    terms = {}
    k = 0
    while k * vq < C:
        terms[(q ** k).key] = coef(k)
        k += 1
    return from_keys(terms, C, nu) == parse(closed, C, nu)


# -- monomial coordinate changes ---------------------------------------------

def _exp_matrix(a_x: Monomial, a_y: Monomial) -> tuple:
    return ((a_x.xe, a_x.ye), (a_y.xe, a_y.ye))


def monomial_change(W: NovikovSeries, a_x: Monomial, a_y: Monomial, cutoff=None) -> NovikovSeries:
    """W(a_x, a_y) for monomial images with unit coefficient."""
    (p, q), (r, s) = _exp_matrix(a_x, a_y)
    if p * s - q * r not in (1, -1):
        raise NonUnimodular(f"exponent matrix [[{p},{q}],[{r},{s}]] is not invertible over Z")
    C = W.cutoff
    ix = from_keys({a_x.key: 1}, C, W.nu)
    iy = from_keys({a_y.key: 1}, C, W.nu)
    return W.substitute(ix, iy, cutoff=cutoff)


def inverse_monomial_map(a_x: Monomial, a_y: Monomial) -> tuple[Monomial, Monomial]:
    (p, q), (r, s) = _exp_matrix(a_x, a_y)
    det = p * s - q * r
    if det not in (1, -1):
        raise NonUnimodular(f"exponent matrix [[{p},{q}],[{r},{s}]] is not invertible over Z")
    inv = ((s * det, -q * det), (-r * det, p * det))
    t = (a_x.t, a_y.t)
    out = []
    for u, v in inv:
        shift = t[0] * u + t[1] * v
        out.append(Monomial(-shift, u, v))
    return out[0], out[1]


# (x, y) -> (T^{A/2+B} x y^{-2}, y) carries the unscaled form to the series form.
UNSCALED_TO_SERIES = (Monomial(AreaExponent(rat(1) / 2, 1), 1, -2), Monomial(AreaExponent(), 0, 1))


# -- numeric critical points -------------------------------------------------

def _numeric(W: NovikovSeries, nu: ValuationMap, T_val: float):
    c, a, b = [], [], []
    for m, coef in W.terms():
        c.append(float(coef) * T_val ** float(val(m, nu)))
        a.append(m.xe)
        b.append(m.ye)
    return np.array(c), np.array(a, dtype=float), np.array(b, dtype=float)


def _eval(num, x, y):
    """Value, gradient and Hessian at arrays of points."""
    c, a, b = num
    x = np.asarray(x, dtype=float)[..., None]
    y = np.asarray(y, dtype=float)[..., None]
    mon = c * np.power(x, a) * np.power(y, b)
    x, y = x[..., 0], y[..., 0]
    w = mon.sum(-1)
    gx = (mon * a).sum(-1) / x
    gy = (mon * b).sum(-1) / y
    hxx = (mon * a * (a - 1)).sum(-1) / (x * x)
    hyy = (mon * b * (b - 1)).sum(-1) / (y * y)
    hxy = (mon * a * b).sum(-1) / (x * y)
    return w, (gx, gy), ((hxx, hxy), (hxy, hyy))


def _damped_newton(derivs, X, Y, tol: float, same_sign: bool, max_iter: int = 100):
    """Newton on the gradient for many starts at once, halving steps until |grad| drops.

    derivs(X, Y) returns ((gx, gy), ((hxx, hxy), (hyx, hyy))).  With
    same_sign, a step may not cross an axis (the real torus has four
    components and the poles sit on the axes).
    """
    def grad(X, Y):
        (gx, gy), _ = derivs(X, Y)
        gx, gy = np.broadcast_to(gx, X.shape), np.broadcast_to(gy, X.shape)
        return gx, gy, np.hypot(np.abs(gx), np.abs(gy))

    X, Y = X.copy(), Y.copy()
    with np.errstate(all="ignore"):
        gx, gy, n = (v.copy() for v in grad(X, Y))
        live = np.isfinite(n) & (n > tol)
        for _ in range(max_iter):
            idx = np.flatnonzero(live)
            if not len(idx):
                break
            x, y, gxi, gyi, ni = X[idx], Y[idx], gx[idx], gy[idx], n[idx]
            _, ((hxx, hxy), (_, hyy)) = derivs(x, y)
            det = hxx * hyy - hxy * hxy
            sx = (hyy * gxi - hxy * gyi) / det
            sy = (hxx * gyi - hxy * gxi) / det
            lam = np.ones(len(idx))
            pending = np.ones(len(idx), dtype=bool)
            for _ in range(40):
                p = np.flatnonzero(pending)
                if not len(p):
                    break
                xn, yn = x[p] - lam[p] * sx[p], y[p] - lam[p] * sy[p]
                gxn, gyn, nn = grad(xn, yn)
                ok = np.isfinite(nn) & (nn < ni[p]) & (np.abs(xn) > 1e-12) & (np.abs(yn) > 1e-12)
                if same_sign:
                    ok &= (np.sign(xn) == np.sign(x[p])) & (np.sign(yn) == np.sign(y[p]))
                acc = idx[p[ok]]
                X[acc], Y[acc] = xn[ok], yn[ok]
                gx[acc], gy[acc], n[acc] = gxn[ok], gyn[ok], nn[ok]
                pending[p[ok]] = False
                lam[p[~ok]] /= 2
            # starts whose step could not be damped into a decrease are finished
            live[idx[pending]] = False
            live &= np.isfinite(n) & (n > tol)
    return X, Y, n


def _grid(nu: ValuationMap, T_val: float) -> list:
    nb = float(nu.nu_B)
    mags = [T_val ** (f * nb) for f in (0, 0.25, 0.5, 0.75, 1, 1.25, 1.5)]
    axis = [s * m for m in mags for s in (1, -1)]
    return [(x, y) for x in axis for y in axis]


def critical_points_numeric(spec: SurfaceSpec, nu: ValuationMap = DEFAULT_NU, T_val: float = 0.25,
                            tol: float = 1e-8, cutoff=None) -> dict:
    """Damped Newton from a fixed grid, with the dropped tail checked at each point.

    A critical point of the truncated series is kept only if the series
    built at twice the cutoff agrees with it there to within tol, both in
    value and gradient; points where truncation dominates are reported as
    rejected rather than returned.
    """
    if not 0 < T_val < 1:
        raise ValueError("T must lie in (0, 1)")
    if not tol > 0:
        raise ValueError("tol must be positive")
    C = _pos(cutoff if cutoff is not None else 48 * nu.nu_B, nu)
    W = build(spec, C, nu)
    W2 = build(spec, 2 * C, nu)
    num, num2 = _numeric(W, nu, T_val), _numeric(W2, nu, T_val)
    newton_tol = min(tol, 1e-10) if np.isfinite(tol) else 1e-10
    found, failed, rejected = [], 0, []
    starts = np.array(_grid(nu, T_val))
    X, Y, res = _damped_newton(lambda X, Y: _eval(num, X, Y)[1:], starts[:, 0], starts[:, 1],
                               newton_tol, same_sign=True)
    w, (gx, gy), _ = _eval(num, X, Y)
    w2, (gx2, gy2), _ = _eval(num2, X, Y)
    for i in range(len(starts)):
        if not (np.isfinite(res[i]) and res[i] <= newton_tol):
            failed += 1
            continue
        tail = max(abs(w2[i] - w[i]), float(np.hypot(gx2[i] - gx[i], gy2[i] - gy[i])))
        rec = {"x": float(X[i]), "y": float(Y[i]), "value": float(w[i]),
               "residual": float(res[i]), "tail": tail}
        if np.isfinite(tol) and tail >= tol:
            rejected.append(rec)
        else:
            found.append(rec)
    if not found:
        raise NoConvergence(f"no grid start converged to a verified critical point ({failed} failed)")
    values: list = []
    dedupe = 10 * tol if np.isfinite(tol) else 0.0
    for rec in sorted(found, key=lambda r: r["value"]):
        if not values or abs(rec["value"] - values[-1]) >= dedupe:
            values.append(rec["value"])
    flags = []
    if len(values) < 4:
        flags.append(f"only {len(values)} distinct critical values found")
        log.warning("%s: %s", spec.label, flags[-1])
    return {"spec": spec.label, "T": T_val, "nu": nu.to_dict(), "cutoff": str(C), "tol": tol,
            "values": values, "points": found, "failed_starts": failed,
            "rejected": rejected, "flags": flags}


def critical_values_numeric(spec: SurfaceSpec, nu: ValuationMap = DEFAULT_NU, T_val: float = 0.25,
                            tol: float = 1e-8, cutoff=None) -> list:
    return critical_points_numeric(spec, nu, T_val, tol, cutoff)["values"]


def gradient_check(spec: SurfaceSpec, point, nu: ValuationMap = DEFAULT_NU, T_val: float = 0.25,
                   cutoff=None, h: float = 1e-6) -> float:
    """Largest relative gap between central differences and the exact partials."""
    C = _pos(cutoff if cutoff is not None else 48 * nu.nu_B, nu)
    num = _numeric(build(spec, C, nu), nu, T_val)
    x, y = point
    _, g, H = _eval(num, x, y)
    g, H = np.array(g, dtype=float), np.array(H, dtype=float)
    worst = 0.0
    for i in range(2):
        e = np.zeros(2)
        e[i] = h * max(1.0, abs(point[i]))
        gp = np.array(_eval(num, *(np.array(point) + e))[1], dtype=float)
        gm = np.array(_eval(num, *(np.array(point) - e))[1], dtype=float)
        fd = (gp - gm) / (2 * e[i])
        scale = max(float(np.abs(H[:, i]).max()), 1e-300)
        worst = max(worst, float(np.abs(fd - H[:, i]).max()) / scale)
        wp = _eval(num, *(np.array(point) + e))[0]
        wm = _eval(num, *(np.array(point) - e))[0]
        worst = max(worst, abs((wp - wm) / (2 * e[i]) - g[i]) / max(abs(g[i]), 1.0))
    return worst


def critical_values_closed_form(nu: ValuationMap = DEFAULT_NU, T_val: float = 0.25,
                                tol: float = 1e-8) -> list:
    """Critical values of the rational closed form, over the complex numbers.

    This evaluates the closed form directly, so it also reaches critical
    points where the series in T^A/y^2 does not converge (|T^A/y^2| >= 1).
    Only values that come out real are returned.
    """
    import sympy as sp
    x, y = sp.symbols("x y")
    a = T_val ** float(nu.nu_A)
    b = T_val ** float(nu.nu_B)
    c = T_val ** float(nu.nu_A / 2 + nu.nu_B)
    W = y + a / y + b * y * (y**2 + a) / (y**2 - a) ** 2 + c * y**2 * (x + 1 / x) / (y**2 - a) ** 2
    grad = [sp.diff(W, v) for v in (x, y)]
    hess = [[sp.diff(g, v) for v in (x, y)] for g in grad]
    fW = sp.lambdify((x, y), W, "numpy")
    fg = sp.lambdify((x, y), grad, "numpy")
    fh = sp.lambdify((x, y), hess, "numpy")
    nb = float(nu.nu_B)
    mags = [T_val ** (f * nb) for f in (0, 0.25, 0.5, 0.75, 1, 1.25, 1.5)]
    axis = np.array([m * ph for m in mags for ph in (1, 1j, -1, -1j)])
    X, Y = (v.ravel().astype(complex) for v in np.meshgrid(axis, axis))
    X, Y, n = _damped_newton(lambda X, Y: (fg(X, Y), fh(X, Y)), X, Y, tol * 1e-2, same_sign=False)
    with np.errstate(all="ignore"):
        w = np.broadcast_to(fW(X, Y), X.shape)
    keep = np.isfinite(n) & (n < tol) & (np.abs(Y * Y - a) > 1e-6) & (np.abs(w.imag) < tol)
    vals = sorted(float(v) for v in w.real[keep])
    out = []
    for v in vals:
        if not out or abs(v - out[-1]) >= 10 * tol:
            out.append(v)
    return out
