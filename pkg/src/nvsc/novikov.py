"""Truncated Laurent series in x, y over the Novikov field.

A term is ``c * T^(a*A + b*B) * x^i * y^j`` with rational ``c, a, b`` and
integer ``i, j``.  The symbols A and B are symplectic areas; a
:class:`ValuationMap` turns them into positive numbers so that terms can be
ordered and truncated.  A series stores every term of valuation below its
cutoff and nothing else.

Coefficients and T-exponents are exact rationals (``gmpy2.mpq``).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from gmpy2 import mpq

__all__ = [
    "AreaExponent", "ValuationMap", "Monomial", "NovikovSeries",
    "NovikovError", "NotAUnit", "NonNilpotentRemainder", "UnsupportedSubstitution",
    "DEFAULT_NU", "DEFAULT_CUTOFF_UNITS", "default_cutoff", "rat", "rat_str",
    "val", "add", "mul", "invert_unit", "pow", "substitute", "eq_up_to_cutoff",
    "const", "monomial", "from_monomial", "from_keys", "parse",
]


class NovikovError(Exception):
    pass


class NotAUnit(NovikovError, ArithmeticError):
    """The series has no single lowest-valuation monomial (or is zero)."""


class NonNilpotentRemainder(NotAUnit):
    """Dividing by the lowest monomial leaves a valuation-0 remainder."""


class UnsupportedSubstitution(NovikovError, ValueError):
    pass


def rat(v) -> mpq:
    """Coerce ints, strings like ``"3/4"``, Fractions and mpq to mpq."""
    if isinstance(v, str):
        v = v.strip()
        if not re.fullmatch(r"[+-]?\d+(/\d+)?", v):
            raise ValueError(f"not a rational: {v!r}")
    if isinstance(v, float):
        return mpq(Fraction(v).limit_denominator(10**12))
    return mpq(v)


def rat_str(q) -> str:
    return str(mpq(q))


ZERO = mpq(0)
ONE = mpq(1)

# Inside series, T-exponents are stored as integers in units of 1/_DEN so that
# term keys are tuples of ints (cheap to hash).  Any exponent whose
# denominator divides _DEN (every denominator up to 16) is representable.
_DEN = 720720


def _enc(q) -> int:
    n = rat(q) * _DEN
    if n.denominator != 1:
        raise ValueError(f"T-exponent {q} has an unsupported denominator (must divide {_DEN})")
    return int(n)


def _dec(i) -> mpq:
    return mpq(int(i), _DEN)


@dataclass(frozen=True)
class AreaExponent:
    coeff_A: mpq = ZERO
    coeff_B: mpq = ZERO

    def __post_init__(self):
        object.__setattr__(self, "coeff_A", rat(self.coeff_A))
        object.__setattr__(self, "coeff_B", rat(self.coeff_B))

    def __add__(self, o: AreaExponent) -> AreaExponent:
        return AreaExponent(self.coeff_A + o.coeff_A, self.coeff_B + o.coeff_B)

    def __sub__(self, o: AreaExponent) -> AreaExponent:
        return AreaExponent(self.coeff_A - o.coeff_A, self.coeff_B - o.coeff_B)

    def __neg__(self) -> AreaExponent:
        return AreaExponent(-self.coeff_A, -self.coeff_B)

    def __mul__(self, k) -> AreaExponent:
        k = rat(k)
        return AreaExponent(self.coeff_A * k, self.coeff_B * k)

    __rmul__ = __mul__

    def __str__(self) -> str:
        return _texp_str(self.coeff_A, self.coeff_B)


@dataclass(frozen=True)
class ValuationMap:
    nu_A: mpq = mpq(2)
    nu_B: mpq = ONE

    def __post_init__(self):
        a, b = rat(self.nu_A), rat(self.nu_B)
        if not (a > 0 and b > 0):
            raise ValueError("valuations of A and B must be positive")
        if not a > b:
            raise ValueError("the valuation of A must exceed that of B")
        object.__setattr__(self, "nu_A", a)
        object.__setattr__(self, "nu_B", b)
        object.__setattr__(self, "_sa", a / _DEN)
        object.__setattr__(self, "_sb", b / _DEN)

    def __call__(self, t: AreaExponent) -> mpq:
        return t.coeff_A * self.nu_A + t.coeff_B * self.nu_B

    def to_dict(self) -> dict:
        return {"A": rat_str(self.nu_A), "B": rat_str(self.nu_B)}


DEFAULT_NU = ValuationMap()
DEFAULT_CUTOFF_UNITS = 20


def default_cutoff(nu: ValuationMap = DEFAULT_NU) -> mpq:
    return DEFAULT_CUTOFF_UNITS * nu.nu_B


@dataclass(frozen=True)
class Monomial:
    t: AreaExponent = AreaExponent()
    xe: int = 0
    ye: int = 0

    @property
    def key(self) -> tuple:
        """Internal integer key (scaled T-exponents, xe, ye)."""
        return (_enc(self.t.coeff_A), _enc(self.t.coeff_B), int(self.xe), int(self.ye))

    @classmethod
    def from_key(cls, k) -> Monomial:
        return cls(AreaExponent(_dec(k[0]), _dec(k[1])), int(k[2]), int(k[3]))

    def sort_key(self, nu: ValuationMap = DEFAULT_NU) -> tuple:
        t = self.t
        return (val(self, nu), t.coeff_A, t.coeff_B, int(self.xe), int(self.ye))

    def __mul__(self, o: Monomial) -> Monomial:
        return Monomial(self.t + o.t, self.xe + o.xe, self.ye + o.ye)

    def __pow__(self, n: int) -> Monomial:
        return Monomial(self.t * n, self.xe * n, self.ye * n)

    def __str__(self) -> str:
        return _mono_str(self.key) or "1"


def val(m, nu: ValuationMap = DEFAULT_NU) -> mpq:
    """Valuation of a Monomial or AreaExponent."""
    t = m.t if isinstance(m, Monomial) else m
    return nu(t)


# Series internals: a term key is (tA, tB, xe, ye), all ints, T-exponents
# scaled by _DEN.  Canonical order sorts by valuation then by the key, which
# agrees with lexicographic order on the unscaled rationals.

def _kval(k, nu: ValuationMap) -> mpq:
    return k[0] * nu._sa + k[1] * nu._sb


class NovikovSeries:
    """Immutable truncated series; construct through the helpers below."""

    __slots__ = ("_terms", "cutoff", "nu", "_items")

    def __init__(self, terms: Mapping | Iterable = (), cutoff=None, nu: ValuationMap = DEFAULT_NU):
        cutoff = default_cutoff(nu) if cutoff is None else rat(cutoff)
        if cutoff <= 0:
            raise ValueError("cutoff must be positive")
        out = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for m, c in items:
            k = m.key if isinstance(m, Monomial) else (_enc(m[0]), _enc(m[1]), int(m[2]), int(m[3]))
            c = rat(c)
            if c and _kval(k, nu) < cutoff:
                out[k] = out.get(k, ZERO) + c
        self._init({k: c for k, c in out.items() if c}, cutoff, nu)

    def _init(self, terms, cutoff, nu):
        self._terms = terms
        self.cutoff = cutoff
        self.nu = nu
        self._items = None

    @classmethod
    def _raw(cls, terms: dict, cutoff, nu) -> NovikovSeries:
        """Trusted constructor: terms already pruned of zeros and of val >= cutoff."""
        s = cls.__new__(cls)
        s._init(terms, cutoff, nu)
        return s

    # -- inspection ---------------------------------------------------------

    def items_sorted(self) -> list:
        """List of (valuation, key, coeff) in canonical order."""
        if self._items is None:
            nu = self.nu
            self._items = sorted(((_kval(k, nu), k, c) for k, c in self._terms.items()),
                                 key=lambda e: (e[0],) + e[1])
        return self._items

    def terms(self) -> Iterator[tuple[Monomial, mpq]]:
        for _, k, c in self.items_sorted():
            yield Monomial.from_key(k), c

    @property
    def term_map(self) -> dict:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coeff(self, t=AreaExponent(), xe: int = 0, ye: int = 0) -> mpq:
        if isinstance(t, Monomial):
            k = t.key
        else:
            k = (_enc(t.coeff_A), _enc(t.coeff_B), int(xe), int(ye))
        return self._terms.get(k, ZERO)

    def min_valuation(self):
        it = self.items_sorted()
        return it[0][0] if it else None

    def _vmin0(self) -> mpq:
        it = self.items_sorted()
        return min(it[0][0], ZERO) if it else ZERO

    def _check(self, o: NovikovSeries):
        if self.nu != o.nu:
            raise ValueError("series use different valuation maps")

    # -- arithmetic ---------------------------------------------------------

    def truncate(self, C) -> NovikovSeries:
        C = rat(C)
        if C >= self.cutoff:
            return self
        nu = self.nu
        return NovikovSeries._raw({k: c for k, c in self._terms.items() if _kval(k, nu) < C}, C, self.nu)

    def with_cutoff(self, C) -> NovikovSeries:
        """Same terms under a new cutoff; for exactly known (finite) series."""
        C = rat(C)
        nu = self.nu
        return NovikovSeries._raw({k: c for k, c in self._terms.items() if _kval(k, nu) < C}, C, nu)

    def __add__(self, o) -> NovikovSeries:
        if not isinstance(o, NovikovSeries):
            o = const(o, self.cutoff, self.nu)
        self._check(o)
        C = min(self.cutoff, o.cutoff)
        a, b = self.truncate(C), o.truncate(C)
        out = dict(a._terms)
        for k, c in b._terms.items():
            v = out.get(k, ZERO) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return NovikovSeries._raw(out, C, self.nu)

    __radd__ = __add__

    def __neg__(self) -> NovikovSeries:
        return NovikovSeries._raw({k: -c for k, c in self._terms.items()}, self.cutoff, self.nu)

    def __sub__(self, o) -> NovikovSeries:
        if not isinstance(o, NovikovSeries):
            o = const(o, self.cutoff, self.nu)
        return self + (-o)

    def __rsub__(self, o) -> NovikovSeries:
        return (-self) + o

    def scale(self, c) -> NovikovSeries:
        c = rat(c)
        if not c:
            return NovikovSeries._raw({}, self.cutoff, self.nu)
        return NovikovSeries._raw({k: c * v for k, v in self._terms.items()}, self.cutoff, self.nu)

    def shift(self, k) -> NovikovSeries:
        """Multiply by the monomial with key ``k``."""
        if isinstance(k, Monomial):
            k = k.key
        nu = self.nu
        v = _kval(k, nu)
        C = self.cutoff + min(v, ZERO)
        out = {}
        for (a, b, i, j), c in self._terms.items():
            nk = (a + k[0], b + k[1], i + k[2], j + k[3])
            if _kval(nk, nu) < C:
                out[nk] = c
        return NovikovSeries._raw(out, C, nu)

    def mul(self, o: NovikovSeries, cutoff=None) -> NovikovSeries:
        self._check(o)
        C = min(self.cutoff + o._vmin0(), o.cutoff + self._vmin0())
        if cutoff is not None:
            C = min(C, rat(cutoff))
        out: dict = {}
        get = out.get
        B = o.items_sorted()
        for va, (a1, a2, a3, a4), ca in self.items_sorted():
            lim = C - va
            for vb, (b1, b2, b3, b4), cb in B:
                if vb >= lim:
                    break
                k = (a1 + b1, a2 + b2, a3 + b3, a4 + b4)
                out[k] = get(k, ZERO) + ca * cb
        return NovikovSeries._raw({k: c for k, c in out.items() if c}, C, self.nu)

    def __mul__(self, o) -> NovikovSeries:
        if isinstance(o, NovikovSeries):
            return self.mul(o)
        return self.scale(o)

    def __rmul__(self, o) -> NovikovSeries:
        return self.scale(o)

    def __truediv__(self, o) -> NovikovSeries:
        if isinstance(o, NovikovSeries):
            return self.mul(o.invert_unit())
        return self.scale(ONE / rat(o))

    def unit_split(self):
        """Write self = c * m * (1 + h); return (c, key of m, h)."""
        it = self.items_sorted()
        if not it:
            raise NotAUnit("zero series is not invertible")
        v0, k0, c0 = it[0]
        if len(it) > 1 and it[1][0] == v0:
            raise NonNilpotentRemainder(
                "lowest-valuation part has several monomials: " + _mono_str(k0) + ", " + _mono_str(it[1][1]))
        inv = ONE / c0
        C = self.cutoff - v0
        h = {}
        for _, k, c in it[1:]:
            h[(k[0] - k0[0], k[1] - k0[1], k[2] - k0[2], k[3] - k0[3])] = c * inv
        return c0, k0, NovikovSeries._raw(h, C, self.nu)

    def is_unit(self) -> bool:
        try:
            self.unit_split()
        except NotAUnit:
            return False
        return True

    def invert_unit(self) -> NovikovSeries:
        return self.power(-1)

    def power(self, n: int) -> NovikovSeries:
        n = int(n)
        if n == 0:
            return const(1, self.cutoff, self.nu)
        if n == 1:
            return self
        try:
            c0, k0, h = self.unit_split()
        except NotAUnit:
            if n < 0:
                raise
            return self._square_power(n)
        v0 = _kval(k0, self.nu)
        C = self.cutoff + min(ZERO, (n - 1) * v0)
        lead = (k0[0] * n, k0[1] * n, k0[2] * n, k0[3] * n)
        rel = C - _kval(lead, self.nu)
        if rel <= 0:
            return NovikovSeries(cutoff=C, nu=self.nu)
        body = _binomial(h, n, rel)
        cn = c0 ** n if n > 0 else ONE / c0 ** (-n)
        return body.scale(cn)._shift_to(lead, C)

    def _shift_to(self, k, C) -> NovikovSeries:
        nu = self.nu
        out = {}
        for (a, b, i, j), c in self._terms.items():
            nk = (a + k[0], b + k[1], i + k[2], j + k[3])
            if _kval(nk, nu) < C:
                out[nk] = c
        return NovikovSeries._raw(out, C, nu)

    def _square_power(self, n: int) -> NovikovSeries:
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result.mul(base)
            n >>= 1
            if n:
                base = base.mul(base)
        return result

    def __pow__(self, n: int) -> NovikovSeries:
        return self.power(n)

    def substitute(self, img_x: NovikovSeries, img_y: NovikovSeries, cutoff=None) -> NovikovSeries:
        return _substitute(self, img_x, img_y, cutoff)

    # -- comparison ---------------------------------------------------------

    def __eq__(self, o) -> bool:
        if not isinstance(o, NovikovSeries):
            if isinstance(o, (int, Fraction)) or type(o) is type(ONE):
                o = const(o, self.cutoff, self.nu)
            else:
                return NotImplemented
        if self.nu != o.nu:
            return False
        C = min(self.cutoff, o.cutoff)
        return self.truncate(C)._terms == o.truncate(C)._terms

    __hash__ = None

    def diff(self, o: NovikovSeries) -> list:
        """Terms of self - o below the common cutoff, for error messages."""
        return list((self - o).terms())

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "cutoff": rat_str(self.cutoff),
            "nu": self.nu.to_dict(),
            "terms": [{"c": rat_str(c), "tA": rat_str(_dec(k[0])), "tB": rat_str(_dec(k[1])), "x": k[2], "y": k[3]}
                      for _, k, c in self.items_sorted()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: Mapping) -> NovikovSeries:
        nu = ValuationMap(rat(d["nu"]["A"]), rat(d["nu"]["B"]))
        terms = [((t["tA"], t["tB"], int(t["x"]), int(t["y"])), rat(t["c"])) for t in d["terms"]]
        return cls(terms, rat(d["cutoff"]), nu)

    @classmethod
    def from_json(cls, text: str) -> NovikovSeries:
        return cls.from_dict(json.loads(text))

    def __str__(self) -> str:
        parts = []
        for _, k, c in self.items_sorted():
            m = _mono_str(k)
            if not m:
                s = rat_str(abs(c))
            elif abs(c) == 1:
                s = m
            else:
                s = rat_str(abs(c)) + "*" + m
            parts.append(("- " if c < 0 else "+ ") + s)
        body = " ".join(parts).lstrip("+ ") if parts else "0"
        if body.startswith("- "):
            body = "-" + body[2:]
        return body

    def __repr__(self) -> str:
        return f"NovikovSeries({self}, cutoff={rat_str(self.cutoff)})"


def _binomial(h: NovikovSeries, n: int, C) -> NovikovSeries:
    """(1 + h)^n truncated below C, for h of positive valuation."""
    nu = h.nu
    hh = h.truncate(C) if C < h.cutoff else h
    out = {(0, 0, 0, 0): ONE}
    coef = ONE
    hp = NovikovSeries._raw({(0, 0, 0, 0): ONE}, C, nu)
    i = 0
    while True:
        i += 1
        coef = coef * (n - i + 1) / i
        if not coef:
            break
        hp = hp.mul(hh, C)
        if hp.is_zero():
            break
        for k, c in hp._terms.items():
            out[k] = out.get(k, ZERO) + coef * c
    C = min(C, hh.cutoff)
    return NovikovSeries._raw({k: c for k, c in out.items() if c and _kval(k, nu) < C}, C, nu)


def _substitute(s: NovikovSeries, img_x: NovikovSeries, img_y: NovikovSeries, cutoff=None) -> NovikovSeries:
    s._check(img_x)
    s._check(img_y)
    nu = s.nu
    try:
        cx, kx, hx = img_x.unit_split()
        cy, ky, hy = img_y.unit_split()
    except NotAUnit as e:
        raise UnsupportedSubstitution(f"images must be a monomial times a unit: {e}") from None
    groups: dict = {}
    for k, c in s._terms.items():
        groups.setdefault((k[2], k[3]), []).append(((k[0], k[1]), c))

    def lead(a, b):
        return (a * kx[0] + b * ky[0], a * kx[1] + b * ky[1], a * kx[2] + b * ky[2], a * kx[3] + b * ky[3])

    info = []
    C = s.cutoff
    min_shift = ZERO
    for (a, b), lst in groups.items():
        lk = lead(a, b)
        shift = _kval(lk, nu)
        vg = min(t[0] * nu._sa + t[1] * nu._sb for t, _ in lst)
        rel = [h.cutoff for e, h in ((a, hx), (b, hy)) if e]
        info.append((a, b, lst, lk, shift, vg, min(rel) if rel else None))
        min_shift = min(min_shift, shift)
    out_C = C + min_shift
    for a, b, lst, lk, shift, vg, rel in info:
        if rel is not None:
            out_C = min(out_C, vg + shift + rel)
    if cutoff is not None:
        out_C = min(out_C, rat(cutoff))
    if out_C <= 0:
        raise UnsupportedSubstitution("substitution leaves no precision (cutoff would be non-positive)")
    need_x: dict = {}
    need_y: dict = {}
    plan = []
    for a, b, lst, lk, shift, vg, rel in info:
        P = out_C - vg - shift
        if P <= 0:
            continue
        plan.append((a, b, lst, lk, P))
        need_x[a] = max(need_x.get(a, P), P)
        need_y[b] = max(need_y.get(b, P), P)
    px = {a: (_binomial(hx, a, P) if a and not hx.is_zero() else None) for a, P in need_x.items()}
    py = {b: (_binomial(hy, b, P) if b and not hy.is_zero() else None) for b, P in need_y.items()}
    out: dict = {}
    get = out.get
    for a, b, lst, lk, P in plan:
        fx, fy = px[a], py[b]
        if fx is None:
            f = fy
        elif fy is None:
            f = fx
        else:
            f = fx.mul(fy, P)
        cc = (cx ** a if a >= 0 else ONE / cx ** (-a)) * (cy ** b if b >= 0 else ONE / cy ** (-b))
        fitems = f.items_sorted() if f is not None else [(ZERO, (0, 0, 0, 0), ONE)]
        for (ta, tb), c in lst:
            base = (ta + lk[0], tb + lk[1], lk[2], lk[3])
            vb = _kval(base, nu)
            c = c * cc
            lim = out_C - vb
            for vf, kf, cf in fitems:
                if vf >= lim:
                    break
                nk = (base[0] + kf[0], base[1] + kf[1], base[2] + kf[2], base[3] + kf[3])
                out[nk] = get(nk, ZERO) + c * cf
    return NovikovSeries._raw({k: c for k, c in out.items() if c}, out_C, nu)


# -- module-level operations ------------------------------------------------

def add(a: NovikovSeries, b: NovikovSeries) -> NovikovSeries:
    return a + b


def mul(a: NovikovSeries, b: NovikovSeries) -> NovikovSeries:
    return a.mul(b)


def invert_unit(s: NovikovSeries) -> NovikovSeries:
    return s.invert_unit()


def pow(s: NovikovSeries, n: int) -> NovikovSeries:  # noqa: A001
    return s.power(n)


def substitute(s: NovikovSeries, img_x: NovikovSeries, img_y: NovikovSeries, cutoff=None) -> NovikovSeries:
    return s.substitute(img_x, img_y, cutoff)


def eq_up_to_cutoff(a: NovikovSeries, b: NovikovSeries, C) -> bool:
    C = rat(C)
    return a.truncate(C)._terms == b.truncate(C)._terms


def const(c, cutoff=None, nu: ValuationMap = DEFAULT_NU) -> NovikovSeries:
    return NovikovSeries._raw({(0, 0, 0, 0): rat(c)} if rat(c) else {}, _pos(cutoff, nu), nu)


def monomial(c=1, t: AreaExponent = AreaExponent(), xe: int = 0, ye: int = 0,
             cutoff=None, nu: ValuationMap = DEFAULT_NU) -> NovikovSeries:
    return NovikovSeries([((t.coeff_A, t.coeff_B, xe, ye), c)], cutoff, nu)


def from_monomial(m: Monomial, c=1, cutoff=None, nu: ValuationMap = DEFAULT_NU) -> NovikovSeries:
    return NovikovSeries([(m, c)], cutoff, nu)


def from_keys(terms: dict, cutoff, nu: ValuationMap = DEFAULT_NU) -> NovikovSeries:
    """Build from internal integer keys (as returned by ``term_map``)."""
    C = rat(cutoff)
    return NovikovSeries._raw({k: rat(c) for k, c in terms.items() if c and _kval(k, nu) < C}, C, nu)


def _pos(cutoff, nu) -> mpq:
    C = default_cutoff(nu) if cutoff is None else rat(cutoff)
    if C <= 0:
        raise ValueError("cutoff must be positive")
    return C


# -- printing ---------------------------------------------------------------

def _lin(c, sym) -> str:
    if c == 1:
        return sym
    if c == -1:
        return "-" + sym
    if c.denominator == 1:
        return f"{c.numerator}{sym}"
    num = "" if c.numerator == 1 else ("-" if c.numerator == -1 else str(c.numerator))
    return f"{num}{sym}/{c.denominator}"


def _texp_str(a, b) -> str:
    parts = [_lin(a, "A")] if a else []
    if b:
        s = _lin(b, "B")
        parts.append(s if not parts or s.startswith("-") else "+" + s)
    return "".join(parts)


def _mono_str(k) -> str:
    parts = []
    t = _texp_str(_dec(k[0]), _dec(k[1]))
    if t:
        parts.append("T^" + (t if t in ("A", "B") else "{" + t + "}"))
    for sym, e in (("x", k[2]), ("y", k[3])):
        if e == 1:
            parts.append(sym)
        elif e:
            parts.append(f"{sym}^{e}" if e > 0 else f"{sym}^{{{e}}}")
    return "*".join(parts)


# -- parsing ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([xyTAB])|(\*\*|[-+*/^(){}]))")


def _tokenize(text: str) -> list:
    pos, toks = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"unexpected character at {pos} in {text!r}")
        toks.append(m.group(1) or m.group(2) or ("^" if m.group(3) == "**" else m.group(3)))
        pos = m.end()
    return toks


class _Parser:
    """Recursive-descent reader for expressions like ``x + 2T^{A+B}/y^2``.

    Letters are single characters, so ``xy^3`` is ``x * y^3``.  Division goes
    through invert_unit.
    """

    def __init__(self, text, cutoff, nu):
        self.toks = _tokenize(text)
        self.i = 0
        self.cutoff = cutoff
        self.nu = nu

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expect=None):
        t = self.peek()
        if t is None or (expect is not None and t != expect):
            raise ValueError(f"expected {expect or 'token'} but found {t!r}")
        self.i += 1
        return t

    def parse(self) -> NovikovSeries:
        s = self.expr()
        if self.peek() is not None:
            raise ValueError(f"trailing input at token {self.peek()!r}")
        return s

    def expr(self):
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
        s = self.term()
        if sign < 0:
            s = -s
        while self.peek() in ("+", "-"):
            op = self.take()
            t = self.term()
            s = s + t if op == "+" else s - t
        return s

    def term(self):
        s = self.power()
        while True:
            t = self.peek()
            if t == "*":
                self.take()
                s = s * self.power()
            elif t == "/":
                self.take()
                s = s * self.power().invert_unit()
            elif t is not None and (t.isdigit() or t in "xyT("):
                s = s * self.power()
            else:
                return s

    def power(self):
        s = self.atom()
        if self.peek() == "^":
            self.take()
            s = s.power(self.int_exp())
        return s

    def int_exp(self) -> int:
        braced = self.peek() == "{"
        if braced:
            self.take()
        sign = 1
        if self.peek() == "-":
            self.take()
            sign = -1
        n = sign * int(self.take())
        if braced:
            self.take("}")
        return n

    def atom(self):
        t = self.take()
        if t.isdigit():
            return const(int(t), self.cutoff, self.nu)
        if t == "x":
            return monomial(1, AreaExponent(), 1, 0, self.cutoff, self.nu)
        if t == "y":
            return monomial(1, AreaExponent(), 0, 1, self.cutoff, self.nu)
        if t == "T":
            self.take("^")
            return monomial(1, self.area(), 0, 0, self.cutoff, self.nu)
        if t == "(":
            s = self.expr()
            self.take(")")
            return s
        raise ValueError(f"unexpected token {t!r}")

    def area(self) -> AreaExponent:
        t = self.peek()
        if t in ("A", "B"):
            self.take()
            return AreaExponent(1, 0) if t == "A" else AreaExponent(0, 1)
        self.take("{")
        total = AreaExponent()
        first = True
        while self.peek() != "}":
            sign = 1
            if self.peek() in ("+", "-"):
                sign = -1 if self.take() == "-" else 1
            elif not first:
                raise ValueError("expected + or - in area exponent")
            num = ONE
            if self.peek() is not None and self.peek().isdigit():
                num = rat(self.take())
            sym = self.take()
            if sym not in ("A", "B"):
                raise ValueError(f"area exponents use A and B, found {sym!r}")
            den = ONE
            if self.peek() == "/":
                self.take()
                den = rat(self.take())
            c = sign * num / den
            total = total + (AreaExponent(c, 0) if sym == "A" else AreaExponent(0, c))
            first = False
        self.take("}")
        return total


def parse(text: str, cutoff=None, nu: ValuationMap = DEFAULT_NU) -> NovikovSeries:
    """Read a Laurent expression in x, y, T^A, T^B, e.g. ``"x + T^{A/2+B}/(x*y^2)"``."""
    cutoff = default_cutoff(nu) if cutoff is None else rat(cutoff)
    return _Parser(text, cutoff, nu).parse()
