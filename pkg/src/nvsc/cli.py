"""Command line front end: ``nvsc <subcommand> ...``.

Exit codes: 0 success, 1 verification mismatch, 2 usage error.
Settings come from flags, then NVSC_NU_A / NVSC_NU_B / NVSC_CUTOFF, then defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import checks
from . import hirzebruch as hz
from . import scattering as sc
from . import superpotential as spot
from .novikov import (
    DEFAULT_NU, Monomial, NovikovError, ValuationMap, default_cutoff, parse, rat, rat_str,
)
from .wallcross import Inconsistent, Underdetermined, gluing_report, solve_wall_function


class UsageError(Exception):
    pass


def _rational(text: str):
    try:
        return rat(text)
    except (ValueError, ZeroDivisionError, TypeError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _env(name: str):
    v = os.environ.get(name)
    if v is None or v == "":
        return None
    try:
        return rat(v)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"environment variable {name}={v!r} is not a rational number") from None


def _nu(args) -> ValuationMap:
    a = args.nuA if args.nuA is not None else _env("NVSC_NU_A")
    b = args.nuB if args.nuB is not None else _env("NVSC_NU_B")
    a = DEFAULT_NU.nu_A if a is None else a
    b = DEFAULT_NU.nu_B if b is None else b
    try:
        return ValuationMap(a, b)
    except ValueError as e:
        raise UsageError(f"--nuA/--nuB: {e}") from None


def _cutoff(args, nu: ValuationMap, default=None):
    C = args.cutoff if getattr(args, "cutoff", None) is not None else _env("NVSC_CUTOFF")
    if C is None:
        C = default_cutoff(nu) if default is None else rat(default)
    if C <= 0:
        raise UsageError(f"--cutoff must be positive, got {rat_str(C)}")
    return C


def _write(args, text: str):
    out = getattr(args, "out", None)
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=1) + "\n"


# -- subcommands -------------------------------------------------------------

def _spec(surface: str, chamber: str, k):
    try:
        return spot.SurfaceSpec(surface, chamber, k)
    except spot.IllegalChamber as e:
        raise UsageError(f"--chamber: {e}") from None


def cmd_superpotential(args) -> int:
    nu = _nu(args)
    C = _cutoff(args, nu)
    spec = _spec(args.surface, args.chamber, args.k)
    W = spot.build(spec, C, nu)
    if args.format == "text":
        _write(args, str(W) + "\n")
    else:
        _write(args, _dump({"spec": spec.label, "series": W.to_dict(), "text": str(W)}))
    return 0


_NAMED = {
    "f3_right": ("F3", "f3_right"), "f3_left": ("F3", "f3_left"), "f2": ("F2", "default"),
    "f0": ("F0", "default"), "f4_alt": ("F4", "f4_alt"), "f4_series": ("F4", "f4_series"),
    "f4_unscaled": ("F4", "f4_unscaled"), "plus_infinity": ("F4", "plus_infinity"),
    "minus_infinity": ("F4", "minus_infinity"),
}


def _named_series(name: str, C, nu):
    if name in _NAMED:
        return spot.build(spot.SurfaceSpec(*_NAMED[name]), C, nu)
    if name.startswith("expr:"):
        return parse(name[5:], C, nu)
    raise UsageError(f"unknown series {name!r}; use one of {sorted(_NAMED)} or expr:<formula>")


def _single_monomial(text: str, C, nu) -> Monomial:
    s = parse(text, C, nu)
    if len(s) != 1:
        raise UsageError(f"--monomial must be a single monomial, got {s}")
    (m, c), = s.terms()
    if c != 1:
        raise UsageError("--monomial must have coefficient 1")
    return m


def cmd_wallcross(args) -> int:
    nu = _nu(args)
    C = _cutoff(args, nu)
    if args.action == "gluing":
        r = gluing_report(C, args.h, nu)
        ok = bool(r["uv_matches"] and r["superpotentials_match"])
        _write(args, _dump({"uv": str(r["uv"]), "uv_matches": r["uv_matches"],
                            "superpotentials_match": r["superpotentials_match"],
                            "difference": str(r["difference"]), "ok": ok}))
        return 0 if ok else 1
    src = _named_series(args.src, C, nu)
    dst = _named_series(args.dst, C, nu)
    q = _single_monomial(args.monomial, C, nu)
    try:
        coeffs = solve_wall_function(src, dst, q, args.expx, args.expy, args.order)
    except (Inconsistent, Underdetermined) as e:
        _write(args, _dump({"ok": False, "error": type(e).__name__, "message": str(e)}))
        return 1
    _write(args, _dump({"ok": True, "monomial": str(q), "exp": [args.expx, args.expy],
                        "coeffs": [rat_str(c) for c in coeffs]}))
    return 0


def cmd_scatter(args) -> int:
    nu = _nu(args)
    C = _cutoff(args, nu, default=12)
    d = sc.complete(sc.initial_diagram(C, nu), C)
    if args.action == "diagram":
        _write(args, sc.emit_figure(d, args.emit))
        return 0
    if args.action == "chamber-w":
        try:
            W = sc.chamber_superpotential(d, args.k)
        except sc.CutoffTooLow as e:
            raise UsageError(f"--k: {e}") from None
        doc = {"chamber": args.k, "series": W.to_dict(), "text": str(W)}
    else:
        W = sc.limit_superpotential(d, args.sign)
        doc = {"limit": args.sign, "series": W.to_dict(), "text": str(W)}
    if d.notes:
        doc["notes"] = list(d.notes)
    _write(args, _dump(doc) if args.emit == "json" else doc["text"] + "\n")
    return 0


def cmd_enumerate(args) -> int:
    side = args.side
    if side is None:
        side = "wall" if (args.surface == "f3" and args.index == 0) else "right"
    try:
        sys_ = hz.surface_system(args.surface, args.index, side)
    except KeyError as e:
        raise UsageError(str(e.args[0])) from None
    if args.bound < 1:
        raise UsageError("--bound must be at least 1")
    rep = hz.enumeration_report(sys_, args.bound)
    doc = {"system": sys_.to_dict(), "bound": args.bound,
           "classes": [c.to_dict() for c in rep["classes"]],
           "raw_only": [c.to_dict() for c in rep["raw_only"]]}
    if rep["raw_only"]:
        doc["flag"] = ("the raw inequalities admit classes excluded by the rigid-sphere rule; "
                       "they are listed under raw_only")
    _write(args, _dump(doc))
    return 0


def cmd_critical(args) -> int:
    nu = _nu(args)
    if not 0 < args.T < 1:
        raise UsageError("--T must lie in (0, 1)")
    if not args.tol > 0:
        raise UsageError("--tol must be positive")
    spec = _spec(args.surface, args.chamber, None)
    C = args.cutoff if args.cutoff is not None else _env("NVSC_CUTOFF")
    try:
        rep = spot.critical_points_numeric(spec, nu, args.T, args.tol, C)
    except spot.NoConvergence as e:
        _write(args, _dump({"ok": False, "error": str(e)}))
        return 1
    expected = sorted(s * 2 * args.T ** (float(nu.nu_A) / 2) + r * 2 * args.T ** (float(nu.nu_B) / 2)
                      for s in (1, -1) for r in (1, -1))
    match = len(rep["values"]) == 4 and all(abs(a - b) < args.tol for a, b in zip(rep["values"], expected))
    rep["expected"] = expected
    rep["match"] = match
    _write(args, _dump(rep))
    return 0 if match else 1


def cmd_obstruction(args) -> int:
    try:
        d = hz.obstruction_degree(args.n, args.points)
        d2 = hz.obstruction_degree_by_transition(args.n, args.points)
    except hz.NotALineFamily as e:
        raise UsageError(str(e)) from None
    ok = d == d2
    _write(args, _dump({"n": args.n, "points": args.points,
                        "degree": d if isinstance(d, int) else list(d),
                        "degree_by_transition": d2 if isinstance(d2, int) else list(d2),
                        "agree": ok}))
    return 0 if ok else 1


def cmd_verify_all(args) -> int:
    nu = _nu(args)
    cap = args.cutoff if args.cutoff is not None else _env("NVSC_CUTOFF")
    if cap is not None and cap <= 0:
        raise UsageError(f"--cutoff must be positive, got {rat_str(cap)}")
    cfg = checks.Config(nu=nu, scatter_cutoff=cap, property_cases=args.cases)
    results = checks.run_all(cfg)
    if args.format == "json":
        _write(args, _dump([r.to_dict() for r in results]))
    else:
        w = max(len(r.formula) for r in results)
        lines = [f"{'#':>2}  {'formula':<{w}}  {'check':<26} result"]
        for r in results:
            lines.append(f"{r.id:>2}  {r.formula:<{w}}  {r.name:<26} {'PASS' if r.passed else 'FAIL'}"
                         + (f"  {r.detail}" if r.detail and not r.passed else ""))
        passed = sum(r.passed for r in results)
        lines.append(f"{passed}/{len(results)} checks passed")
        _write(args, "\n".join(lines) + "\n")
    return 0 if all(r.passed for r in results) else 1


# -- parser ------------------------------------------------------------------

def _common(p, cutoff=True):
    p.add_argument("--nuA", type=_rational, help="valuation of A (default 2)")
    p.add_argument("--nuB", type=_rational, help="valuation of B (default 1)")
    if cutoff:
        p.add_argument("--cutoff", type=_rational, help="valuation cutoff")
    p.add_argument("--out", default="-", help="output file, - for stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nvsc", description="Novikov series, wall crossing and scattering for F3/F4 mirrors.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("superpotential", help="build a superpotential")
    _common(p)
    p.add_argument("--surface", required=True, choices=["f0", "f2", "f3", "f4"])
    p.add_argument("--chamber", default="default")
    p.add_argument("--k", type=int, help="chamber index for --chamber chamber_k")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--json", dest="format", action="store_const", const="json")
    g.add_argument("--text", dest="format", action="store_const", const="text")
    p.set_defaults(format="json", func=cmd_superpotential)

    p = sub.add_parser("wallcross", help="solve for a wall function or check the F3 gluing")
    p.add_argument("action", choices=["solve", "gluing"])
    _common(p)
    p.add_argument("--src", default="f3_right")
    p.add_argument("--dst", default="f3_left")
    p.add_argument("--monomial", default="T^A/y")
    p.add_argument("--expx", type=int, default=1)
    p.add_argument("--expy", type=int, default=0)
    p.add_argument("--order", type=int, default=6)
    p.add_argument("--h", default="1 + T^A/y", help="chart-change factor for gluing")
    p.set_defaults(func=cmd_wallcross)

    p = sub.add_parser("scatter", help="complete the scattering diagram")
    p.add_argument("action", nargs="?", default="diagram", choices=["diagram", "chamber-w", "limit"])
    _common(p)
    p.add_argument("--emit", choices=["svg", "json", "text"], default=None)
    p.add_argument("--json", dest="emit", action="store_const", const="json")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--sign", choices=["plus", "minus", "+", "-"], default="plus")
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("enumerate-classes", help="enumerate disc classes of a constraint system")
    p.add_argument("--surface", required=True, choices=["f3", "f4"])
    p.add_argument("--index", type=int, required=True, choices=[0, 2])
    p.add_argument("--side", choices=["left", "right", "wall", "to_f2", "to_f2_nodal"])
    p.add_argument("--bound", type=int, default=8)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("critical-values", help="numeric critical values")
    _common(p)
    p.add_argument("--surface", default="f4", choices=["f0", "f2", "f3", "f4"])
    p.add_argument("--chamber", default="default")
    p.add_argument("--T", type=float, default=0.25)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("obstruction", help="degree of the obstruction line bundle")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_obstruction)

    p = sub.add_parser("verify-all", help="run every acceptance check")
    _common(p)
    p.add_argument("--cases", type=int, default=1000, help="random cases per kernel law")
    p.add_argument("--json", dest="format", action="store_const", const="json", default="text")
    p.set_defaults(func=cmd_verify_all)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.cmd == "scatter" and args.emit is None:
        args.emit = "svg" if args.action == "diagram" else "json"
    if args.cmd == "scatter" and args.action == "diagram" and args.emit == "text":
        ap.error("--emit text applies to chamber-w and limit")
    try:
        return args.func(args)
    except UsageError as e:
        ap.error(str(e))
    except NovikovError as e:
        print(f"nvsc: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
