"""Command-line driver: ``gradlie <command> [flags]``.

Every command prints a short summary, optionally writes a JSON report
(``--report``) and exits with status 0 iff every checked item passes.
Input errors (bad flags, excluded parameters, malformed files) exit with 2.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__, catalog
from .expr import DomainError, SamplerConfig, is_zero, render
from .jet import FlowBlowUpError, flow
from .numerics import (
    PgmError, SolverError, edge_gradient, image_field, integrate_ode, pde_residual_fd,
    perona_malik_filter, read_pgm, to_bytes, write_pgm,
)
from .pde import determining_system
from .reduce import (
    EXACT_FAMILIES, REDUCTION_CASES, bernoulli_closed_form, exact_solution, hodograph_1d,
    radial_hodograph, radial_pde, reduce_to_ode,
)

SCHEMA = "gradlie.report/1"
RATIO_BAND = (3.5, 4.5)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    """Invalid input; reported with exit status 2."""


def _frac(text: str | None, default=None):
    if text is None:
        return default
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


def _floats(text: str, count: int, flag: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"{flag} expects {count} comma-separated numbers") from exc
    if len(vals) != count:
        raise UsageError(f"{flag} expects {count} comma-separated numbers, got {len(vals)}")
    return vals


def _sampler(args) -> SamplerConfig:
    return SamplerConfig(n_samples=args.samples, seed=args.seed, tol=args.tol)


def _band(args) -> tuple:
    return (args.ratio_min, args.ratio_max)


def _in_band(ratio: float, band: tuple) -> bool:
    return bool(np.isfinite(ratio)) and band[0] <= ratio <= band[1]


def _clean(obj):
    """JSON-safe copy: fractions become strings, non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


# ---------------------------------------------------------------- commands


def cmd_verify(args) -> list[dict]:
    sampler = _sampler(args)
    if args.table not in catalog.TABLES:
        raise UsageError(f"unknown table {args.table!r}; expected one of {sorted(catalog.TABLES)}")
    selected = catalog.cases(args.table)
    if args.case:
        selected = [c for c in selected if c.id == args.case]
        if not selected:
            raise UsageError(f"no case {args.case!r} in table {args.table}")
    items = []
    for c in selected:
        rep = catalog.verify_case(c, sampler=sampler)
        d = rep.as_dict()
        d["id"] = c.id
        items.append(d)
        if not rep.passed:
            print(f"  {c.id}: first witness {json.dumps(_clean(rep.witness))}")
    return items


def cmd_determining(args) -> list[dict]:
    ds = determining_system(sampler=_sampler(args))
    return [
        {"id": "coefficient of u_xx", "expression": render(ds.coefficient),
         "passed": bool(ds.coefficient_match), "max_residual": ds.coefficient_match.max_residual},
        {"id": "remainder", "expression": render(ds.remainder), "reading": ds.reading,
         "passed": bool(ds.remainder_match), "max_residual": ds.remainder_match.max_residual},
    ]


def cmd_reduce(args) -> list[dict]:
    if args.case not in REDUCTION_CASES:
        raise UsageError(f"unknown case {args.case!r}; expected one of {REDUCTION_CASES}")
    k = _frac(args.k)
    if k is None:
        raise UsageError("--k is required")
    lam = _frac(args.lam, Fraction(0))
    try:
        rc = reduce_to_ode(args.case, k, lam, _sampler(args))
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    item = rc.as_dict()
    item["id"] = f"reduce {args.case}"
    item["passed"] = bool(rc.reduces)
    item["flag"] = "matches printed" if rc.matches_printed else "differs from printed"
    print(f"  ODE: {rc.ode_string()}")
    print(f"  printed: {rc.printed_string()} ({item['flag']})")
    items = [item]
    if args.integrate:
        items.append(_integrate_reduction(rc, args))
    return items


def _integrate_reduction(rc, args) -> dict:
    """Adaptive integration of the derived ODE against the Bernoulli closed
    form (case ii with lambda = 0) on ``omega in [1, 2]``."""
    if rc.id != "ii" or rc.lam != 0:
        raise UsageError("--integrate compares against the closed form of case ii with --lambda 0")
    C1 = _frac(args.c1, Fraction(0))
    C2 = _frac(args.c2, Fraction(0))
    try:
        b = bernoulli_closed_form(rc.k, C1, C2, omega_range=(0.9, 2.1))
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    s_eval = np.linspace(1.0, 2.0, 21)
    tr = integrate_ode(rc.rhs_function(), [b.phi(1.0), b.dphi(1.0)], (1.0, 2.0),
                       tol=min(args.tol, 1e-9), s_eval=s_eval)
    dev = max(abs(float(tr.at(s)[0]) - b.phi(s)) for s in s_eval) if tr.ok else float("inf")
    tol = args.ode_tol
    return {"id": "closed form vs integration", "C1": str(C1), "C2": str(C2),
            "max_deviation": dev, "tolerance": tol, "status": tr.status,
            "checks": {k: bool(v) for k, v in b.checks.items()},
            # the closed form is checked against the derived ODE; the printed
            # case-ii ODE is reported but not required
            "passed": tr.ok and dev <= tol and bool(b.checks["linearized"]) and bool(b.checks["derived_ode"])}


_FAMILY_GRIDS = {
    "4-15": ((1.0, 2.0), (1.0, 2.0), 0.05),
    "4-17": ((0.0, 0.5), (0.2, 0.8), 0.05),
    "4-11-closed": ((0.0, 0.5), (0.5, 1.5), 0.05),
}


def _grid(args, family: str):
    t_rng, r_rng, h = _FAMILY_GRIDS[family]
    if args.grid:
        t0, t1, r0, r1, h = _floats(args.grid, 5, "--grid")
        t_rng, r_rng = (t0, t1), (r0, r1)
    return t_rng, r_rng, h


def _fd_item(ident: str, evaluator, pde, t_rng, r_rng, h, levels, band) -> dict:
    rep = pde_residual_fd(evaluator, pde, t_rng, [r_rng], h, levels)
    print("  " + rep.table().replace("\n", "\n  "))
    return {"id": ident, "fd": rep.as_dict(), "ratio": rep.ratio,
            "max_residual": rep.max_residual, "passed": _in_band(rep.ratio, band)}


def cmd_exact(args) -> list[dict]:
    fam = args.family
    if fam not in EXACT_FAMILIES:
        raise UsageError(f"unknown family {fam!r}; expected one of {EXACT_FAMILIES}")
    sampler = _sampler(args)
    levels = max(2, args.refine)
    band = _band(args)
    k = _frac(args.k)
    try:
        if fam == "4-15":
            k = k if k is not None else Fraction(-2)
            sol = exact_solution(fam, sampler, k=k, C1=_frac(args.c1, Fraction(0)),
                                 C2=_frac(args.c2, Fraction(0)), omega_range=(0.5, 4.0))
            t_rng, r_rng, h = _grid(args, fam)
            items = [_checks_item(sol), _fd_item("fd 4-15", sol.evaluate, radial_pde(k), t_rng, r_rng, h, levels, band)]
            _write_profile(args, sol, t_rng, r_rng)
            return items
        if fam == "4-16":
            lam = _frac(args.lam, Fraction(1))
            sol = exact_solution(fam, sampler, lam=lam, C2=_frac(args.c2, Fraction(1)))
            return [_checks_item(sol)]
        if fam == "4-17":
            lam = _frac(args.lam, Fraction(1))
            C2 = _frac(args.c2, Fraction(1))
            t_rng, r_rng, h = _grid(args, fam)
            levels = max(3, levels)
            items = []
            for variant in ("derived", "printed"):
                sol = exact_solution(fam, sampler, lam=lam, C2=C2, variant=variant)
                ev = (lambda s: lambda t, r: s.evaluate(t, r, strict=False))(sol)
                item = _fd_item(f"fd 4-17 {variant}", ev, radial_pde(Fraction(-1, 3)), t_rng, r_rng, h, levels, band)
                item["checks"] = {n: bool(v) for n, v in sol.checks.items()}
                items.append(item)
            passing = [it["id"].split()[-1] for it in items if it["passed"]]
            verdict = passing[0] if len(passing) == 1 else None
            print(f"  passing variant: {verdict or 'none or both'}")
            # the comparison passes when exactly one variant converges
            summary = {"id": "4-17 adjudication", "passing_variant": verdict, "passed": verdict is not None}
            return [*(dict(it, passed=True, converges=it["passed"]) for it in items), summary]
        k = k if k is not None else Fraction(2)
        sol = exact_solution(fam, sampler, k=k)
        t_rng, r_rng, h = _grid(args, fam)
        items = [_checks_item(sol), _fd_item("fd 4-11-closed", sol.evaluate, radial_pde(k), t_rng, r_rng, h, levels, band)]
        _write_profile(args, sol, t_rng, r_rng)
        return items
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


# checks reported for comparison only; they do not decide the outcome
_INFORMATIONAL = {"printed_ode"}


def _checks_item(sol) -> dict:
    checks = {n: {"passed": bool(v), "max_residual": v.max_residual} for n, v in sol.checks.items()}
    required = [c["passed"] for n, c in checks.items() if n not in _INFORMATIONAL]
    return {"id": f"{sol.family} symbolic checks", "params": {k: str(v) for k, v in sol.params.items()},
            "checks": checks, "informational": sorted(_INFORMATIONAL & set(checks)), "passed": all(required)}


def _write_profile(args, sol, t_rng, r_rng):
    if args.out:
        t, r = np.meshgrid(np.linspace(*t_rng, 11), np.linspace(*r_rng, 21), indexing="ij")
        sol.write_profile(args.out, t, r)


def cmd_hodograph(args) -> list[dict]:
    sampler = _sampler(args)
    band = _band(args)
    levels = max(2, args.refine)
    h = hodograph_1d("u", sampler)
    sol = lambda t, x: np.exp(t) * x  # noqa: E731
    # u = exp(t) x inverts to x = w(t, u) = exp(-t) u
    lin = h.linear_residual("exp(-t)*u")
    items = [{
        "id": "u_x^-2 hodograph (Q = u)",
        "transform": bool(h.check), "w = exp(-t) u solves the linear equation": bool(is_zero(lin, sampler)),
        "passed": bool(h.check) and bool(is_zero(lin, sampler)),
    }]
    fd = pde_residual_fd(sol, h.source, (0.0, 1.0), [(1.0, 2.0)], 0.05, levels)
    items.append({"id": "fd u = exp(t) x", "fd": fd.as_dict(), "max_residual": fd.max_residual,
                  "ratio": fd.ratio, "passed": _in_band(fd.ratio, band)})
    rh = radial_hodograph(sampler)
    V = "exp(t)*sin(z)"
    v_ok = bool(is_zero(rh.linear_residual(V), sampler))
    items.append({"id": "radial hodograph (k = -1)", "transform": bool(rh.check),
                  "V = exp(t) sin z solves V_t = -V_zz": v_ok, "passed": bool(rh.check) and v_ok})
    U = rh.solution_from(V, (1e-12, np.pi / 2))
    items.append(_fd_item("fd U from V = exp(t) sin z", U, radial_pde(-1), (0.0, 0.5), (0.3, 0.7), 0.05, levels, band))
    return items


def cmd_pm_filter(args) -> list[dict]:
    if not args.inp:
        raise UsageError("--in is required")
    try:
        img = read_pgm(args.inp)
    except PgmError as exc:
        raise UsageError(f"{args.inp}: {exc}") from exc
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    d0 = _frac(args.d0, Fraction(1, 100))
    try:
        out, stats = perona_malik_filter(image_field(img), args.model, d0, args.time)
    except (ValueError, SolverError) as exc:
        raise UsageError(str(exc)) from exc
    if args.out:
        write_pgm(args.out, to_bytes(out))
    tol = args.mass_tol
    return [{"id": f"perona-malik {args.model}", "shape": list(img.shape), **stats.as_dict(),
             "edge_gradient": edge_gradient(out), "mass_tolerance": tol,
             "passed": stats.mass_error <= tol and stats.maximum_principle}]


def cmd_flow(args) -> list[dict]:
    try:
        c = catalog.case(args.case or "")
    except KeyError as exc:
        raise UsageError(str(exc)) from exc
    values = c.parameter_samples()[0] if c.params else {}
    for name, flag in (("k", args.k), ("lam", args.lam), ("e1", args.c1), ("e2", args.c2)):
        if flag is not None and name in c.params:
            values[name] = _frac(flag)
    fields = dict(c.fields(values))
    name = args.generator or next(iter(fields))
    if name not in fields:
        raise UsageError(f"{c.id} has no generator {name!r}; expected one of {sorted(fields)}")
    nvars = len(c.jet.base) + 1
    point = _floats(args.point, nvars, "--point") if args.point else [1.0] * nvars
    item = {"id": f"flow {c.id} {name}", "params": {k: str(v) for k, v in values.items()},
            "point": point, "eps": args.eps}
    try:
        image = flow(fields[name], point, args.eps)
        item.update(image=[float(v) for v in image], passed=True)
    except FlowBlowUpError as exc:
        item.update(image=None, blow_up=str(exc), passed=False)
    return [item]


COMMANDS = {
    "verify": cmd_verify,
    "determining": cmd_determining,
    "reduce": cmd_reduce,
    "exact": cmd_exact,
    "hodograph": cmd_hodograph,
    "pm-filter": cmd_pm_filter,
    "flow": cmd_flow,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="sampler seed (default 0)")
    common.add_argument("--samples", type=int, default=100, help="jet points per identity test (default 100)")
    common.add_argument("--tol", type=float, default=1e-9, help="float-path residual threshold (default 1e-9)")
    common.add_argument("--report", help="write the JSON report here")
    common.add_argument("--ratio-min", type=float, default=RATIO_BAND[0])
    common.add_argument("--ratio-max", type=float, default=RATIO_BAND[1])
    common.add_argument("--refine", type=int, default=2, help="refinement levels of the residual oracle")

    p = argparse.ArgumentParser(prog="gradlie", description="Lie symmetry toolkit for gradient-diffusion equations.")
    p.add_argument("--version", action="version", version=f"gradlie {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify", parents=[common], help="verify a symmetry table")
    s.add_argument("--table", required=True, help=f"one of {', '.join(catalog.TABLES)}")
    s.add_argument("--case", help="restrict to one case id")

    sub.add_parser("determining", parents=[common], help="extract the determining equations")

    s = sub.add_parser("reduce", parents=[common], help="reduce the radial equation to an ODE")
    s.add_argument("--case", required=True, help=f"one of {', '.join(REDUCTION_CASES)}")
    s.add_argument("--k", required=True)
    s.add_argument("--lambda", dest="lam")
    s.add_argument("--integrate", action="store_true", help="compare with the closed form (case ii, lambda 0)")
    s.add_argument("--c1")
    s.add_argument("--c2")
    s.add_argument("--ode-tol", type=float, default=1e-6)

    s = sub.add_parser("exact", parents=[common], help="check an exact-solution family")
    s.add_argument("--family", required=True, help=f"one of {', '.join(EXACT_FAMILIES)}")
    s.add_argument("--k")
    s.add_argument("--lambda", dest="lam")
    s.add_argument("--c1")
    s.add_argument("--c2")
    s.add_argument("--grid", help="t0,t1,r0,r1,h")
    s.add_argument("--out", help="write a tab-delimited (t, r, u) profile")

    sub.add_parser("hodograph", parents=[common], help="check the linearizing hodograph maps")

    s = sub.add_parser("pm-filter", parents=[common], help="Perona-Malik filter of a PGM image")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out")
    s.add_argument("--model", default="rational", choices=["exponential", "rational", "linear"])
    s.add_argument("--d0", default="0.01")
    s.add_argument("--time", type=float, default=0.5)
    s.add_argument("--mass-tol", type=float, default=1e-10)

    s = sub.add_parser("flow", parents=[common], help="flow a point along a catalogued generator")
    s.add_argument("--case", required=True)
    s.add_argument("--generator")
    s.add_argument("--point", help="t,x...,u")
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--k")
    s.add_argument("--lambda", dest="lam")
    s.add_argument("--c1", help="value of e1")
    s.add_argument("--c2", help="value of e2")
    return p


def run(argv=None) -> tuple[int, dict]:
    """Parse ``argv``, run the command and return ``(exit status, report)``."""
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    report = {"schema": SCHEMA, "command": args.command, "seed": args.seed,
              "arguments": {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "report")}}
    try:
        items = COMMANDS[args.command](args)
    except (UsageError, DomainError, ValueError, KeyError) as exc:
        # excluded parameters and malformed input surface as ValueError/KeyError
        print(f"error: {exc}", file=sys.stderr)
        report.update(items=[], passed=False, error=str(exc))
        return EXIT_USAGE, report
    passed = all(it.get("passed", False) for it in items) and bool(items)
    report.update(items=items, passed=passed, wall_time=time.perf_counter() - start)
    for it in items:
        print(f"{'PASS' if it.get('passed') else 'FAIL'}  {it['id']}")
    print(f"{sum(bool(it.get('passed')) for it in items)}/{len(items)} passed")
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(_clean(report), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return (EXIT_OK if passed else EXIT_FAIL), report


def main(argv=None) -> int:
    return run(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
