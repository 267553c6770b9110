"""Evaluation, code generation and randomized zero testing.

Expressions are compiled into straight-line Python (one temporary per
distinct subtree).  The ``exact`` backend runs on ``Fraction`` values and only
degrades to multiprecision floats (mpmath) where the tree forces it
(non-integer powers, elementary functions, quadratures); the ``numpy`` backend
vectorizes over arrays.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import mpmath
import numpy as np
from scipy import integrate

from .core import JET, Add, Apply, Expr, Func, Mul, Num, Pow, Quad, Symbol


class DomainError(ArithmeticError):
    """Evaluation left the real domain of the expression."""


def _mpf(a):
    if isinstance(a, Fraction):
        return mpmath.mpf(a.numerator) / a.denominator
    return mpmath.mpf(a)


def _pow_exact(b, x):
    if isinstance(x, Fraction) and x.denominator == 1:
        try:
            return b ** x.numerator
        except ZeroDivisionError:
            raise DomainError("zero to a negative power") from None
    if b < 0:
        raise DomainError("negative base with non-integer exponent")
    if b == 0:
        if x <= 0:
            raise DomainError("zero to a non-positive power")
        return mpmath.mpf(0)
    return mpmath.power(_mpf(b), _mpf(x))


def _log_exact(a):
    if a <= 0:
        raise DomainError("log of a non-positive number")
    return mpmath.log(_mpf(a))


def _exp_exact(a):
    return mpmath.exp(_mpf(a))


def _np_pow(b, x):
    with np.errstate(all="ignore"):
        return np.power(np.asarray(b, dtype=float), x)


def _np_log(a):
    with np.errstate(all="ignore"):
        return np.log(np.asarray(a, dtype=float))


def _np_exp(a):
    with np.errstate(all="ignore"):
        return np.exp(np.asarray(a, dtype=float))


_BACKENDS = {
    "exact": {"pow": _pow_exact, "exp": _exp_exact, "log": _log_exact, "sin": lambda a: mpmath.sin(_mpf(a)),
              "cos": lambda a: mpmath.cos(_mpf(a))},
    "numpy": {"pow": _np_pow, "exp": _np_exp, "log": _np_log, "sin": np.sin, "cos": np.cos},
}


def _quad_float(integrand: Callable, lo, hi) -> float:
    val, _ = integrate.quad(integrand, float(lo), float(hi), epsabs=1e-10, epsrel=1e-12, limit=200)
    return val


def compile_expr(e: Expr, args: Sequence[Symbol], backend: str = "exact") -> Callable:
    """Compile ``e`` to a function of ``args`` (positionally).

    The result takes an optional keyword ``opaque(name, index, argvals)`` that
    supplies values of opaque function applications.
    """
    helpers = _BACKENDS[backend]
    argnames = {s: f"a{i}" for i, s in enumerate(args)}
    ns: dict = {
        "_pow": helpers["pow"],
        "_exp": helpers["exp"],
        "_log": helpers["log"],
        "_sin": helpers["sin"],
        "_cos": helpers["cos"],
    }
    lines: list[str] = []
    names: dict[Expr, str] = {}

    def const(v: Fraction) -> str:
        key = f"c{len(ns)}"
        ns[key] = v if backend == "exact" else float(v)
        return key

    def emit(node: Expr) -> str:
        if isinstance(node, Num):
            return const(node.value)
        if isinstance(node, Symbol):
            try:
                return argnames[node]
            except KeyError:
                raise KeyError(f"unbound symbol {node.name!r}") from None
        if node in names:
            return names[node]
        if isinstance(node, Add):
            code = " + ".join(emit(t) for t in node.terms)
        elif isinstance(node, Mul):
            code = " * ".join(emit(f) for f in node.factors)
        elif isinstance(node, Pow):
            b = emit(node.base)
            x = node.exp
            if isinstance(x, Num) and x.value.denominator == 1 and backend == "numpy":
                code = f"{b} ** {int(x.value)}"
            else:
                code = f"_pow({b}, {emit(x)})"
        elif isinstance(node, Func):
            code = f"_{node.name}({emit(node.arg)})"
        elif isinstance(node, Apply):
            argcode = ", ".join(emit(a) for a in node.args)
            code = f"opaque({node.name!r}, {node.index!r}, ({argcode},))"
        elif isinstance(node, Quad):
            inner = compile_expr(node.integrand, [node.var], "numpy")
            fname = f"_q{len(ns)}"
            if backend == "numpy":
                ns[fname] = np.vectorize(
                    lambda lo, hi, _f=inner: _quad_float(lambda s: float(_f(s)), lo, hi)
                )
            else:
                ns[fname] = lambda lo, hi, _f=inner: _quad_float(lambda s: float(_f(s)), lo, hi)
            code = f"{fname}({emit(node.lower)}, {emit(node.upper)})"
        else:
            raise TypeError(type(node).__name__)
        tmp = f"v{len(names)}"
        lines.append(f"    {tmp} = {code}")
        names[node] = tmp
        return tmp

    root = emit(e)
    params = ", ".join(argnames[s] for s in args)
    sep = ", " if params else ""
    src = f"def _compiled({params}{sep}opaque=None):\n" + "\n".join(lines) + f"\n    return {root}\n"
    exec(compile(src, "<gradlie-expr>", "exec"), ns)
    return ns["_compiled"]


def lambdify(e: Expr, args: Sequence[Symbol]) -> Callable:
    """Vectorized float evaluator of ``e``; opaque applications are rejected."""
    f = compile_expr(e, args, "numpy")

    def fn(*vals):
        with np.errstate(all="ignore"):
            return f(*vals, opaque=_no_opaque)

    return fn


def _no_opaque(name, index, argvals):
    raise ValueError(f"opaque function {name!r} has no numeric value")


def evaluate(
    e: Expr, values: Mapping[Symbol, object], opaque: Callable | None = None, precision: int = 50
):
    """Evaluate at a single point, exactly where possible.

    Irrational intermediate results are mpmath floats with ``precision``
    decimal digits.
    """
    syms = sorted(e.free_symbols, key=lambda s: s.key)
    f = compile_expr(e, syms, "exact")
    with mpmath.workdps(precision):
        return f(*(values[s] for s in syms), opaque=opaque or _no_opaque)


# ---------------------------------------------------------------- identity testing


@dataclass(frozen=True)
class SamplerConfig:
    """Sampling plan for randomized identity testing.

    Each symbol draws a rational from ``ranges[name]`` if present, otherwise
    from ``second_order_range`` for second-order jet coordinates and from
    ``default_range`` for everything else.  Opaque function values and each
    of their derivatives are drawn independently from ``opaque_range``.
    Points that leave the rationals are evaluated with ``precision`` decimal
    digits.
    """

    n_samples: int = 100
    seed: int = 0
    tol: float = 1e-9
    ranges: Mapping[str, tuple] = field(default_factory=dict)
    default_range: tuple = (Fraction(1, 2), Fraction(2))
    second_order_range: tuple = (Fraction(-2), Fraction(2))
    opaque_range: tuple = (Fraction(-2), Fraction(2))
    denominator: int = 10007
    max_resample: int = 200
    precision: int = 50

    def range_for(self, s: Symbol) -> tuple:
        if s.name in self.ranges:
            return self.ranges[s.name]
        if s.kind == JET and s.order >= 2:
            return self.second_order_range
        return self.default_range

    def with_ranges(self, **ranges) -> "SamplerConfig":
        merged = dict(self.ranges)
        merged.update(ranges)
        return SamplerConfig(
            self.n_samples, self.seed, self.tol, merged, self.default_range,
            self.second_order_range, self.opaque_range, self.denominator, self.max_resample,
            self.precision,
        )


def _draw(rng: random.Random, lo, hi, den: int) -> Fraction:
    lo, hi = Fraction(lo), Fraction(hi)
    return lo + (hi - lo) * Fraction(rng.randint(0, den), den)


@dataclass
class ZeroTest:
    """Outcome of :func:`is_zero`.

    ``witness`` maps symbol names (and opaque applications) to the sample at
    which the largest residual occurred; it is ``None`` for a zero verdict.
    """

    zero: bool
    max_residual: float
    witness: dict | None
    exact: bool
    samples: int

    def __bool__(self) -> bool:
        return self.zero


def is_zero(
    e: Expr,
    sampler: SamplerConfig | None = None,
    fixed: Mapping[Symbol, object] | None = None,
) -> ZeroTest:
    """Decide ``e == 0`` by evaluation at random rational points.

    Points where every operation stays rational are judged exactly; points that
    fall back to multiprecision floats use ``sampler.tol`` as an absolute
    threshold.
    Points outside the real domain are redrawn.  Symbols in ``fixed`` keep the
    given value instead of being sampled.
    """
    sampler = sampler or SamplerConfig()
    if isinstance(e, Num):
        ok = e.value == 0
        return ZeroTest(ok, float(abs(e.value)), None if ok else {}, True, 0)
    fixed = {k: Fraction(v) if isinstance(v, (int, str)) else v for k, v in (fixed or {}).items()}
    syms = sorted(e.free_symbols - set(fixed), key=lambda s: s.key)
    pinned = sorted((s for s in e.free_symbols if s in fixed), key=lambda s: s.key)
    f = compile_expr(e, syms + pinned, "exact")
    pinned_vals = [fixed[s] for s in pinned]
    rng = random.Random(sampler.seed)
    ranges = [sampler.range_for(s) for s in syms]
    with mpmath.workdps(sampler.precision):
        return _sample_loop(e, f, syms, pinned_vals, ranges, rng, sampler)


def _sample_loop(e, f, syms, pinned_vals, ranges, rng, sampler) -> ZeroTest:
    den = sampler.denominator
    lo_o, hi_o = sampler.opaque_range
    max_res = 0.0
    worst = None
    worst_res = 0.0
    all_exact = True
    zero = True
    for _ in range(sampler.n_samples):
        for _attempt in range(sampler.max_resample):
            vals = [_draw(rng, lo, hi, den) for lo, hi in ranges]
            cache: dict = {}

            def opaque(name, index, argvals, _cache=cache):
                k = (name, index, argvals)
                if k not in _cache:
                    _cache[k] = _draw(rng, lo_o, hi_o, den)
                return _cache[k]

            try:
                r = f(*vals, *pinned_vals, opaque=opaque)
            except (DomainError, ZeroDivisionError, OverflowError, ValueError):
                continue
            if isinstance(r, (complex, mpmath.mpc)) or (
                not isinstance(r, (Fraction, int)) and not mpmath.isfinite(r)
            ):
                continue
            break
        else:
            raise DomainError(f"no admissible sample point found for {e}")
        exact = isinstance(r, (Fraction, int))
        all_exact &= exact
        res = abs(float(r))
        ok = (r == 0) if exact else res <= sampler.tol
        if not ok:
            zero = False
            if worst is None or res > worst_res:
                worst_res = res
                worst = {s.name: v for s, v in zip(syms, vals)}
                worst.update({f"{n}{list(i)}{a}": v for (n, i, a), v in cache.items()})
                worst["residual"] = r if exact else float(r)
        max_res = max(max_res, res)
    return ZeroTest(zero, max_res, None if zero else worst, all_exact, sampler.n_samples)
