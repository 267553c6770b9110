"""Vector fields on second-order jet space.

A :class:`JetSpace` fixes the base variables ``(t, x_1, ..., x_n)`` and the
dependent variable ``u``.  Generators are :class:`VectorField` objects whose
coefficients are expressions in the base variables and ``u``; ``prolong2``
extends them to first and second derivatives, ``commutator`` forms Lie
brackets and ``flow`` integrates the one-parameter group numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Mapping, Sequence

import numpy as np

from .expr import (
    ZERO,
    Expr,
    Symbol,
    add,
    as_expr,
    base_symbol,
    diff,
    jet_symbol,
    lambdify,
    mul,
    parse,
    power,
    substitute,
)
from .expr.core import var_order


class OrderOverflowError(ValueError):
    """A total derivative would leave second-order jet space."""


class FlowBlowUpError(RuntimeError):
    """The integrated group orbit left every bounded region."""

    def __init__(self, message: str, eps_reached: float):
        super().__init__(message)
        self.eps_reached = eps_reached


@dataclass(frozen=True)
class JetSpace:
    """Second-order jet space over ``t`` and the spatial variables ``space``."""

    space: tuple = ("x",)

    @classmethod
    def of_dimension(cls, n: int) -> "JetSpace":
        if n == 1:
            return cls(("x",))
        if n == 2:
            return cls(("x1", "x2"))
        raise ValueError("only one or two space dimensions are supported")

    @property
    def n(self) -> int:
        return len(self.space)

    @property
    def base(self) -> tuple:
        return ("t",) + tuple(self.space)

    @property
    def base_symbols(self) -> tuple[Symbol, ...]:
        return tuple(base_symbol(v) for v in self.base)

    @property
    def u(self) -> Symbol:
        return jet_symbol(())

    def coord(self, *index: str) -> Symbol:
        for v in index:
            if v not in self.base:
                raise KeyError(f"{v!r} is not a base variable of {self}")
        if len(index) > 2:
            raise OrderOverflowError("jet coordinates are limited to order 2")
        return jet_symbol(index)

    def first(self) -> tuple[Symbol, ...]:
        return tuple(self.coord(v) for v in self.base)

    def second(self) -> tuple[Symbol, ...]:
        return tuple(self.coord(a, b) for a, b in combinations_with_replacement(self.base, 2))

    def coordinates(self) -> tuple[Symbol, ...]:
        return (self.u,) + self.first() + self.second()


def total_derivative(e, direction: str, jet: JetSpace) -> Expr:
    """Total derivative ``D_direction`` of an expression of order at most one."""
    e = as_expr(e)
    jets = [s for s in e.free_symbols if s.kind == "jet"]
    if any(s.order >= 2 for s in jets):
        raise OrderOverflowError(f"D_{direction} of a second-order expression needs order 3")
    terms = [diff(e, base_symbol(direction))]
    for s in jets:
        terms.append(mul(jet.coord(*s.index, direction), diff(e, s)))
    return add(*terms)


@dataclass(frozen=True)
class VectorField:
    """``X = xi^t d_t + sum_i xi^i d_{x_i} + eta d_u``.

    ``xi`` holds one coefficient per base variable of ``jet`` in order.
    """

    jet: JetSpace
    xi: tuple
    eta: Expr

    def __post_init__(self):
        xi = tuple(as_expr(c) for c in self.xi)
        if len(xi) != len(self.jet.base):
            raise ValueError("one xi coefficient per base variable is required")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "eta", as_expr(self.eta))

    @classmethod
    def from_components(cls, jet: JetSpace, **coeffs) -> "VectorField":
        """Build from keyword coefficients, e.g. ``t="2*t", x="x", u="u"``.

        Strings are parsed; missing components are zero.
        """
        unknown = set(coeffs) - set(jet.base) - {"u"}
        if unknown:
            raise KeyError(f"unknown components {sorted(unknown)}")

        def conv(v):
            return parse(v) if isinstance(v, str) else as_expr(v)

        xi = tuple(conv(coeffs.get(v, 0)) for v in jet.base)
        return cls(jet, xi, conv(coeffs.get("u", 0)))

    @property
    def components(self) -> dict:
        out = dict(zip(self.jet.base, self.xi))
        out["u"] = self.eta
        return out

    def coefficients(self) -> tuple:
        return self.xi + (self.eta,)

    def __call__(self, f) -> Expr:
        """Apply the field as a derivation to a function of (t, x, u)."""
        f = as_expr(f)
        terms = [mul(c, diff(f, s)) for c, s in zip(self.xi, self.jet.base_symbols)]
        terms.append(mul(self.eta, diff(f, self.jet.u)))
        return add(*terms)

    def _combine(self, other: "VectorField", a, b) -> "VectorField":
        if other.jet != self.jet:
            raise ValueError("fields live on different jet spaces")
        xi = tuple(add(mul(a, p), mul(b, q)) for p, q in zip(self.xi, other.xi))
        return VectorField(self.jet, xi, add(mul(a, self.eta), mul(b, other.eta)))

    def __add__(self, other):
        return self._combine(other, 1, 1)

    def __sub__(self, other):
        return self._combine(other, 1, -1)

    def scale(self, c) -> "VectorField":
        return VectorField(self.jet, tuple(mul(c, x) for x in self.xi), mul(c, self.eta))

    def __rmul__(self, c):
        return self.scale(c)

    def map(self, fn) -> "VectorField":
        return VectorField(self.jet, tuple(fn(c) for c in self.xi), fn(self.eta))

    def subs(self, bindings: Mapping) -> "VectorField":
        return self.map(lambda c: substitute(c, bindings))

    def is_point(self) -> bool:
        allowed = set(self.jet.base_symbols) | {self.jet.u}
        return all(
            not any(s.kind == "jet" and s not in allowed for s in c.free_symbols)
            for c in self.coefficients()
        )

    def __str__(self) -> str:
        parts = []
        for name, c in self.components.items():
            if c != ZERO:
                parts.append(f"({c})*d_{name}")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class ProlongedField:
    """Second prolongation: ``first[a]`` is the coefficient of d/du_a and
    ``second[(a, b)]`` (a <= b in base order) that of d/du_ab."""

    field: VectorField
    first: dict
    second: dict

    def coefficient(self, s: Symbol) -> Expr:
        if s.order == 1:
            return self.first[s.index[0]]
        if s.order == 2:
            return self.second[s.index]
        raise KeyError(s.name)

    def __call__(self, f) -> Expr:
        """Apply the prolonged field to a function on second-order jet space."""
        f = as_expr(f)
        terms = [self.field(f)]
        for s in f.free_symbols:
            if s.kind == "jet" and s.order >= 1:
                terms.append(mul(self.coefficient(s), diff(f, s)))
        return add(*terms)


def prolong2(X: VectorField) -> ProlongedField:
    """Second prolongation of a point field.

    Uses the recursion ``eta^{Ja} = D_a(eta^J) - sum_b u_{Jb} D_a(xi^b)``,
    which equals the characteristic formula but never leaves order two.
    """
    jet = X.jet
    first = {}
    for a in jet.base:
        terms = [total_derivative(X.eta, a, jet)]
        for b, xb in zip(jet.base, X.xi):
            terms.append(mul(-1, jet.coord(b), total_derivative(xb, a, jet)))
        first[a] = add(*terms)
    second = {}
    for a, c in combinations_with_replacement(jet.base, 2):
        terms = [total_derivative(first[a], c, jet)]
        for b, xb in zip(jet.base, X.xi):
            terms.append(mul(-1, jet.coord(a, b), total_derivative(xb, c, jet)))
        second[tuple(sorted((a, c), key=var_order))] = add(*terms)
    return ProlongedField(X, first, second)


def commutator(X: VectorField, Y: VectorField) -> VectorField:
    """Lie bracket ``[X, Y]`` computed coefficient-wise."""
    if X.jet != Y.jet:
        raise ValueError("fields live on different jet spaces")
    xi = tuple(add(X(q), mul(-1, Y(p))) for p, q in zip(X.xi, Y.xi))
    return VectorField(X.jet, xi, add(X(Y.eta), mul(-1, Y(X.eta))))


# ---------------------------------------------------------------- group flows


def _field_rhs(X: VectorField):
    syms = list(X.jet.base_symbols) + [X.jet.u]
    free = set().union(*(c.free_symbols for c in X.coefficients())) - set(syms)
    if free:
        names = sorted(s.name for s in free)
        raise ValueError(f"flow needs numeric coefficients; unbound {names}")
    fns = [lambdify(c, syms) for c in X.coefficients()]

    def rhs(p):
        return np.array([np.broadcast_to(f(*p), np.shape(p[0])) for f in fns], dtype=float)

    return rhs


def flow(
    X: VectorField,
    point: Sequence,
    eps: float,
    steps: int | None = None,
    substeps_per_unit: int = 64,
    bound: float = 1e8,
) -> np.ndarray:
    """Image of ``point = (t, x..., u)`` under ``exp(eps X)``.

    Classical RK4 with ``ceil(substeps_per_unit * |eps|)`` steps unless
    ``steps`` is given.  ``point`` entries may be arrays of equal shape, in
    which case all orbits are integrated together.
    """
    p = np.array([np.asarray(c, dtype=float) for c in point])
    if eps == 0:
        return p
    rhs = _field_rhs(X)
    n = steps if steps is not None else max(1, math.ceil(substeps_per_unit * abs(eps)))
    h = eps / n
    for i in range(n):
        k1 = rhs(p)
        k2 = rhs(p + 0.5 * h * k1)
        k3 = rhs(p + 0.5 * h * k2)
        k4 = rhs(p + h * k3)
        p = p + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(p)) or np.max(np.abs(p)) > bound:
            raise FlowBlowUpError(
                f"orbit exceeded {bound:g} after eps={(i + 1) * h:.6g}", (i + 1) * h
            )
    return p


# ---------------------------------------------------------------- point transformations


def _det(m: list) -> Expr:
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return add(mul(m[0][0], m[1][1]), mul(-1, m[0][1], m[1][0]))
    terms = []
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        terms.append(mul((-1) ** j, m[0][j], _det(minor)))
    return add(*terms)


def _solve(m: list, rhs: list) -> list:
    """Cramer's rule for ``sum_j m[i][j] p_j = rhs[i]``."""
    d = _det(m)
    inv = power(d, -1)
    out = []
    for j in range(len(m)):
        mj = [row[:j] + [rhs[i]] + row[j + 1 :] for i, row in enumerate(m)]
        out.append(mul(_det(mj), inv))
    return out


@dataclass(frozen=True)
class PointTransform:
    """Change of variables from ``source`` jet space to ``target`` jet space.

    ``base`` gives each target base variable and ``dependent`` the target
    dependent variable as expressions in the source ``(t, x..., u)``.
    """

    source: JetSpace
    target: JetSpace
    base: tuple
    dependent: Expr

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(as_expr(b) for b in self.base))
        object.__setattr__(self, "dependent", as_expr(self.dependent))
        if len(self.base) != len(self.target.base):
            raise ValueError("one expression per target base variable is required")

    def jet_map(self) -> dict:
        """Target jet coordinates (order <= 2) and base variables expressed in
        source jet coordinates."""
        src, tgt = self.source, self.target
        m = [[total_derivative(T, a, src) for T in self.base] for a in src.base]
        firsts = _solve(m, [total_derivative(self.dependent, a, src) for a in src.base])
        out = {tgt.u: self.dependent}
        out.update(dict(zip(tgt.base_symbols, self.base)))
        for v, p in zip(tgt.base, firsts):
            out[tgt.coord(v)] = p
        for j, v in enumerate(tgt.base):
            seconds = _solve(m, [total_derivative(firsts[j], a, src) for a in src.base])
            for w, q in zip(tgt.base, seconds):
                key = tgt.coord(v, w)
                if key not in out:
                    out[key] = q
        return out

    def pullback(self, e) -> Expr:
        """Rewrite a target-space expression in source jet coordinates."""
        return substitute(e, self.jet_map())
