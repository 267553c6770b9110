"""Evolution equations, the invariance condition and the transformation engine.

Two families are represented by :class:`PdeSpec`:

* ``n = 1``: ``u_t = D(u_x) u_xx + Q(u)`` (nondivergence form) or
  ``u_t = (D(u_x) u_x)_x + Q(u)`` (divergence form);
* ``n = 2``: ``u_t = div(D(W) grad u) + Q(u)`` with ``W = |grad u|^2``.

Both lower to an :class:`EvolutionPde` ``u_t = rhs`` on second-order jet
space, which is what the invariance checker and the numerical oracles consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .expr import (
    ZERO,
    Expr,
    Num,
    SamplerConfig,
    Symbol,
    ZeroTest,
    add,
    apply,
    as_expr,
    diff,
    exp,
    is_zero,
    log,
    mul,
    parse,
    power,
    quad,
    render,
    substitute,
    symbol,
)
from .jet import JetSpace, PointTransform, VectorField, prolong2

W = symbol("W")
"""Slot symbol for the squared gradient ``|grad u|^2`` of two-dimensional
diffusivities."""


class CollectionError(ArithmeticError):
    """The invariance expression is not linear in the second derivative."""


@dataclass(frozen=True)
class EvolutionPde:
    """``u_t = rhs`` with ``rhs`` free of ``u_t`` and of time derivatives."""

    jet: JetSpace
    rhs: Expr

    def __post_init__(self):
        object.__setattr__(self, "rhs", as_expr(self.rhs))
        bad = [s.name for s in self.rhs.free_symbols if s.kind == "jet" and "t" in s.index]
        if bad:
            raise ValueError(f"right side may not contain time derivatives: {bad}")

    @property
    def u_t(self) -> Symbol:
        return self.jet.coord("t")

    def residual(self) -> Expr:
        return add(self.u_t, mul(-1, self.rhs))

    def subs(self, bindings: Mapping) -> "EvolutionPde":
        return EvolutionPde(self.jet, substitute(self.rhs, bindings))

    def __str__(self) -> str:
        return f"u_t = {render(self.rhs)}"


def _conv(v, names=None) -> Expr:
    return parse(v, names=names) if isinstance(v, str) else as_expr(v)


@dataclass(frozen=True)
class PdeSpec:
    """One reaction-diffusion equation with gradient-dependent diffusivity.

    ``D`` is an expression in the slot symbol (``u_x`` for ``n = 1`` and
    ``W`` for ``n = 2``); ``Q`` is an expression in ``u``.
    """

    n: int
    D: Expr
    Q: Expr = ZERO
    form: str = "nondivergence"

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError("n must be 1 or 2")
        object.__setattr__(self, "D", _conv(self.D))
        object.__setattr__(self, "Q", _conv(self.Q))
        form = self.form
        if self.n == 2:
            form = "divergence"
        if form not in ("nondivergence", "divergence"):
            raise ValueError(f"unknown form {self.form!r}")
        object.__setattr__(self, "form", form)
        allowed = {self.slot}
        stray = [s.name for s in self.D.free_symbols if s.kind != "param" and s not in allowed]
        if stray:
            raise ValueError(f"D may depend on {self.slot.name} only, found {stray}")
        stray = [s.name for s in self.Q.free_symbols if s.kind != "param" and s.name != "u"]
        if stray:
            raise ValueError(f"Q may depend on u only, found {stray}")

    @classmethod
    def opaque(cls, n: int, with_source: bool = True) -> "PdeSpec":
        """Equation with arbitrary (opaque) diffusivity and source."""
        slot = jet_slot(n)
        Q = apply("Q", [symbol("u")]) if with_source else ZERO
        return cls(n, apply("D", [slot]), Q)

    @property
    def jet(self) -> JetSpace:
        return JetSpace.of_dimension(self.n)

    @property
    def slot(self) -> Symbol:
        return jet_slot(self.n)

    def subs(self, bindings: Mapping) -> "PdeSpec":
        return PdeSpec(self.n, substitute(self.D, bindings), substitute(self.Q, bindings), self.form)

    def gradient_squared(self) -> Expr:
        J = self.jet
        return add(*(power(J.coord(v), 2) for v in J.space))

    def rhs(self) -> Expr:
        J = self.jet
        if self.n == 1:
            ux, uxx = J.coord("x"), J.coord("x", "x")
            coeff = self.D
            if self.form == "divergence":
                coeff = add(self.D, mul(ux, diff(self.D, ux)))
            return add(mul(coeff, uxx), self.Q)
        u1, u2 = J.coord("x1"), J.coord("x2")
        u11, u12, u22 = J.coord("x1", "x1"), J.coord("x1", "x2"), J.coord("x2", "x2")
        omega = self.gradient_squared()
        Dv = substitute(self.D, {W: omega})
        dD = substitute(diff(self.D, W), {W: omega})
        quadratic = add(
            mul(power(u1, 2), u11), mul(2, u1, u2, u12), mul(power(u2, 2), u22)
        )
        return add(mul(Dv, add(u11, u22)), mul(2, dD, quadratic), self.Q)

    def evolution(self) -> EvolutionPde:
        return EvolutionPde(self.jet, self.rhs())

    def residual(self) -> Expr:
        return self.evolution().residual()

    def __str__(self) -> str:
        if self.n == 1 and self.form == "nondivergence":
            return f"u_t = {render(self.rhs())}"
        return f"u_t = div(D grad u) + Q  with  D({self.slot.name}) = {self.D}, Q(u) = {self.Q}"


def jet_slot(n: int) -> Symbol:
    return symbol("u_x") if n == 1 else W


def residual_expr(pde) -> Expr:
    """``u_t - rhs`` in jet coordinates."""
    return as_evolution(pde).residual()


def as_evolution(pde) -> EvolutionPde:
    if isinstance(pde, EvolutionPde):
        return pde
    if isinstance(pde, PdeSpec):
        return pde.evolution()
    raise TypeError(f"expected PdeSpec or EvolutionPde, got {type(pde).__name__}")


# ---------------------------------------------------------------- invariance


def invariance_expression(pde, X: VectorField) -> Expr:
    """Second prolongation of ``X`` applied to the residual, restricted to the
    solution manifold by substituting ``u_t``.

    The time coefficient of ``X`` must depend on ``t`` (and parameters) only,
    which keeps the restricted expression within second order.
    """
    ev = as_evolution(pde)
    if X.jet != ev.jet:
        raise ValueError("generator and equation live on different jet spaces")
    others = {s for s in X.xi[0].free_symbols if s.kind != "param" and s.name != "t"}
    if others:
        names = sorted(s.name for s in others)
        raise ValueError(f"time coefficient may depend on t only, found {names}")
    F = ev.residual()
    E = prolong2(X)(F)
    return substitute(E, {ev.u_t: ev.rhs})


@dataclass
class InvarianceReport:
    passed: bool
    max_residual: float
    witness: dict | None
    exact: bool

    def __bool__(self) -> bool:
        return self.passed


def check_invariance(pde, X: VectorField, sampler: SamplerConfig | None = None) -> InvarianceReport:
    """Randomized check that ``X`` is a point symmetry of ``pde``."""
    verdict = is_zero(invariance_expression(pde, X), sampler or SamplerConfig())
    return InvarianceReport(verdict.zero, verdict.max_residual, verdict.witness, verdict.exact)


# ---------------------------------------------------------------- determining system

PRINTED_COEFFICIENT = parse(
    "(eta[0,1,0](t,x,u) + (eta[0,0,1](t,x,u) - xi1[0,1,0](t,x,u))*u_x"
    " - xi1[0,0,1](t,x,u)*u_x^2)*D'(u_x)"
    " + (xi0'(t) - 2*xi1[0,1,0](t,x,u) - 2*xi1[0,0,1](t,x,u)*u_x)*D(u_x)"
)
PRINTED_REMAINDER = parse(
    "-eta[1,0,0](t,x,u) + (xi0'(t) - eta[0,0,1](t,x,u))*Q(u) + eta(t,x,u)*Q'(u)"
    " + (xi1[1,0,0](t,x,u) + xi1[0,0,1](t,x,u)*Q(u))*u_x"
    " + (eta[0,2,0](t,x,u) + (2*eta[0,1,1](t,x,u) - xi1[0,2,0](t,x,u))*u_x"
    " + (eta[0,0,2](t,x,u) - 2*xi1[0,1,1](t,x,u))*u_x^2 - xi1[0,0,2](t,x,u)*u_x^3)*D(u_x)"
)
"""The two determining equations in their classical printed layout.  The
remainder is read as one sum: the trailing ``+`` of its first line joins the
``D``-bracket of the second line."""


def generic_field() -> VectorField:
    """``xi0(t) d_t + xi1(t,x,u) d_x + eta(t,x,u) d_u`` with opaque coefficients."""
    t, x, u = (symbol(v) for v in ("t", "x", "u"))
    return VectorField(
        JetSpace(("x",)),
        (apply("xi0", [t]), apply("xi1", [t, x, u])),
        apply("eta", [t, x, u]),
    )


@dataclass
class DeterminingSystem:
    """Coefficient of ``u_xx`` and remainder of the invariance expression,
    compared against the printed equations up to ``factor``."""

    coefficient: Expr
    remainder: Expr
    factor: int
    coefficient_match: ZeroTest
    remainder_match: ZeroTest
    reading: str = "remainder read as a single sum across the line break"

    @property
    def matches(self) -> bool:
        return bool(self.coefficient_match) and bool(self.remainder_match)

    def equations(self) -> list[Expr]:
        return [self.coefficient, self.remainder]


def determining_system(
    pde: PdeSpec | None = None,
    X: VectorField | None = None,
    sampler: SamplerConfig | None = None,
) -> DeterminingSystem:
    """Split the invariance condition into the two determining equations.

    Defaults to the one-dimensional class with opaque ``D, Q`` and the generic
    field of :func:`generic_field`.  The returned equations are compared with
    the printed layout; the sign convention there is the negative of the
    restricted invariance expression.
    """
    pde = pde or PdeSpec.opaque(1)
    if pde.n != 1:
        raise ValueError("the determining system is extracted for n = 1")
    X = X or generic_field()
    sampler = sampler or SamplerConfig(n_samples=60)
    E = invariance_expression(pde, X)
    uxx = pde.jet.coord("x", "x")
    coeff = diff(E, uxx)
    if not is_zero(diff(coeff, uxx), sampler):
        raise CollectionError("invariance expression is not linear in u_xx")
    rest = substitute(E, {uxx: ZERO})
    factor = -1
    cm = is_zero(add(mul(factor, coeff), mul(-1, PRINTED_COEFFICIENT)), sampler)
    rm = is_zero(add(mul(factor, rest), mul(-1, PRINTED_REMAINDER)), sampler)
    return DeterminingSystem(mul(factor, coeff), mul(factor, rest), factor, cm, rm)


# ---------------------------------------------------------------- the coefficient ODE


@dataclass(frozen=True)
class CoefficientSolution:
    """General solution of ``(e0 + e1 p - e2 p^2) D' + (e3 - 2 e2 p) D = 0``
    with ``p = u_x``.

    ``D`` contains the free constant ``C``; ``arbitrary`` marks branch (i)
    where every ``D`` solves the equation and ``D`` is the opaque ``D(u_x)``.
    """

    branch: str
    D: Expr
    arbitrary: bool = False
    note: str = ""


C = symbol("C")


def coefficient_ode(e0, e1, e2, e3, D: Expr) -> Expr:
    """Left side of the coefficient ODE for a candidate ``D(u_x)``."""
    p = symbol("u_x")
    e0, e1, e2, e3 = (as_expr(e) for e in (e0, e1, e2, e3))
    lead = add(e0, mul(e1, p), mul(-1, e2, power(p, 2)))
    return add(mul(lead, diff(D, p)), mul(add(e3, mul(-2, e2, p)), D))


def solve_coefficient_ode(e0, e1, e2, e3) -> CoefficientSolution:
    """Closed-form solution of the coefficient ODE, dispatched on which of
    ``e0..e3`` vanish."""
    e0, e1, e2, e3 = (Fraction(e) if not isinstance(e, Fraction) else e for e in (e0, e1, e2, e3))
    p = symbol("u_x")
    if e2 == 0 and e1 == 0 and e0 == 0:
        if e3 == 0:
            return CoefficientSolution("i", apply("D", [p]), arbitrary=True,
                                       note="every diffusivity satisfies the equation")
        return CoefficientSolution("degenerate", ZERO, note="only D = 0 solves e3*D = 0")
    if e2 == 0 and e1 != 0:
        base = add(p, Num(e0 / e1))
        return CoefficientSolution("ii", mul(C, power(base, Num(-e3 / e1))))
    if e2 == 0:
        return CoefficientSolution("iii", mul(C, exp(mul(Num(-e3 / e0), p))))
    if e1 != 0 or e0 != 0:
        s = symbol("s")
        integrand = mul(
            add(mul(2 * e2, s), Num(-e3)),
            power(add(mul(e2, power(s, 2)), mul(-e1, s), Num(-e0)), -1),
        )
        return CoefficientSolution(
            "iv",
            mul(C, exp(mul(-1, quad(integrand, s, 1, p)))),
            note="integral taken from u_x = 1",
        )
    D = mul(C, power(p, -2), exp(mul(Num(-e3 / e2), power(p, -1))))
    note = "exponent -(e3/e2)/u_x"
    if e3 == 0:
        note = "e3 = 0 gives the exceptional D = C u_x^-2"
    return CoefficientSolution("v", D, note=note)


# ---------------------------------------------------------------- equivalence transformations


@dataclass(frozen=True)
class EquivTransform:
    """``t -> alpha t + d0``, ``x -> beta R x + d``, ``u -> gamma u + d3``.

    The reflections flip the sign of the matching scale; ``angle`` is the
    rotation of the plane for ``n = 2``.  On the class the map acts by
    ``D~(p) = (beta^2/alpha) D(beta p/gamma)`` and
    ``Q~(v) = (gamma/alpha) Q((v - d3)/gamma)``.
    """

    alpha: Fraction = Fraction(1)
    beta: Fraction = Fraction(1)
    gamma: Fraction = Fraction(1)
    shifts: tuple = (0, 0, 0, 0)
    angle: float = 0.0
    x_reflection: bool = False
    t_reflection: bool = False
    u_reflection: bool = False

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.alpha * self.beta * self.gamma == 0:
            raise ValueError("alpha*beta*gamma must be nonzero")
        shifts = tuple(Fraction(s) for s in self.shifts) + (Fraction(0),) * (4 - len(self.shifts))
        object.__setattr__(self, "shifts", shifts[:4])

    @property
    def a(self) -> Fraction:
        return -self.alpha if self.t_reflection else self.alpha

    @property
    def b(self) -> Fraction:
        return -self.beta if self.x_reflection else self.beta

    @property
    def c(self) -> Fraction:
        return -self.gamma if self.u_reflection else self.gamma

    def compose(self, first: "EquivTransform") -> "EquivTransform":
        """``self`` after ``first``."""
        d0 = self.a * first.shifts[0] + self.shifts[0]
        ang = self.angle + first.angle
        cs, sn = math.cos(self.angle), math.sin(self.angle)
        fx1, fx2 = first.shifts[1], first.shifts[2]
        if self.angle == 0:
            d1, d2 = self.b * fx1 + self.shifts[1], self.b * fx2 + self.shifts[2]
        else:
            d1 = Fraction(self.b * (cs * float(fx1) - sn * float(fx2))) + self.shifts[1]
            d2 = Fraction(self.b * (sn * float(fx1) + cs * float(fx2))) + self.shifts[2]
        d3 = self.c * first.shifts[3] + self.shifts[3]
        return EquivTransform(self.a * first.a, self.b * first.b, self.c * first.c,
                              (d0, d1, d2, d3), ang)

    def point_transform(self, n: int) -> PointTransform:
        """The change of variables on jet space (rotation must be rational-free
        of angle for symbolic use; only ``angle = 0`` is supported here)."""
        if self.angle != 0:
            raise ValueError("symbolic point transforms need angle = 0")
        J = JetSpace.of_dimension(n)
        t, u = symbol("t"), symbol("u")
        base = [add(mul(self.a, t), self.shifts[0])]
        for i, v in enumerate(J.space):
            base.append(add(mul(self.b, symbol(v)), self.shifts[1 + i]))
        return PointTransform(J, J, tuple(base), add(mul(self.c, u), self.shifts[3]))


def apply_equivalence(pde: PdeSpec, g: EquivTransform) -> PdeSpec:
    """Image of ``pde`` under an equivalence transformation."""
    a, b, c, d3 = g.a, g.b, g.c, g.shifts[3]
    slot, u = pde.slot, symbol("u")
    if pde.n == 1:
        arg = mul(Num(b / c), slot)
    else:
        arg = mul(Num(b * b / (c * c)), slot)
    D = mul(Num(b * b / a), substitute(pde.D, {slot: arg}))
    Q = mul(Num(c / a), substitute(pde.Q, {u: mul(Num(1 / c), add(u, -d3))}))
    return PdeSpec(pde.n, D, Q, pde.form)


@dataclass
class TransformCheck:
    """Pullback of the target residual equals ``factor`` times the source
    residual (``verdict`` decides the difference is zero)."""

    factor: Expr
    verdict: ZeroTest

    def __bool__(self) -> bool:
        return bool(self.verdict)


def verify_transform(
    source, target, T: PointTransform, sampler: SamplerConfig | None = None
) -> TransformCheck:
    """Check that ``T`` maps solutions of ``source`` to solutions of ``target``."""
    src = as_evolution(source)
    tgt = as_evolution(target)
    pulled = T.pullback(tgt.residual())
    factor = diff(pulled, src.u_t)
    verdict = is_zero(add(pulled, mul(-1, factor, src.residual())), sampler or SamplerConfig())
    return TransformCheck(factor, verdict)


# ---------------------------------------------------------------- form-preserving maps

FORM_PRESERVING = ("3-0a", "3-0b", "2", "6")


@dataclass
class FormPreservingResult:
    """Target equation, the explicit change of variables, its inverse
    (source variables in terms of target ones) and the residual check."""

    map_id: str
    source: PdeSpec
    target: PdeSpec
    transform: PointTransform
    inverse: dict
    check: TransformCheck

    def pushforward(self, X: VectorField) -> VectorField:
        """Image of a source generator, written in target variables."""
        T = self.transform
        coeffs = [X(b) for b in T.base] + [X(T.dependent)]
        coeffs = [substitute(c, self.inverse) for c in coeffs]
        return VectorField(T.target, tuple(coeffs[:-1]), coeffs[-1])


def apply_form_preserving(
    pde: PdeSpec,
    map_id: str,
    k=None,
    eps2=None,
    sampler: SamplerConfig | None = None,
) -> FormPreservingResult:
    """Apply one of the form-preserving substitutions.

    ``3-0a`` / ``2`` remove a constant source by ``u -> u - q t``; ``3-0b``
    (``n = 1``) and ``6`` (``n = 2``) use ``tau = exp(c t)/c``,
    ``w = exp(-eps2 t) u`` with ``c = eps2 k`` resp. ``2 eps2 k``, which turns a
    power-law equation with source ``Q`` into one with source
    ``Q(w) - eps2 w``.
    """
    if map_id not in FORM_PRESERVING:
        raise ValueError(f"unknown map {map_id!r}; expected one of {FORM_PRESERVING}")
    expected_n = {"3-0a": 1, "3-0b": 1, "2": 2, "6": 2}[map_id]
    if pde.n != expected_n:
        raise ValueError(f"map {map_id} applies to n = {expected_n}")
    J = pde.jet
    t, u = symbol("t"), symbol("u")
    space = tuple(symbol(v) for v in J.space)
    sampler = sampler or SamplerConfig()
    if map_id in ("3-0a", "2"):
        q = pde.Q
        if any(s.kind != "param" for s in q.free_symbols):
            raise ValueError("constant-source removal needs Q independent of u")
        T = PointTransform(J, J, (t,) + space, add(u, mul(-1, q, t)))
        target = PdeSpec(pde.n, pde.D, ZERO, pde.form)
        inverse = {u: add(u, mul(q, t))}
    else:
        if k is None or eps2 is None:
            raise ValueError(f"map {map_id} needs k and eps2")
        k, eps2 = Fraction(k), Fraction(eps2)
        if k == 0 or eps2 == 0:
            raise ValueError("k and eps2 must be nonzero")
        c = eps2 * k if map_id == "3-0b" else 2 * eps2 * k
        tau = mul(Num(1 / c), exp(mul(c, t)))
        T = PointTransform(J, J, (tau,) + space, mul(exp(mul(-eps2, t)), u))
        moved = mul(
            exp(mul(-eps2 * (c / eps2 + 1), t)),
            add(substitute(pde.Q, {u: mul(exp(mul(eps2, t)), u)}), mul(-eps2, exp(mul(eps2, t)), u)),
        )
        if not is_zero(diff(moved, t), sampler):
            raise ValueError("source does not become autonomous under this map")
        Qt = add(pde.Q, mul(-eps2, u))
        target = PdeSpec(pde.n, pde.D, Qt, pde.form)
        t_of_tau = mul(Num(1 / c), log(mul(c, t)))
        inverse = {t: t_of_tau, u: mul(exp(mul(eps2, t_of_tau)), u)}
    check = verify_transform(pde, target, T, sampler)
    return FormPreservingResult(map_id, pde, target, T, inverse, check)


__all__ = [
    "W", "CollectionError", "EvolutionPde", "PdeSpec", "jet_slot", "residual_expr",
    "as_evolution", "invariance_expression", "InvarianceReport", "check_invariance",
    "PRINTED_COEFFICIENT", "PRINTED_REMAINDER", "generic_field", "DeterminingSystem",
    "determining_system", "CoefficientSolution", "coefficient_ode", "solve_coefficient_ode",
    "EquivTransform", "apply_equivalence", "TransformCheck", "verify_transform",
    "FORM_PRESERVING", "FormPreservingResult", "apply_form_preserving",
]
