"""Radial reduction, similarity reductions to ODEs, exact solutions and
hodograph linearizations for ``u_t = div(|grad u|^{2k} grad u)``.

Every reduced ODE is obtained by substituting the ansatz into the radial
equation and normalizing; the printed forms are only used as cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, interpolate, optimize

from .expr import (
    PARAM,
    DomainError,
    Expr,
    Num,
    SamplerConfig,
    Symbol,
    ZeroTest,
    add,
    apply,
    as_expr,
    diff,
    evaluate,
    exp,
    is_zero,
    lambdify,
    log,
    mul,
    parse,
    power,
    render,
    substitute,
    symbol,
)
from .jet import JetSpace, PointTransform, VectorField
from .pde import EvolutionPde, PdeSpec, TransformCheck, verify_transform

T, R, X, U = symbol("t"), symbol("r"), symbol("x"), symbol("u")
OMEGA = Symbol("omega", PARAM)
PHI = Symbol("phi", PARAM)
DPHI = Symbol("phi'", PARAM)
DDPHI = Symbol("phi''", PARAM)
_P = (PHI, DPHI, DDPHI)

RADIAL_JET = JetSpace(("r",))
U_R, U_RR, U_T = RADIAL_JET.coord("r"), RADIAL_JET.coord("r", "r"), RADIAL_JET.coord("t")


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(str(v)) if isinstance(v, float) else Fraction(v)


def _exclude(k: Fraction, excluded: Sequence, what: str = "k"):
    if k in excluded:
        shown = ", ".join(str(e) for e in excluded)
        raise ValueError(f"{what} = {k} is excluded (not in {{{shown}}})")


# ---------------------------------------------------------------- radial reduction


def radial_rhs(k, sign: int = 1) -> Expr:
    """Right side of ``U_t = (1/r)(r U_r^{2k+1})_r`` in radial jet coordinates.

    ``sign = -1`` gives the branch ``U_r < 0``,
    ``U_t = -(1/r)(r (-U_r)^{2k+1})_r``.
    """
    k = _frac(k)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    p = mul(sign, U_R)
    flux_over_r = mul(power(p, 2 * k + 1), power(R, -1))
    return mul(sign, add(flux_over_r, mul(2 * k + 1, power(p, 2 * k), sign, U_RR)))


def radial_pde(k, sign: int = 1) -> EvolutionPde:
    return EvolutionPde(RADIAL_JET, radial_rhs(k, sign))


@dataclass(frozen=True)
class RadialReduction:
    """The radial equation together with the check that the rotation-invariant
    ansatz maps the planar residual onto it."""

    k: Fraction
    sign: int
    pde: EvolutionPde
    witness: ZeroTest

    def __str__(self) -> str:
        return f"U_t = {render(self.pde.rhs)}"


def radial_reduce(k, sign: int = 1, sampler: SamplerConfig | None = None) -> RadialReduction:
    """Reduce the planar power-law equation by ``u(t, x1, x2) = U(t, r)``.

    The witness compares the planar residual, with first and second
    derivatives of ``u`` written through ``U_r``, ``U_rr`` and
    ``r = sqrt(x1^2 + x2^2)``, against the radial residual.
    """
    k = _frac(k)
    _exclude(k, (Fraction(0), Fraction(-1, 2)))
    planar = PdeSpec(2, power(symbol("W"), k))
    J = planar.jet
    x1, x2 = symbol("x1"), symbol("x2")
    r = power(add(power(x1, 2), power(x2, 2)), Fraction(1, 2))
    inv_r = power(r, -1)
    n1, n2 = mul(x1, inv_r), mul(x2, inv_r)
    tang = mul(U_R, inv_r)
    chain = {
        J.coord("t"): U_T,
        J.coord("x1"): mul(U_R, n1),
        J.coord("x2"): mul(U_R, n2),
        J.coord("x1", "x1"): add(mul(U_RR, n1, n1), mul(tang, add(1, mul(-1, n1, n1)))),
        J.coord("x2", "x2"): add(mul(U_RR, n2, n2), mul(tang, add(1, mul(-1, n2, n2)))),
        J.coord("x1", "x2"): mul(add(U_RR, mul(-1, tang)), n1, n2),
    }
    pde = radial_pde(k, sign)
    lhs = substitute(planar.residual(), chain)
    rhs = substitute(pde.residual(), {R: r})
    sampler = sampler or SamplerConfig()
    if sign < 0:
        sampler = sampler.with_ranges(u_r=(Fraction(-2), Fraction(-1, 2)))
    witness = is_zero(add(lhs, mul(-1, rhs)), sampler)
    return RadialReduction(k, sign, pde, witness)


def radial_algebra(k) -> dict[str, VectorField]:
    """The four generators admitted by the radial equation."""
    k = _frac(k)
    J = RADIAL_JET
    return {
        "X0": VectorField.from_components(J, u=1),
        "X1": VectorField.from_components(J, t=1),
        "D0": VectorField.from_components(J, t=mul(2 * (k + 1), T), r=R),
        "D1": VectorField.from_components(J, r=mul(k, R), u=mul(k + 1, U)),
    }


# ---------------------------------------------------------------- reductions to ODEs

REDUCTION_CASES = ("i", "ii", "iii", "iii-l0", "iv")

_PRINTED_ODE = {
    "i": "(2*k + 1)*omega*dphi^(2*k)*ddphi + dphi^(2*k + 1)",
    "ii": "(2*k + 1)*ddphi + omega^-1*dphi + 1/(2*(k + 1))*dphi^(1 - 2*k)"
          " - lam/(2*(k + 1))*dphi^(-2*k)",
    "iii": "(2*k + 1)*ddphi + omega^-1*dphi + k/lam*omega*dphi^(1 - 2*k)"
           " - (k + 1)/lam*phi*dphi^(-2*k)",
    "iii-l0": "dphi - ((3*k + 1)/k)*((k + 1)/k)^(1 + 2*k)*phi^(1 + 2*k)",
    "iv": "(2*k + 1)*ddphi + omega^-1*dphi + gam*omega*dphi^(1 - 2*k)"
          " - lam/2*phi*dphi^(-2*k)",
}

_GENERATOR = {
    "i": "X1",
    "ii": "D0 + lam*X0",
    "iii": "D1 + lam*X1",
    "iii-l0": "D1",
    "iv": "D0 + lam*D1",
}


def _ansatz(case: str, k: Fraction, lam: Fraction):
    """``(U, argument of phi, r in terms of (t, omega), variable, other)``.

    ``variable`` is the independent variable of the reduced ODE and ``other``
    the one that must drop out.
    """
    if case == "i":
        return apply("phi", [R]), R, OMEGA, OMEGA, T
    if case == "ii":
        a = Fraction(1, 2) / (k + 1)
        om = mul(R, power(T, -a))
        U_ = add(mul(lam * a, log(T)), apply("phi", [om]))
        return U_, om, mul(OMEGA, power(T, a)), OMEGA, T
    if case == "iii":
        om = mul(R, exp(mul(-k / lam, T)))
        U_ = mul(exp(mul((k + 1) / lam, T)), apply("phi", [om]))
        return U_, om, mul(OMEGA, exp(mul(k / lam, T))), OMEGA, T
    if case == "iii-l0":
        U_ = mul(power(R, (k + 1) / k), apply("phi", [T]))
        return U_, T, R, T, R
    if case == "iv":
        gam = (1 + lam * k) / (2 * (k + 1))
        om = mul(R, power(T, -gam))
        U_ = mul(power(T, lam / 2), apply("phi", [om]))
        return U_, om, mul(OMEGA, power(T, gam)), OMEGA, T
    raise ValueError(f"unknown case {case!r}; expected one of {REDUCTION_CASES}")


def _display_basis(case: str, k: Fraction, var: Symbol) -> list[Expr]:
    if case == "iii-l0":
        return [DPHI, power(PHI, 1 + 2 * k)]
    return [
        DDPHI,
        mul(DPHI, power(var, -1)),
        mul(var, power(DPHI, 1 - 2 * k)),
        power(DPHI, -2 * k),
        mul(PHI, power(DPHI, -2 * k)),
    ]


def _fit(ode: Expr, basis: list[Expr], lead: Fraction, var: Symbol, seed: int = 7):
    """Rational coefficients ``c`` with ``ode == lead*basis[0] + sum c_i basis_i``
    found by least squares on sampled points; ``None`` if no exact fit."""
    rng = np.random.default_rng(seed)
    rows, rhs = [], []
    syms = [var, PHI, DPHI, DDPHI]
    for _ in range(3 * len(basis)):
        vals = {s: Fraction(int(rng.integers(600, 1900)), 1000) for s in syms}
        try:
            target = float(evaluate(ode, vals)) - float(lead) * float(evaluate(basis[0], vals))
            rows.append([float(evaluate(b, vals)) for b in basis[1:]])
        except (DomainError, ZeroDivisionError, KeyError):
            continue
        rhs.append(target)
    coef, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    cs = [Fraction(c).limit_denominator(10**6) for c in coef]
    fitted = add(mul(lead, basis[0]), *(mul(c, b) for c, b in zip(cs, basis[1:])))
    return fitted if is_zero(add(ode, mul(-1, fitted))) else None


@dataclass(frozen=True)
class ReductionCase:
    """One similarity reduction, fully instantiated at ``(k, lam)``.

    ``ode`` is the machine-derived reduced equation (``ode = 0``), scaled so
    that the highest derivative has coefficient ``2k + 1`` (second order) or
    ``1`` (first order).  ``printed`` is the published form under the same
    normalization (``printed_raw`` as published) and
    ``discrepancy = ode - printed``.
    """

    id: str
    k: Fraction
    lam: Fraction
    generator: str
    ansatz: str
    variable: Symbol
    order: int
    ode: Expr
    printed: Expr
    printed_raw: Expr
    reduces: ZeroTest
    matches_printed: bool
    discrepancy: Expr

    @property
    def gamma(self) -> Fraction | None:
        if self.id != "iv":
            return None
        return (1 + self.lam * self.k) / (2 * (self.k + 1))

    def ode_string(self) -> str:
        return f"{render(self.ode)} = 0"

    def printed_string(self) -> str:
        return f"{render(self.printed_raw)} = 0"

    def highest_derivative(self) -> Expr:
        """The solved form ``phi^(order) = F(variable, phi, ...)``."""
        top = _P[self.order]
        lead = diff(self.ode, top)
        rest = add(self.ode, mul(-1, lead, top))
        return mul(-1, rest, power(lead, -1))

    def rhs_function(self) -> Callable:
        """First-order system ``y' = f(s, y)`` with ``y = (phi, ..., phi^(order-1))``."""
        F = lambdify(self.highest_derivative(), [self.variable, *_P[: self.order]])
        order = self.order

        def f(s, y):
            y = np.asarray(y, dtype=float)
            top = float(F(s, *y[:order]))
            return np.concatenate([y[1:order], [top]])

        return f

    def as_dict(self) -> dict:
        return {
            "case": self.id,
            "k": str(self.k),
            "lambda": str(self.lam),
            "generator": self.generator,
            "ansatz": self.ansatz,
            "ode": self.ode_string(),
            "printed": self.printed_string(),
            "reduces": self.reduces.zero,
            "matches_printed": self.matches_printed,
            "discrepancy": None if self.matches_printed else render(self.discrepancy),
        }


_ANSATZ_TEXT = {
    "i": "U = phi(omega), omega = r",
    "ii": "U = lam/(2(k+1)) log t + phi(omega), omega = r t^(-1/(2(k+1)))",
    "iii": "U = exp((k+1) t/lam) phi(omega), omega = r exp(-k t/lam)",
    "iii-l0": "U = r^((k+1)/k) phi(t)",
    "iv": "U = t^(lam/2) phi(omega), omega = r t^(-gam), gam = (1 + lam k)/(2(k+1))",
}


def reduce_to_ode(case: str, k, lam=0, sampler: SamplerConfig | None = None) -> ReductionCase:
    """Substitute the case's ansatz into the radial equation and normalize.

    Raises ``ValueError`` for excluded parameters and when the ansatz does
    not reduce (the other variable fails to drop out).
    """
    k, lam = _frac(k), _frac(lam)
    _exclude(k, (Fraction(0), Fraction(-1), Fraction(-1, 2)))
    if case in ("iii", "iv") and lam == 0:
        raise ValueError(f"case {case} needs lam != 0")
    if case in ("i", "iii-l0"):
        lam = Fraction(0)
    U_, arg, r_of, var, other = _ansatz(case, k, lam)
    order = 1 if case == "iii-l0" else 2
    Ur = diff(U_, R)
    bind = {U_T: diff(U_, T), U_R: Ur, U_RR: diff(Ur, R)}
    residual = substitute(radial_pde(k).residual(), bind)
    plug = {apply("phi", [arg], [i]): p for i, p in enumerate(_P)}
    plug[R] = r_of
    residual = substitute(residual, plug)
    top = _P[order]
    lead = 2 * k + 1 if order == 2 else Fraction(1)
    normalized = mul(lead, residual, power(diff(residual, top), -1))
    pinned = substitute(normalized, {other: 1})
    sampler = sampler or SamplerConfig()
    reduces = is_zero(add(normalized, mul(-1, pinned)), sampler)
    if not reduces:
        raise ValueError(f"ansatz of case {case} does not reduce the radial equation")
    fitted = _fit(pinned, _display_basis(case, k, var), lead, var)
    ode = fitted if fitted is not None else pinned
    names = {"k": Num(k), "lam": Num(lam), "omega": OMEGA if var is OMEGA else T,
             "phi": PHI, "dphi": DPHI, "ddphi": DDPHI}
    if case == "iv":
        names["gam"] = Num((1 + lam * k) / (2 * (k + 1)))
    raw = parse(_PRINTED_ODE[case], names=names)
    if case == "i":
        raw = substitute(raw, {OMEGA: var})
    printed = mul(lead, raw, power(diff(raw, top), -1))
    discrepancy = add(ode, mul(-1, printed))
    matches = is_zero(discrepancy, sampler).zero
    return ReductionCase(
        case, k, lam, _GENERATOR[case], _ANSATZ_TEXT[case], var, order,
        ode, printed, raw, reduces, matches, discrepancy,
    )


# ---------------------------------------------------------------- Bernoulli family

_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


@dataclass
class BernoulliSolution:
    """Closed-form solutions of the case-(ii) ODE at ``lam = 0``.

    ``phi(omega) = int_{omega_ref}^{omega} z(s)^{1/(2k)} ds + C2`` with
    ``z = (-k s^2 + C1 s^{-2k/(2k+1)}) / (2(k+1)(3k+1))``.  Integrals are
    cached at the nodes of a fixed mesh (adaptive quadrature, absolute
    tolerance 1e-10) and completed with 20-point Gauss-Legendre inside a
    cell.
    """

    k: Fraction
    C1: Fraction
    C2: Fraction
    omega_ref: float
    radicand: Expr
    checks: dict
    mesh: np.ndarray = field(repr=False)
    cumulative: np.ndarray = field(repr=False)
    _z: Callable = field(repr=False)

    def z(self, omega) -> np.ndarray:
        return self._z(np.asarray(omega, dtype=float))

    def dphi(self, omega) -> np.ndarray:
        z = self.z(omega)
        if np.any(~(z > 0)):
            raise DomainError("radicand is not positive at some requested points")
        return z ** (1.0 / (2 * float(self.k)))

    def phi(self, omega) -> np.ndarray:
        om = np.asarray(omega, dtype=float)
        lo, hi = self.mesh[0], self.mesh[-1]
        if np.any((om < lo) | (om > hi)):
            raise DomainError(f"omega outside the cached mesh [{lo}, {hi}]")
        j = np.clip(np.searchsorted(self.mesh, om, side="right") - 1, 0, len(self.mesh) - 2)
        a = self.mesh[j]
        half = 0.5 * (om - a)
        nodes = a[..., None] + half[..., None] * (_GL_X + 1.0)
        vals = self.dphi(nodes)
        return self.cumulative[j] + half * (vals @ _GL_W) + float(self.C2)

    def omega(self, t, r) -> np.ndarray:
        return np.asarray(r, dtype=float) * np.asarray(t, dtype=float) ** (-0.5 / (float(self.k) + 1))

    def __call__(self, t, r) -> np.ndarray:
        return self.phi(self.omega(t, r))


def _bernoulli_z(k: Fraction, C1: Fraction, var: Expr) -> Expr:
    den = 2 * (k + 1) * (3 * k + 1)
    return mul(Fraction(1) / den, add(mul(-k, power(var, 2)), mul(C1, power(var, -2 * k / (2 * k + 1)))))


def bernoulli_closed_form(
    k, C1, C2=0, omega_range: tuple = (0.5, 4.0), cells: int = 64,
    sampler: SamplerConfig | None = None,
) -> BernoulliSolution:
    """Closed-form family of the corrected case-(ii) ODE with ``lam = 0``.

    The checks confirm symbolically that ``z = (phi')^{2k}`` solves the
    linearized equation ``(2k+1) z' + 2k z/omega + k omega/(k+1) = 0``, that
    ``phi' = z^{1/(2k)}`` solves the machine-derived first-order equation
    and whether it also solves the printed first-order equation.
    """
    k, C1, C2 = _frac(k), _frac(C1), _frac(C2)
    _exclude(k, (Fraction(0), Fraction(-1, 2), Fraction(-1), Fraction(-1, 3)))
    sampler = sampler or SamplerConfig()
    z = _bernoulli_z(k, C1, OMEGA)
    Y = Symbol("y", PARAM)
    linear = add(mul(2 * k + 1, diff(z, OMEGA)), mul(2 * k, z, power(OMEGA, -1)),
                 mul(k / (k + 1), OMEGA))
    y = power(z, Fraction(1) / (2 * k))
    derived = reduce_to_ode("ii", k, 0, sampler)
    first_order = substitute(derived.ode, {DDPHI: diff(y, OMEGA), DPHI: y})
    printed_first = parse(
        "(2*k + 1)*dy + omega^-1*y + 1/(2*(k + 1))*y^(1 - 2*k)",
        names={"k": Num(k), "omega": OMEGA, "y": Y, "dy": Symbol("dy", PARAM)},
    )
    printed_first = substitute(printed_first, {Symbol("dy", PARAM): diff(y, OMEGA), Y: y})
    lo, hi = float(omega_range[0]), float(omega_range[1])
    # sample where the radicand is positive
    zf = lambdify(z, [OMEGA])
    grid = np.linspace(lo, hi, 33)
    if np.any(~(zf(grid) > 0)):
        raise DomainError(f"radicand is not positive on omega in [{lo}, {hi}]")
    rng = (Fraction(lo).limit_denominator(1000), Fraction(hi).limit_denominator(1000))
    s = sampler.with_ranges(omega=rng)
    checks = {
        "linearized": is_zero(linear, s),
        "derived_ode": is_zero(first_order, s),
        "printed_ode": is_zero(printed_first, s),
    }
    omega_ref = 0.0 if C1 == 0 and 1 / k > -1 else 1.0
    if omega_ref != 0.0:
        ref_grid = np.linspace(min(lo, omega_ref), max(hi, omega_ref), 33)
        if np.any(~(zf(ref_grid) > 0)):
            raise DomainError("radicand is not positive between the reference point and the mesh")
    mesh = np.linspace(lo, hi, cells + 1)
    p = 1.0 / (2 * float(k))

    def integrand(s_):
        return float(zf(s_)) ** p

    cum = np.empty(cells + 1)
    cum[0], _ = integrate.quad(integrand, omega_ref, lo, epsabs=1e-10, epsrel=1e-13, limit=200)
    for j in range(cells):
        piece, _ = integrate.quad(integrand, mesh[j], mesh[j + 1], epsabs=1e-10, epsrel=1e-13)
        cum[j + 1] = cum[j] + piece
    return BernoulliSolution(k, C1, C2, omega_ref, z, checks, mesh, cum, zf)


# ---------------------------------------------------------------- exact solutions

EXACT_FAMILIES = ("4-15", "4-16", "4-17", "4-11-closed")


@dataclass
class ExactSolution:
    """Evaluator ``(t, r) -> u`` of a closed-form solution of the planar
    power-law equation (radially symmetric), with its symbolic checks.

    ``expr`` is the closed form in ``t`` and ``r`` when there is one.
    """

    family: str
    params: dict
    expr: Expr | None
    checks: dict
    _eval: Callable = field(repr=False)

    def evaluate(self, t, r, strict: bool = True) -> np.ndarray:
        """Values at ``(t, r)``; points outside the domain are NaN unless
        ``strict``, in which case they raise ``DomainError``."""
        t, r = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(r, dtype=float))
        with np.errstate(all="ignore"):
            try:
                out = np.asarray(self._eval(t, r), dtype=float)
            except DomainError:
                if strict:
                    raise
                out = np.array([self._point(a, b) for a, b in zip(t.ravel(), r.ravel())])
                out = out.reshape(t.shape)
        bad = ~np.isfinite(out)
        if strict and np.any(bad):
            raise DomainError(f"{int(bad.sum())} points outside the domain of family {self.family}")
        return out

    def _point(self, t, r) -> float:
        try:
            return float(self._eval(np.array(t), np.array(r)))
        except DomainError:
            return float("nan")

    def __call__(self, t, r) -> np.ndarray:
        return self.evaluate(t, r)

    def planar(self, t, x1, x2, strict: bool = True) -> np.ndarray:
        """The same solution as a function of ``(t, x1, x2)``."""
        return self.evaluate(t, np.hypot(x1, x2), strict)

    def profile_text(self, t, r, delimiter: str = "\t") -> str:
        """Sampled profile as delimited text with columns ``t, r, u``."""
        t, r = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(r, dtype=float))
        u = self.evaluate(t, r, strict=False)
        lines = [delimiter.join(("t", "r", "u"))]
        for a, b, c in zip(t.ravel(), r.ravel(), u.ravel()):
            lines.append(delimiter.join(repr(float(v)) for v in (a, b, c)))
        return "\n".join(lines) + "\n"

    def write_profile(self, path, t, r, delimiter: str = "\t") -> None:
        with open(path, "w") as fh:
            fh.write(self.profile_text(t, r, delimiter))


def read_profile(path, delimiter: str = "\t") -> np.ndarray:
    """Inverse of :meth:`ExactSolution.write_profile`; rows of ``(t, r, u)``."""
    return np.loadtxt(path, delimiter=delimiter, skiprows=1, ndmin=2)


def _closed(family: str, params: dict, e: Expr, checks: dict) -> ExactSolution:
    f = lambdify(e, [T, R])
    return ExactSolution(family, params, e, checks, lambda t, r: f(t, r))


def _family_4_16_profile(lam: Fraction, C2: Fraction, sign: int) -> Expr:
    b = Fraction(2) / (3 * lam) ** 3
    return mul(2 * sign, power(add(C2, mul(-b, power(OMEGA, 4))), Fraction(-1, 2)))


def _radial_residual_of(e: Expr, k: Fraction) -> Expr:
    Ur = diff(e, R)
    bind = {U_T: diff(e, T), U_R: Ur, U_RR: diff(Ur, R)}
    return substitute(radial_pde(k).residual(), bind)


def exact_solution(family: str, sampler: SamplerConfig | None = None, **params) -> ExactSolution:
    """Build one of the exact-solution families.

    ``4-15``: ``k, C1, C2`` (quadrature based, see :func:`bernoulli_closed_form`);
    ``4-16``: ``lam, C2, sign`` (``k = -1/3``; profile composed with the
    case-(iii) ansatz); ``4-17``: ``lam, C2, sign, variant`` with variant
    ``"derived"`` (exponent ``-4t/(3 lam)``) or ``"printed"`` (``-2t/(3 lam)``);
    ``4-11-closed``: ``k, phi0``.
    """
    sampler = sampler or SamplerConfig()
    if family == "4-15":
        k, C1, C2 = _frac(params["k"]), _frac(params.get("C1", 0)), _frac(params.get("C2", 0))
        kw = {n: params[n] for n in ("omega_range", "cells") if n in params}
        sol = bernoulli_closed_form(k, C1, C2, sampler=sampler, **kw)
        return ExactSolution(family, {"k": k, "C1": C1, "C2": C2}, None, dict(sol.checks), sol)
    if family in ("4-16", "4-17"):
        k = Fraction(-1, 3)
        lam = _frac(params.get("lam", 1))
        C2 = _frac(params.get("C2", 1))
        sign = int(params.get("sign", 1))
        if lam == 0:
            raise ValueError("lam must be nonzero")
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        phi = _family_4_16_profile(lam, C2, sign)
        if family == "4-16":
            d1 = diff(phi, OMEGA)
            first_integral = add(d1, mul(-1, power(mul(OMEGA, phi, Fraction(1) / (3 * lam)), 3)))
            case = reduce_to_ode("iii", k, lam, sampler)
            ode = substitute(case.ode, {PHI: phi, DPHI: d1, DDPHI: diff(d1, OMEGA)})
            bound = float((Fraction(C2) * (3 * lam) ** 3 / 2)) ** 0.25 if C2 * lam ** 3 > 0 else None
            s = sampler
            if bound is not None:
                s = sampler.with_ranges(omega=(Fraction(1, 10), Fraction(bound * 0.9).limit_denominator(1000)))
            checks = {"first_integral": is_zero(first_integral, s)}
            if sign * lam > 0:
                # phi' has the sign of sign*lam; the fractional powers need phi' > 0
                checks["reduced_ode"] = is_zero(ode, s)
            U_ = substitute(phi, {OMEGA: mul(R, exp(mul(-k / lam, T)))})
            U_ = mul(exp(mul((k + 1) / lam, T)), U_)
            return _closed(family, {"lam": lam, "C2": C2, "sign": sign}, U_, checks)
        variant = params.get("variant", "derived")
        if variant not in ("derived", "printed"):
            raise ValueError("variant must be 'derived' or 'printed'")
        a = 4 if variant == "derived" else 2
        b = Fraction(2) / (3 * lam) ** 3
        inner = add(mul(C2, exp(mul(Fraction(-a) / (3 * lam), T))), mul(-b, power(R, 4)))
        U_ = mul(2 * sign, power(inner, Fraction(-1, 2)))
        checks = {}
        if sign * lam > 0:
            s = sampler.with_ranges(r=(Fraction(1, 10), Fraction(1, 2)), t=(Fraction(0), Fraction(1, 2)))
            checks["radial_residual"] = is_zero(_radial_residual_of(U_, k), s)
        return _closed(family, {"lam": lam, "C2": C2, "sign": sign, "variant": variant}, U_, checks)
    if family == "4-11-closed":
        k, phi0 = _frac(params["k"]), _frac(params.get("phi0", Fraction(1, 10)))
        _exclude(k, (Fraction(0), Fraction(-1), Fraction(-1, 2)))
        A = mul((3 * k + 1) / k, power(Num((k + 1) / k), 1 + 2 * k))
        phi = power(add(power(Num(phi0), -2 * k), mul(-2 * k, A, T)), Fraction(-1) / (2 * k))
        ode = add(diff(phi, T), mul(-1, A, power(phi, 1 + 2 * k)))
        U_ = mul(power(R, (k + 1) / k), phi)
        A_val = float(evaluate(A, {}))
        s = sampler
        if k * A_val > 0:
            # finite-time blow-up at phi0^{-2k}/(2kA); sample well before it
            t_end = float(phi0) ** (-2 * float(k)) / (2 * float(k) * A_val)
            s = sampler.with_ranges(t=(Fraction(0), Fraction(t_end / 2).limit_denominator(10**6)))
        checks = {"separable_ode": is_zero(ode, s), "radial_residual": is_zero(_radial_residual_of(U_, k), s)}
        out = _closed(family, {"k": k, "phi0": phi0}, U_, checks)
        out.params["A"] = A
        return out
    raise ValueError(f"unknown family {family!r}; expected one of {EXACT_FAMILIES}")


# ---------------------------------------------------------------- hodograph maps


def _invert(fn: Callable, target, bracket: tuple, t) -> float:
    lo, hi = bracket
    return optimize.brentq(lambda s: fn(t, s) - target, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def _monotone(values: np.ndarray) -> int:
    d = np.diff(values)
    if np.all(d > 0):
        return 1
    if np.all(d < 0):
        return -1
    return 0


@dataclass(frozen=True)
class Hodograph1D:
    """Interchange of ``x`` and ``u`` for ``u_t = u_x^-2 u_xx + Q(u)``.

    ``linear`` is ``w_t = w_uu - Q(u) w_u`` written on jet space with ``x``
    standing for the old ``u`` and ``u`` for the old ``x``; ``transform`` maps
    ``(t, x, u) -> (t, u, x)`` and ``check`` confirms that it carries the
    residual of one equation to a multiple of the other.
    """

    Q: Expr
    source: PdeSpec
    linear: EvolutionPde
    transform: PointTransform
    check: TransformCheck

    def linear_residual(self, w) -> Expr:
        """``w_t - w_uu + Q(u) w_u`` for a closed form ``w(t, u)``."""
        w = as_expr(w)
        return add(diff(w, T), mul(-1, diff(diff(w, U), U)), mul(self.Q, diff(w, U)))

    def inverse_of(self, w, bracket: tuple, samples: int = 64) -> Callable:
        """``u(t, x)`` defined by ``x = w(t, u)`` for ``u`` in ``bracket``.

        ``w`` is a closed-form expression in ``(t, u)`` or a vectorized
        callable.  Strict monotonicity in ``u`` is checked on ``samples``
        points at every requested time; non-monotone ``w`` raises
        ``ValueError``.
        """
        fn = lambdify(as_expr(w), [T, U]) if not callable(w) else w
        grid = np.linspace(bracket[0], bracket[1], samples)

        def u_of(t, x):
            t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
            out = np.empty(t.shape)
            for tv in np.unique(t):
                if _monotone(np.asarray(fn(tv, grid), dtype=float)) == 0:
                    raise ValueError(f"w is not strictly monotone in u at t = {tv}")
                sel = t == tv
                out[sel] = [_safe_invert(fn, xv, bracket, tv) for xv in x[sel]]
            return out

        return u_of


def _safe_invert(fn, target, bracket, t) -> float:
    try:
        return _invert(fn, target, bracket, t)
    except ValueError:
        return float("nan")


def hodograph_1d(Q="Q(u)", sampler: SamplerConfig | None = None) -> Hodograph1D:
    """Linearizing hodograph map of ``u_t = u_x^-2 u_xx + Q(u)``."""
    Qe = parse(Q) if isinstance(Q, str) else as_expr(Q)
    source = PdeSpec(1, "u_x^-2", Qe)
    J = source.jet
    ux, uxx = J.coord("x"), J.coord("x", "x")
    linear = EvolutionPde(J, add(uxx, mul(-1, substitute(Qe, {U: X}), ux)))
    Tm = PointTransform(J, J, (T, U), X)
    check = verify_transform(source, linear, Tm, sampler)
    return Hodograph1D(Qe, source, linear, Tm, check)


def invert_sampled(w: Callable, u_nodes: np.ndarray) -> Callable:
    """Grid inversion of a sampled solution ``w(t, u)`` of the linear equation.

    At each requested time ``w`` is sampled on ``u_nodes`` and ``u(t, x)`` is
    read off by monotone (PCHIP) interpolation.  Non-monotone samples raise
    ``ValueError``; ``x`` outside the sampled range gives NaN.
    """
    u_nodes = np.asarray(u_nodes, dtype=float)

    def u_of(t, x):
        t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
        out = np.empty(t.shape)
        for tv in np.unique(t):
            row = np.asarray(w(tv, u_nodes), dtype=float)
            direction = _monotone(row)
            if direction == 0:
                raise ValueError(f"sampled w is not strictly monotone at t = {tv}")
            xs, us = (row, u_nodes) if direction > 0 else (row[::-1], u_nodes[::-1])
            f = interpolate.PchipInterpolator(xs, us, extrapolate=False)
            sel = t == tv
            out[sel] = f(x[sel])
        return out

    return u_of


@dataclass(frozen=True)
class RadialHodograph:
    """``r = sqrt(V), U = z`` between ``U_t = (1/r)(r U_r^-1)_r`` and
    ``V_t = -V_zz``."""

    source: EvolutionPde
    target: EvolutionPde
    transform: PointTransform
    check: TransformCheck

    def linear_residual(self, V) -> Expr:
        """``V_t + V_zz`` for a closed form ``V(t, z)``."""
        V = as_expr(V)
        z = symbol("z")
        return add(diff(V, T), diff(diff(V, z), z))

    def solution_from(self, V, bracket: tuple, samples: int = 64) -> Callable:
        """``U(t, r)`` defined by ``r^2 = V(t, U)`` for ``U`` in ``bracket``.

        ``V`` must be positive and strictly monotone in ``z`` on the bracket.
        """
        fn = lambdify(as_expr(V), [T, symbol("z")]) if not callable(V) else V
        grid = np.linspace(bracket[0], bracket[1], samples)

        def U_of(t, r):
            t, r = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(r, dtype=float))
            out = np.empty(t.shape)
            for tv in np.unique(t):
                vals = np.asarray(fn(tv, grid), dtype=float)
                if np.any(vals <= 0):
                    raise DomainError(f"V is not positive on the bracket at t = {tv}")
                if _monotone(vals) == 0:
                    raise ValueError(f"V is not strictly monotone in z at t = {tv}")
                sel = t == tv
                out[sel] = [_safe_invert(fn, rv * rv, bracket, tv) for rv in r[sel]]
            return out

        return U_of


def radial_hodograph(sampler: SamplerConfig | None = None) -> RadialHodograph:
    source = radial_pde(-1)
    target_jet = JetSpace(("z",))
    target = EvolutionPde(target_jet, mul(-1, target_jet.coord("z", "z")))
    Tm = PointTransform(RADIAL_JET, target_jet, (T, U), power(R, 2))
    check = verify_transform(source, target, Tm, sampler)
    return RadialHodograph(source, target, Tm, check)


__all__ = [
    "OMEGA", "PHI", "DPHI", "DDPHI", "RADIAL_JET",
    "radial_rhs", "radial_pde", "RadialReduction", "radial_reduce", "radial_algebra",
    "REDUCTION_CASES", "ReductionCase", "reduce_to_ode",
    "BernoulliSolution", "bernoulli_closed_form",
    "EXACT_FAMILIES", "ExactSolution", "exact_solution", "read_profile",
    "Hodograph1D", "hodograph_1d", "invert_sampled", "RadialHodograph", "radial_hodograph",
]
