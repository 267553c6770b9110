"""Machine-readable symmetry classification and its verification driver.

Each :class:`SymmetryCase` holds one classified equation as templates in the
parameters ``k, m, lam, gam, e1, e2`` together with its extra generators.
:func:`verify_case` instantiates the parameters from fixed sample sets, checks
every generator (principal ones included) with randomized identity testing and
runs a perturbed-generator negative control.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .expr import (
    DomainError,
    Expr,
    SamplerConfig,
    add,
    as_expr,
    is_zero,
    lambdify,
    mul,
    parse,
    render,
    symbol,
)
from .jet import JetSpace, VectorField, commutator
from .pde import PdeSpec, check_invariance, invariance_expression

F = Fraction

SAMPLE_SETS: dict[str, tuple] = {
    "k": (F(-3), F(-1, 3), F(1, 2), F(2), F(3)),
    "m": (F(-2), F(1, 2), F(3)),
    "lam": (F(-2), F(1), F(3)),
    "gam": (F(-1), F(2)),
    "e1": (F(1), F(-1)),
    "e2": (F(1), F(-1)),
}
"""Versioned parameter sample sets; cases may narrow them (e.g. exclusions)."""

SAMPLE_SET_VERSION = 1
NEGATIVE_CONTROL_FLOOR = 1e-3

PRINCIPAL_1D = (("X1", {"t": "1"}), ("X2", {"x": "1"}))
PRINCIPAL_2D = (
    ("X1", {"t": "1"}),
    ("X2", {"x1": "1"}),
    ("X3", {"x2": "1"}),
    ("X4", {"x1": "x2", "x2": "-x1"}),
)
PRINCIPAL_NOQ = PRINCIPAL_2D + (
    ("X5", {"u": "1"}),
    ("X6", {"t": "2*t", "x1": "x1", "x2": "x2", "u": "u"}),
)


@dataclass(frozen=True)
class Constraint:
    text: str
    holds: Callable[[Mapping[str, Fraction]], bool]


@dataclass(frozen=True)
class SymmetryCase:
    """One classified equation with its admitted generators.

    ``generators`` lists the extra operators beyond ``principal``; every entry
    is ``(name, {component: template})``.  ``alternatives`` holds other
    readings of the source term to be reported alongside the main one.
    """

    id: str
    n: int
    D: str
    Q: str
    generators: tuple
    principal: tuple
    params: tuple = ()
    constraints: tuple = ()
    expected_dim: int = 0
    samples_override: tuple = ()
    control: tuple = ("", "1")
    alternatives: tuple = ()
    note: str = ""

    def __post_init__(self):
        if self.expected_dim != len(self.generators) + len(self.principal):
            raise ValueError(f"{self.id}: generator count does not match the dimension")

    @property
    def jet(self) -> JetSpace:
        return JetSpace.of_dimension(self.n)

    def all_generators(self) -> tuple:
        return tuple(self.principal) + tuple(self.generators)

    def fields(self, values: Mapping[str, Fraction] | None = None) -> list[tuple[str, VectorField]]:
        names = _names(values)
        out = []
        for name, comps in self.all_generators():
            parsed = {c: parse(v, names=names) for c, v in comps.items()}
            out.append((name, VectorField.from_components(self.jet, **parsed)))
        return out

    def pde(self, values: Mapping[str, Fraction] | None = None, Q: str | None = None) -> PdeSpec:
        names = _names(values)
        return PdeSpec(self.n, parse(self.D, names=names), parse(Q or self.Q, names=names))

    def parameter_samples(self) -> list[dict]:
        """Full grid over the sample sets, filtered by the constraints."""
        if self.samples_override:
            grids = dict(self.samples_override)
        else:
            grids = {}
        axes = [grids.get(p, SAMPLE_SETS[p]) for p in self.params]
        out = []
        for combo in itertools.product(*axes):
            vals = dict(zip(self.params, combo))
            if all(c.holds(vals) for c in self.constraints):
                out.append(vals)
        return out


def _names(values) -> dict:
    from .expr import Num

    return {k: Num(v) for k, v in (values or {}).items()}


def _c(text: str, fn) -> Constraint:
    return Constraint(text, fn)


K_NONZERO = _c("k != 0", lambda v: v["k"] != 0)


def _den4(v):
    return v["m"] - 2 * v["k"] - 1 + v["k"] * (v["m"] + 1)


# ---------------------------------------------------------------- tables

_T1 = (
    SymmetryCase("T1.1", 1, "D(u_x)", "u^-1",
                 (("X3", {"t": "2*t", "x": "x", "u": "u"}),), PRINCIPAL_1D, expected_dim=3),
    SymmetryCase("T1.2", 1, "D(u_x)", "u",
                 (("X3", {"u": "exp(t)"}),), PRINCIPAL_1D, expected_dim=3),
    SymmetryCase("T1.3", 1, "u_x^k", "e1*exp(-u)",
                 (("X3", {"t": "(k+2)*t", "x": "x", "u": "k+2"}),), PRINCIPAL_1D,
                 ("k", "e1"), (K_NONZERO, _c("k != -2", lambda v: v["k"] != -2)), 3),
    SymmetryCase("T1.4", 1, "u_x^k", "e1*u^m",
                 (("X3", {"t": "(1-m)*t", "x": "(k+1-m)/(k+2)*x", "u": "u"}),), PRINCIPAL_1D,
                 ("k", "m", "e1"),
                 (K_NONZERO, _c("k != -2", lambda v: v["k"] != -2),
                  _c("m != 1, 2", lambda v: v["m"] not in (1, 2))), 3),
    SymmetryCase("T1.5", 1, "u_x^k", "e1*u^(k+1) + e2*u",
                 (("X3", {"t": "exp(-k*e2*t)", "u": "e2*u*exp(-k*e2*t)"}),), PRINCIPAL_1D,
                 ("k", "e1", "e2"), (K_NONZERO, _c("k != 1, -1", lambda v: v["k"] not in (1, -1))), 3),
    SymmetryCase("T1.6", 1, "(u_x + gam)^-1", "e1*u",
                 (("X3", {"u": "exp(e1*t)"}),
                  ("X4", {"t": "exp(e1*t)", "u": "e1*(u + gam*x)*exp(e1*t)"})),
                 PRINCIPAL_1D, ("gam", "e1"), (_c("gam != 0", lambda v: v["gam"] != 0),), 4,
                 alternatives=(("printed", "u"),),
                 note="source read as e1*u; the printed column shows u"),
    SymmetryCase("T1.7", 1, "u_x", "e1*u^2",
                 (("X3", {"t": "t", "u": "-u"}), ("X4", {"t": "t^2", "u": "-(2*t*u + e1)"})),
                 PRINCIPAL_1D, ("e1",), (), 4),
    SymmetryCase("T1.8", 1, "u_x", "e1*u^2 + e2",
                 (("X3", {"t": "exp(-2*t)", "u": "2*(u - e1)*exp(-2*t)"}),
                  ("X4", {"t": "exp(2*t)", "u": "-2*(u + e1)*exp(2*t)"})),
                 PRINCIPAL_1D, ("e1", "e2"), (_c("e1*e2 = -1", lambda v: v["e1"] * v["e2"] == -1),), 4),
    SymmetryCase("T1.9", 1, "u_x", "e1*u^2 + e2",
                 (("X3", {"t": "cos(2*t)", "u": "2*(sin(2*t)*u + e1*cos(2*t))"}),
                  ("X4", {"t": "sin(2*t)", "u": "-2*(cos(2*t)*u - e1*sin(2*t))"})),
                 PRINCIPAL_1D, ("e1", "e2"), (_c("e1*e2 = 1", lambda v: v["e1"] * v["e2"] == 1),), 4),
    SymmetryCase("T1.10", 1, "u_x^k", "e2*u",
                 (("X3", {"x": "x", "u": "(1 + 2/k)*u"}),
                  ("X4", {"t": "exp(-k*e2*t)", "u": "e2*u*exp(-k*e2*t)"}),
                  ("X5", {"u": "exp(e2*t)"})),
                 PRINCIPAL_1D, ("k", "e2"), (K_NONZERO,), 5),
)

_K_T2 = (K_NONZERO, _c("k != -1", lambda v: v["k"] != -1))

_T2 = (
    SymmetryCase("T2.1", 2, "D(W)", "u^-1",
                 (("X5", {"t": "2*t", "x1": "x1", "x2": "x2", "u": "u"}),), PRINCIPAL_2D, expected_dim=5),
    SymmetryCase("T2.2", 2, "D(W)", "u",
                 (("X5", {"u": "exp(t)"}),), PRINCIPAL_2D, expected_dim=5),
    SymmetryCase("T2.3", 2, "W^k", "e1*exp(-u)",
                 (("X5", {"t": "2*(k+1)*t", "x1": "x1", "x2": "x2", "u": "2*(k+1)"}),),
                 PRINCIPAL_2D, ("k", "e1"), _K_T2, 5),
    SymmetryCase("T2.4", 2, "W^k", "e1*u^m",
                 (("X5", {"t": "2*t",
                          "x1": "(m-2*k-1)/(m-2*k-1+k*(m+1))*x1",
                          "x2": "(m-2*k-1)/(m-2*k-1+k*(m+1))*x2",
                          "u": "-2*(k+1)/(m-2*k-1+k*(m+1))*u"}),),
                 PRINCIPAL_2D, ("k", "m", "e1"),
                 _K_T2 + (_c("m != 0, 1, 2", lambda v: v["m"] not in (0, 1, 2)),
                          _c("m-2k-1+k(m+1) != 0", lambda v: _den4(v) != 0)), 5),
    SymmetryCase("T2.5", 2, "W^k", "e1*u^(2*k+1) + e2*u",
                 (("X5", {"t": "exp(-2*k*e2*t)", "u": "e2*u*exp(-2*k*e2*t)"}),),
                 PRINCIPAL_2D, ("k", "e1", "e2"),
                 _K_T2 + (_c("k != 1/2, -1/2", lambda v: v["k"] not in (F(1, 2), F(-1, 2))),), 5),
    SymmetryCase("T2.6", 2, "W^(1/2)", "e1*u^2",
                 (("X5", {"t": "t", "u": "-u"}), ("X6", {"t": "t^2", "u": "-(2*t*u + e1)"})),
                 PRINCIPAL_2D, ("e1",), (), 6),
    SymmetryCase("T2.7", 2, "W^(1/2)", "e1*u^2 + e2",
                 (("X5", {"t": "exp(-2*t)", "u": "2*(u - e1)*exp(-2*t)"}),
                  ("X6", {"t": "exp(2*t)", "u": "-2*(u + e1)*exp(2*t)"})),
                 PRINCIPAL_2D, ("e1", "e2"), (_c("e1*e2 = -1", lambda v: v["e1"] * v["e2"] == -1),), 6),
    SymmetryCase("T2.8", 2, "W^(1/2)", "e1*u^2 + e2",
                 (("X5", {"t": "cos(2*t)", "u": "2*(sin(2*t)*u + e1*cos(2*t))"}),
                  ("X6", {"t": "sin(2*t)", "u": "-2*(cos(2*t)*u - e1*sin(2*t))"})),
                 PRINCIPAL_2D, ("e1", "e2"), (_c("e1*e2 = 1", lambda v: v["e1"] * v["e2"] == 1),), 6),
    SymmetryCase("T2.9", 2, "W^k", "e2*u",
                 (("X5", {"x1": "x1", "x2": "x2", "u": "(1 + 1/k)*u"}),
                  ("X6", {"t": "exp(-2*k*e2*t)", "u": "e2*u*exp(-2*k*e2*t)"}),
                  ("X7", {"u": "exp(e2*t)"})),
                 PRINCIPAL_2D, ("k", "e2"), _K_T2, 7),
)

_DILATION = ("X5", {"x1": "x1", "x2": "x2"})
_T3 = (
    SymmetryCase("T3.1", 2, "W^-1", "Q(u)", (_DILATION,), PRINCIPAL_2D, expected_dim=5),
    SymmetryCase("T3.2", 2, "W^-1", "lam*u^-1 + e2*u",
                 (_DILATION, ("X6", {"t": "exp(2*e2*t)", "u": "e2*u*exp(2*e2*t)"})),
                 PRINCIPAL_2D, ("lam", "e2"), (), 6),
    SymmetryCase("T3.3", 2, "W^-1", "lam*u^-1",
                 (_DILATION, ("X6", {"t": "2*t", "u": "u"})), PRINCIPAL_2D, ("lam",), (), 6),
    SymmetryCase("T3.4", 2, "W^-1", "lam*u",
                 (_DILATION, ("X6", {"t": "exp(2*lam*t)", "u": "lam*u*exp(2*lam*t)"}),
                  ("X7", {"u": "exp(lam*t)"})),
                 PRINCIPAL_2D, ("lam",), (), 7),
)

_PRINCIPAL = {
    "principal-1d": (SymmetryCase("P1", 1, "D(u_x)", "Q(u)", (), PRINCIPAL_1D, expected_dim=2,
                                  control=("X2", "1")),),
    "principal-2d": (SymmetryCase("P2", 2, "D(W)", "Q(u)", (), PRINCIPAL_2D, expected_dim=4,
                                  control=("X2", "1")),),
    "principal-noQ": (SymmetryCase("P0", 2, "D(W)", "0", (), PRINCIPAL_NOQ, expected_dim=6,
                                   control=("X6", "u")),),
    "power-law-noQ": (SymmetryCase("PL0", 2, "W^k", "0", (("X7", {"t": "2*k*t", "u": "-u"}),),
                              PRINCIPAL_NOQ, ("k",), (K_NONZERO,), 7,
                              samples_override=(("k", (F(-3), F(1, 2), F(2))),),
                              control=("X7", "u")),),
}

TABLES = {"T1": _T1, "T2": _T2, "T3": _T3, **_PRINCIPAL}


def cases(table_id: str) -> list[SymmetryCase]:
    """All rows of a table (``T1``, ``T2``, ``T3``) or a principal-algebra set."""
    try:
        return list(TABLES[table_id])
    except KeyError:
        raise KeyError(f"unknown table {table_id!r}; expected one of {sorted(TABLES)}") from None


def case(case_id: str) -> SymmetryCase:
    for rows in TABLES.values():
        for c in rows:
            if c.id == case_id:
                return c
    raise KeyError(f"unknown case {case_id!r}")


# ---------------------------------------------------------------- verification


@dataclass
class VerificationReport:
    """Outcome of verifying one case over its parameter samples."""

    case_id: str
    samples: list
    residuals: dict
    passed: bool
    control_generator: str
    control_residual: float
    seed: int
    exact: bool = True
    witness: dict | None = None
    readings: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def control_failed(self) -> bool:
        return self.control_residual > NEGATIVE_CONTROL_FLOOR

    def as_dict(self) -> dict:
        return {
            "case": self.case_id,
            "samples": [{k: str(v) for k, v in s.items()} for s in self.samples],
            "residuals": self.residuals,
            "passed": self.passed,
            "exact_path": self.exact,
            "negative_control": {
                "generator": self.control_generator,
                "residual": self.control_residual,
                "detected": self.control_failed,
            },
            "witness": _jsonable(self.witness),
            "readings": self.readings,
            "seed": self.seed,
        }


def _jsonable(w):
    if w is None:
        return None
    return {str(k): (str(v) if isinstance(v, Fraction) else v) for k, v in w.items()}


def _param_symbols(c: SymmetryCase) -> dict:
    return {p: symbol(p) for p in c.params}


def perturb(X: VectorField, component: str, delta) -> VectorField:
    """Add ``delta`` to one coefficient of ``X``."""
    comps = dict(X.components)
    comps[component] = add(comps[component], as_expr(delta))
    return VectorField.from_components(X.jet, **comps)


def _check_all(E: Expr, samples, sampler, syms) -> tuple[float, bool, dict | None]:
    worst, exact, witness = 0.0, True, None
    for vals in samples or [{}]:
        fixed = {syms[p]: v for p, v in vals.items()}
        try:
            verdict = is_zero(E, sampler, fixed=fixed)
        except DomainError as exc:
            return float("inf"), False, {"error": str(exc), **{p: str(v) for p, v in vals.items()}}
        exact &= verdict.exact
        if verdict.max_residual >= worst:
            worst = verdict.max_residual
        if not verdict.zero and witness is None:
            witness = dict(verdict.witness or {})
            witness.update({f"param {p}": str(v) for p, v in vals.items()})
    return worst, exact, witness


def verify_case(
    c: SymmetryCase,
    samples: Sequence[Mapping] | None = None,
    sampler: SamplerConfig | None = None,
) -> VerificationReport:
    """Check every generator of ``c`` at every parameter sample, then run the
    negative control (one generator perturbed, expected to fail)."""
    start = time.perf_counter()
    sampler = sampler or SamplerConfig()
    samples = list(samples) if samples is not None else c.parameter_samples()
    for vals in samples:
        bad = [con.text for con in c.constraints if not con.holds(vals)]
        if bad:
            raise ValueError(f"{c.id}: sample {vals} violates {bad}")
    syms = _param_symbols(c)
    pde = c.pde()
    residuals, witness, exact = {}, None, True
    passed = True
    fields = c.fields()
    for name, X in fields:
        E = invariance_expression(pde, X)
        worst, ex, wit = _check_all(E, samples, sampler, syms)
        residuals[name] = worst
        exact &= ex
        if wit is not None:
            passed = False
            witness = witness or {"generator": name, **wit}

    ctrl_name, delta = c.control
    ctrl_name = ctrl_name or fields[-1][0]
    X = dict(fields)[ctrl_name]
    Xp = perturb(X, "u", parse(delta))
    first = samples[:1] or [{}]
    ctrl, _, _ = _check_all(invariance_expression(pde, Xp), first, sampler, syms)
    if not ctrl > NEGATIVE_CONTROL_FLOOR:
        passed = False

    readings = {}
    for label, Qalt in c.alternatives:
        alt_pde = c.pde(Q=Qalt)
        ok_per_sample = []
        for vals in samples:
            fixed = {syms[p]: v for p, v in vals.items()}
            ok = all(
                is_zero(invariance_expression(alt_pde, Xg), sampler, fixed=fixed).zero
                for _, Xg in fields
            )
            ok_per_sample.append(ok)
        readings[f"Q = {render(parse(c.Q))}"] = passed
        readings[f"Q = {Qalt} ({label})"] = {
            "passes_all_samples": all(ok_per_sample),
            "passing_samples": [
                {k: str(v) for k, v in s.items()} for s, ok in zip(samples, ok_per_sample) if ok
            ],
        }

    return VerificationReport(
        c.id, samples, residuals, passed, ctrl_name, ctrl, sampler.seed, exact, witness,
        readings, time.perf_counter() - start,
    )


def verify_table(table_id: str, sampler: SamplerConfig | None = None) -> list[VerificationReport]:
    return [verify_case(c, sampler=sampler) for c in cases(table_id)]


# ---------------------------------------------------------------- the linearizable class


@dataclass
class LinearizableReport:
    Q: str
    w: str
    solves_linear: bool
    linear_residual: float
    passed: bool
    max_residual: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def linear_equation_residual(Q, w) -> Expr:
    """``w_t - w_uu + Q(u) w_u`` for a closed-form ``w(t, u)``."""
    from .expr import diff

    t, u = symbol("t"), symbol("u")
    Q, w = as_expr(Q), as_expr(w)
    return add(diff(w, t), mul(-1, diff(diff(w, u), u)), mul(Q, diff(w, u)))


def verify_linearizable(Q, w_samples: Sequence, sampler: SamplerConfig | None = None) -> list[LinearizableReport]:
    """Check ``w(t,u) d_x`` against ``u_t = u_x^-2 u_xx + Q(u)`` for each ``w``.

    A candidate that does not solve ``w_t = w_uu - Q w_u`` is rejected before
    the invariance check (reported with ``passed = False``).
    """
    sampler = sampler or SamplerConfig()
    Qe = as_expr(Q)
    pde = PdeSpec(1, "u_x^-2", Qe)
    out = []
    for w in w_samples:
        we = as_expr(w)
        lin = is_zero(linear_equation_residual(Qe, we), sampler)
        if not lin.zero:
            out.append(LinearizableReport(render(Qe), render(we), False, lin.max_residual, False, float("nan")))
            continue
        X = VectorField.from_components(pde.jet, x=we)
        rep = check_invariance(pde, X, sampler)
        out.append(LinearizableReport(render(Qe), render(we), True, lin.max_residual, rep.passed, rep.max_residual))
    return out


LINEARIZABLE_SAMPLES = {
    "0": ("u^2 + 2*t", "u^3 + 6*t*u", "exp(u + t)"),
    "u": ("exp(-t)*u", "exp(-2*t)*(u^2 - 1)", "exp(-3*t)*(u^3 - 3*u)"),
}
"""Closed-form solutions of ``w_t = w_uu - Q w_u`` for ``Q = 0`` and ``Q = u``."""


# ---------------------------------------------------------------- image-filter diffusivities


@dataclass
class ExtensionReport:
    model: str
    D: str
    k: str
    residual: float
    extension_rejected: bool


PM_MODELS = {"exponential": "exp(-W/D0)", "rational": "(1 + W/D0)^-1"}


def verify_extension_rejected(
    models: Sequence[str] = ("exponential", "rational"),
    D0=1,
    ks: Sequence = (F(-3), F(1, 2), F(2)),
    sampler: SamplerConfig | None = None,
) -> list[ExtensionReport]:
    """The extra operator ``2k t d_t - u d_u`` must fail for the image-filter
    diffusivities at every tried ``k``."""
    sampler = sampler or SamplerConfig()
    out = []
    J = JetSpace.of_dimension(2)
    for model in models:
        D = parse(PM_MODELS[model], names=_names({"D0": Fraction(D0)}))
        pde = PdeSpec(2, D, 0)
        for k in ks:
            X = VectorField.from_components(J, t=mul(2 * Fraction(k), symbol("t")), u="-u")
            rep = check_invariance(pde, X, sampler)
            out.append(ExtensionReport(model, render(D), str(k), rep.max_residual,
                                       rep.max_residual > NEGATIVE_CONTROL_FLOOR))
    return out


# names used by the operation list of the toolkit's interface
verify_theorem1 = verify_linearizable
verify_corollary = verify_extension_rejected


# ---------------------------------------------------------------- algebra structure


@dataclass
class AlgebraReport:
    case_id: str
    passed: bool
    structure: dict
    failures: list


def _coeff_matrix(fields: Sequence[VectorField], pts: np.ndarray) -> np.ndarray:
    J = fields[0].jet
    syms = list(J.base_symbols) + [J.u]
    cols = []
    for X in fields:
        col = []
        for c in X.coefficients():
            f = lambdify(c, syms)
            col.append(np.broadcast_to(np.asarray(f(*pts.T), dtype=float), (len(pts),)))
        cols.append(np.concatenate(col))
    return np.stack(cols, axis=1)


def verify_algebra_structure(
    c: SymmetryCase,
    values: Mapping | None = None,
    sampler: SamplerConfig | None = None,
    max_denominator: int = 1000,
) -> AlgebraReport:
    """Every commutator of the case's generators lies in their span.

    Span coefficients are found by least squares at random points, rounded to
    rationals and then confirmed with :func:`is_zero`.
    """
    sampler = sampler or SamplerConfig(n_samples=40)
    if values is None:
        samples = c.parameter_samples()
        values = samples[0] if samples else {}
    named = c.fields(values)
    names = [n for n, _ in named]
    fields = [X for _, X in named]
    rng = np.random.default_rng(sampler.seed)
    dim = len(fields[0].jet.base) + 1
    pts = rng.uniform(0.5, 2.0, size=(12, dim))
    A = _coeff_matrix(fields, pts)
    structure, failures = {}, []
    for i, j in itertools.combinations(range(len(fields)), 2):
        Z = commutator(fields[i], fields[j])
        b = _coeff_matrix([Z], pts)[:, 0]
        sol, *_ = np.linalg.lstsq(A, b, rcond=None)
        coeffs = [Fraction(float(s)).limit_denominator(max_denominator) for s in sol]
        combo = Z
        for cf, X in zip(coeffs, fields):
            if cf:
                combo = combo - X.scale(cf)
        ok = all(is_zero(e, sampler).zero for e in combo.coefficients())
        key = f"[{names[i]},{names[j]}]"
        structure[key] = {names[m]: str(cf) for m, cf in enumerate(coeffs) if cf}
        if not ok:
            failures.append(key)
    return AlgebraReport(c.id, not failures, structure, failures)


__all__ = [
    "SAMPLE_SETS", "SAMPLE_SET_VERSION", "NEGATIVE_CONTROL_FLOOR", "Constraint", "SymmetryCase",
    "TABLES", "cases", "case", "VerificationReport", "perturb", "verify_case", "verify_table",
    "LinearizableReport", "linear_equation_residual", "verify_linearizable", "LINEARIZABLE_SAMPLES",
    "verify_theorem1", "ExtensionReport", "PM_MODELS", "verify_extension_rejected", "verify_corollary",
    "AlgebraReport", "verify_algebra_structure",
]
