"""Mapping solutions to solutions along the flow of an admitted generator."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..expr import SamplerConfig
from ..jet import VectorField, flow
from ..pde import InvarianceReport, check_invariance
from .fd import ResidualReport, pde_residual_fd


@dataclass
class TransportReport:
    """Transported evaluator with the residuals of both solutions on the same
    grid; ``passed`` requires the transported residual to stay within
    ``factor`` times the original one."""

    evaluator: Callable
    invariance: InvarianceReport
    original: ResidualReport | None
    transported: ResidualReport | None
    factor: float = 3.0

    @property
    def passed(self) -> bool:
        if not self.invariance.passed:
            return False
        if self.original is None:
            return True
        return self.transported.max_residual <= self.factor * max(self.original.max_residual, 1e-300)


def transported(
    solution: Callable, X: VectorField, eps: float, substeps_per_unit: int = 256
) -> Callable:
    """Evaluator of the image of ``solution`` under ``exp(eps X)``.

    The base point is flowed back by ``-eps``, the solution is evaluated
    there and the full point is flowed forward by ``eps``.  This needs the
    base coefficients of ``X`` to be free of ``u``.
    """
    u = X.jet.u
    if any(u in c.free_symbols for c in X.xi):
        raise ValueError("transport needs base coefficients independent of u")
    nb = len(X.jet.base)
    base_field = VectorField(X.jet, X.xi, 0)

    def evaluator(*base):
        base = np.broadcast_arrays(*(np.asarray(b, dtype=float) for b in base))
        back = flow(base_field, [*base, np.zeros(base[0].shape)], -eps, substeps_per_unit=substeps_per_unit)
        u0 = np.asarray(solution(*back[:nb]), dtype=float) * np.ones(base[0].shape)
        fwd = flow(X, [*back[:nb], u0], eps, substeps_per_unit=substeps_per_unit)
        return fwd[nb]

    return evaluator


def transport_solution(
    solution: Callable,
    X: VectorField,
    eps: float,
    pde,
    t_range: tuple | None = None,
    space_ranges: Sequence[tuple] | None = None,
    h: float = 0.05,
    levels: int = 2,
    factor: float = 3.0,
    sampler: SamplerConfig | None = None,
) -> TransportReport:
    """Transport ``solution`` along ``X`` and compare residuals.

    ``X`` must be admitted by ``pde`` (checked first).  When a grid is given
    both solutions go through :func:`pde_residual_fd` on it.
    """
    inv = check_invariance(pde, X, sampler)
    if not inv.passed:
        return TransportReport(solution, inv, None, None, factor)
    ev = transported(solution, X, eps)
    if t_range is None or space_ranges is None:
        return TransportReport(ev, inv, None, None, factor)
    before = pde_residual_fd(solution, pde, t_range, space_ranges, h, levels)
    after = pde_residual_fd(ev, pde, t_range, space_ranges, h, levels)
    return TransportReport(ev, inv, before, after, factor)
