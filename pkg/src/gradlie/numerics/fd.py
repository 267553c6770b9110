"""Finite-difference residual of candidate solutions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..expr import lambdify
from ..pde import as_evolution


@dataclass
class ResidualLevel:
    h: float
    dt: float
    max_residual: float
    points: int
    excluded: int


@dataclass
class ResidualReport:
    """Max residual at each refinement level and the ratios between
    consecutive levels (about 4 for a true solution)."""

    levels: list = field(default_factory=list)

    @property
    def ratios(self) -> list:
        out = []
        for a, b in zip(self.levels, self.levels[1:]):
            out.append(a.max_residual / b.max_residual if b.max_residual > 0 else float("inf"))
        return out

    @property
    def ratio(self) -> float:
        return self.ratios[-1]

    @property
    def max_residual(self) -> float:
        return self.levels[-1].max_residual

    def table(self) -> str:
        lines = ["h\tdt\tmax_residual\tpoints\texcluded\tratio"]
        ratios = [float("nan")] + self.ratios
        for lv, q in zip(self.levels, ratios):
            lines.append(f"{lv.h:.6g}\t{lv.dt:.6g}\t{lv.max_residual:.6e}\t{lv.points}\t{lv.excluded}\t{q:.4f}")
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {
            "levels": [vars(lv) for lv in self.levels],
            "ratios": self.ratios,
        }


def _jet_arguments(ev):
    J = ev.jet
    syms = [*J.base_symbols, J.u, *J.first()[1:]]
    seconds = [s for s in J.second() if "t" not in s.index]
    return J, syms + seconds


def _centres(t_range, space_ranges, h: float, dt: float) -> list:
    t_nodes = np.arange(t_range[0] + dt, t_range[1] - dt / 2 + 1e-12, dt)
    s_nodes = [np.arange(a + h, b - h / 2 + 1e-12, h) for a, b in space_ranges]
    return np.meshgrid(t_nodes, *s_nodes, indexing="ij")


def _level(candidate: Callable, ev, centres, h: float, dt: float) -> ResidualLevel:
    J, args = _jet_arguments(ev)
    F = lambdify(ev.rhs, args)
    n = J.n
    tc, xc = centres[0], centres[1:]

    def u(dt_shift=0.0, *shift):
        pts = [x + s * h for x, s in zip(xc, shift)] if shift else list(xc)
        return np.asarray(candidate(tc + dt_shift, *pts), dtype=float)

    zero = (0,) * n
    u0 = u(0.0, *zero)
    ut = (u(dt, *zero) - u(-dt, *zero)) / (2 * dt)
    firsts, seconds, used = [], {}, [u0, ut]
    unit = np.eye(n, dtype=int)
    plus = [u(0.0, *unit[a]) for a in range(n)]
    minus = [u(0.0, *(-unit[a])) for a in range(n)]
    for a in range(n):
        firsts.append((plus[a] - minus[a]) / (2 * h))
        seconds[(a, a)] = (plus[a] - 2 * u0 + minus[a]) / h**2
    for a in range(n):
        for b in range(a + 1, n):
            pp = u(0.0, *(unit[a] + unit[b]))
            mm = u(0.0, *(-unit[a] - unit[b]))
            pm = u(0.0, *(unit[a] - unit[b]))
            mp = u(0.0, *(-unit[a] + unit[b]))
            seconds[(a, b)] = (pp - pm - mp + mm) / (4 * h**2)
            used += [pp, mm, pm, mp]
    used += plus + minus
    second_list = []
    for a in range(n):
        for b in range(a, n):
            second_list.append(seconds[(a, b)])
    with np.errstate(all="ignore"):
        rhs = np.asarray(F(tc, *xc, u0, *firsts, *second_list), dtype=float) * np.ones(tc.shape)
        res = np.abs(ut - rhs)
    ok = np.all([np.isfinite(v) for v in used], axis=0) & np.isfinite(res)
    excluded = int((~ok).sum())
    max_res = float(res[ok].max()) if ok.any() else float("nan")
    return ResidualLevel(h, dt, max_res, int(ok.sum()), excluded)


def pde_residual_fd(
    candidate: Callable,
    pde,
    t_range: tuple,
    space_ranges: Sequence[tuple],
    h: float,
    levels: int = 2,
    dt_ratio: float = 1.0,
) -> ResidualReport:
    """Residual ``u_t - rhs`` of ``candidate(t, *space)`` by centered
    second-order differences.

    Centres are the interior nodes of the grid with spacing ``h`` in space and
    ``dt = dt_ratio*h`` in time over the given ranges, so every stencil stays
    inside the ranges.  The stencil width is halved ``levels - 1`` times at
    the same centres.  Centres where the candidate is not finite anywhere on
    the stencil are excluded and counted.
    """
    ev = as_evolution(pde)
    if len(space_ranges) != ev.jet.n:
        raise ValueError(f"expected {ev.jet.n} space ranges")
    centres = _centres(t_range, space_ranges, h, dt_ratio * h)
    report = ResidualReport()
    for i in range(levels):
        hi = h / 2**i
        report.levels.append(_level(candidate, ev, centres, hi, dt_ratio * hi))
    return report
