"""Uniform grids carrying a scalar field at one time level."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

NEUMANN = "neumann"
DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class GridField:
    """Values of ``u`` on a uniform grid in one or two space dimensions.

    Node ``i`` along an axis sits at ``origin + i*spacing``.  Under the
    zero-flux (Neumann) condition each node is the centre of a cell of width
    ``spacing`` whose outer faces carry no flux, so ``sum(values)*h^n`` is the
    total mass.  Under ``dirichlet`` the boundary nodes are reset from
    ``boundary_fn(t, *coords)`` after every step.
    """

    values: np.ndarray
    spacing: tuple
    origin: tuple
    t: float = 0.0
    boundary: str = NEUMANN
    boundary_fn: Callable | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        spacing = tuple(float(h) for h in np.broadcast_to(self.spacing, (vals.ndim,)))
        origin = tuple(float(o) for o in np.broadcast_to(self.origin, (vals.ndim,)))
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "origin", origin)
        if vals.ndim not in (1, 2):
            raise ValueError("only one- and two-dimensional grids are supported")
        if any(h <= 0 for h in spacing):
            raise ValueError("grid spacing must be positive")
        if any(n < 3 for n in vals.shape):
            raise ValueError("every axis needs at least 3 nodes")
        if self.boundary not in (NEUMANN, DIRICHLET):
            raise ValueError(f"unknown boundary condition {self.boundary!r}")
        if self.boundary == DIRICHLET and self.boundary_fn is None:
            raise ValueError("dirichlet boundary needs boundary_fn")

    @property
    def n(self) -> int:
        return self.values.ndim

    @property
    def h(self) -> float:
        """The spacing, required to be equal on all axes."""
        if len(set(self.spacing)) != 1:
            raise ValueError("anisotropic spacing")
        return self.spacing[0]

    def axes(self) -> tuple:
        return tuple(o + h * np.arange(m) for o, h, m in zip(self.origin, self.spacing, self.values.shape))

    def mesh(self) -> tuple:
        return tuple(np.meshgrid(*self.axes(), indexing="ij"))

    def mass(self) -> float:
        return float(self.values.sum() * np.prod(self.spacing))

    def replace(self, values: np.ndarray, t: float, **meta) -> "GridField":
        merged = dict(self.meta)
        merged.update(meta)
        return GridField(values, self.spacing, self.origin, t, self.boundary, self.boundary_fn, merged)

    @classmethod
    def sample(
        cls,
        fn: Callable,
        t: float,
        axes: Sequence[tuple],
        boundary: str = NEUMANN,
        boundary_fn: Callable | None = None,
    ) -> "GridField":
        """Sample ``fn(t, *coords)`` on ``axes = [(start, stop, nodes), ...]``."""
        lines = [np.linspace(a, b, int(m)) for a, b, m in axes]
        spacing = tuple(float(ln[1] - ln[0]) for ln in lines)
        coords = np.meshgrid(*lines, indexing="ij")
        values = np.asarray(fn(t, *coords), dtype=float) * np.ones(coords[0].shape)
        if boundary == DIRICHLET and boundary_fn is None:
            boundary_fn = fn
        return cls(values, spacing, tuple(ln[0] for ln in lines), t, boundary, boundary_fn)


def boundary_mask(shape: tuple) -> np.ndarray:
    mask = np.zeros(shape, dtype=bool)
    for ax in range(len(shape)):
        idx = [slice(None)] * len(shape)
        idx[ax] = 0
        mask[tuple(idx)] = True
        idx[ax] = -1
        mask[tuple(idx)] = True
    return mask
