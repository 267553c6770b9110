"""Finite-difference and ODE oracles."""

from .fd import ResidualLevel, ResidualReport, pde_residual_fd
from .grid import DIRICHLET, NEUMANN, GridField
from .image import (
    PM_DIFFUSIVITY,
    FilterStats,
    PgmError,
    edge_gradient,
    image_field,
    parse_pgm,
    perona_malik_filter,
    pm_equation,
    read_pgm,
    step_edge,
    to_bytes,
    write_pgm,
)
from .ode import Trajectory, integrate_ode
from .solvers import GRADIENT_FLOOR, SolverError, solve_pde_1d, solve_pde_2d, solve_radial
from .transport import TransportReport, transport_solution, transported

__all__ = [
    "ResidualLevel", "ResidualReport", "pde_residual_fd",
    "DIRICHLET", "NEUMANN", "GridField",
    "PM_DIFFUSIVITY", "FilterStats", "PgmError", "edge_gradient", "image_field", "parse_pgm",
    "perona_malik_filter", "pm_equation", "read_pgm", "step_edge", "to_bytes", "write_pgm",
    "Trajectory", "integrate_ode",
    "GRADIENT_FLOOR", "SolverError", "solve_pde_1d", "solve_pde_2d", "solve_radial",
    "TransportReport", "transport_solution", "transported",
]
