"""Explicit finite-difference solvers for the one- and two-dimensional classes
and for the radial power-law equation."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ..expr import ZERO, applications, diff, lambdify, symbol
from ..pde import W, PdeSpec
from .grid import DIRICHLET, GridField, boundary_mask

GRADIENT_FLOOR = 1e-12


class SolverError(RuntimeError):
    """The explicit step collapsed or the state left the finite range."""


def _require_closed(pde: PdeSpec):
    for part in (pde.D, pde.Q):
        if applications(part):
            raise ValueError("numerical solvers need closed-form D and Q")


def _apply_dirichlet(values: np.ndarray, field: GridField, t: float, mask: np.ndarray):
    coords = field.mesh()
    exact = np.asarray(field.boundary_fn(t, *coords), dtype=float) * np.ones(values.shape)
    values[mask] = exact[mask]


def _check_finite(u: np.ndarray, t: float):
    if not np.all(np.isfinite(u)):
        raise SolverError(f"non-finite values at t={t:.6g}")


def _clamped(g: np.ndarray, floor: float):
    small = np.abs(g) < floor
    if small.any():
        g = np.where(small, np.where(g < 0, -floor, floor), g)
    return g, int(small.sum())


def solve_pde_1d(
    pde: PdeSpec,
    init: GridField,
    T: float,
    safety: float = 0.4,
    gradient_floor: float = GRADIENT_FLOOR,
    min_dt: float = 1e-12,
) -> GridField:
    """Advance ``init`` by ``T`` with forward Euler and centered differences.

    The nondivergence form uses ``D(u_x) u_xx`` with centered ``u_x`` and
    ``u_xx``; the divergence form uses face fluxes ``D(u_x) u_x``.  Each step
    obeys ``dt <= safety*h^2/max|D_eff|`` with ``D_eff = d rhs / d u_xx``.
    Gradients below ``gradient_floor`` in magnitude are clamped before ``D``
    is evaluated; the number of clamped evaluations is reported in
    ``meta["clamped"]``.
    """
    if pde.n != 1 or init.n != 1:
        raise ValueError("solve_pde_1d needs a one-dimensional equation and grid")
    _require_closed(pde)
    ux, uxx, u = symbol("u_x"), symbol("u_xx"), symbol("u")
    rhs = lambdify(pde.rhs(), [u, ux, uxx])
    d_eff = lambdify(diff(pde.rhs(), uxx), [u, ux, uxx])
    D = lambdify(pde.D, [ux])
    Q = lambdify(pde.Q, [u])
    h = init.h
    vals = np.array(init.values)
    t = init.t
    t_end = init.t + T
    mask = boundary_mask(vals.shape)
    dirichlet = init.boundary == DIRICHLET
    clamped = 0
    steps = 0
    while t < t_end - 1e-14 * max(1.0, abs(t_end)):
        p = np.pad(vals, 1, mode="edge")
        g, c = _clamped((p[2:] - p[:-2]) / (2 * h), gradient_floor)
        clamped += c
        second = (p[2:] - 2 * vals + p[:-2]) / h**2
        with np.errstate(all="ignore"):
            eff = np.abs(np.asarray(d_eff(vals, g, second), dtype=float) * np.ones(vals.shape))
        if dirichlet:
            eff = eff[~mask]
        dt_max = safety * h**2 / float(np.max(eff)) if np.max(eff) > 0 else t_end - t
        if not math.isfinite(dt_max) or dt_max < min_dt:
            raise SolverError(f"time step collapsed to {dt_max:.3g} at t={t:.6g}")
        dt = min(dt_max, t_end - t)
        with np.errstate(all="ignore"):
            if pde.form == "divergence":
                face_g, c = _clamped(np.diff(p) / h, gradient_floor)
                clamped += c
                flux = np.asarray(D(face_g), dtype=float) * face_g
                if not dirichlet:
                    flux[0] = flux[-1] = 0.0
                du = np.diff(flux) / h + np.asarray(Q(vals), dtype=float)
            else:
                du = np.asarray(rhs(vals, g, second), dtype=float) * np.ones(vals.shape)
        vals = vals + dt * du
        t = t + dt
        steps += 1
        if dirichlet:
            _apply_dirichlet(vals, init, t, mask)
        _check_finite(vals, t)
    return init.replace(vals, t_end, steps=steps, clamped=clamped)


def _pm_coefficients(pde: PdeSpec):
    D = lambdify(pde.D, [W])
    dD = lambdify(diff(pde.D, W), [W])
    Q = lambdify(pde.Q, [symbol("u")])
    return D, dD, Q


def solve_pde_2d(
    pde: PdeSpec,
    init: GridField,
    T: float,
    safety: float = 0.4,
    gradient_floor: float = GRADIENT_FLOOR,
    min_dt: float = 1e-12,
) -> GridField:
    """Advance ``init`` by ``T`` for ``u_t = div(D(|grad u|^2) grad u) + Q(u)``.

    Conservative flux form: the flux through each cell face uses the normal
    difference across the face and the average of the two neighbouring
    centered tangential differences.  Zero-flux faces close the domain under
    the Neumann condition, so ``sum(u) h^2`` is conserved up to rounding when
    ``Q = 0``.  Each step obeys ``dt <= safety*h^2/(4 max D_eff)`` with
    ``D_eff = max(|D|, |D + 2 W D'|)`` over faces.
    """
    if pde.n != 2 or init.n != 2:
        raise ValueError("solve_pde_2d needs a two-dimensional equation and grid")
    _require_closed(pde)
    D, dD, Q = _pm_coefficients(pde)
    h = init.h
    vals = np.array(init.values)
    t = init.t
    t_end = init.t + T
    mask = boundary_mask(vals.shape)
    dirichlet = init.boundary == DIRICHLET
    has_source = pde.Q != ZERO
    clamped = 0
    steps = 0
    while t < t_end - 1e-14 * max(1.0, abs(t_end)):
        p = np.pad(vals, 1, mode="edge")
        # centered tangential differences on the padded grid
        cy = (p[:, 2:] - p[:, :-2]) / (2 * h)  # shape (m+2, n)
        cx = (p[2:, :] - p[:-2, :]) / (2 * h)  # shape (m, n+2)
        # faces normal to axis 0: between rows i and i+1, shape (m+1, n)
        gx = (p[1:, 1:-1] - p[:-1, 1:-1]) / h
        gy_x = 0.5 * (cy[1:, :] + cy[:-1, :])
        # faces normal to axis 1: shape (m, n+1)
        gy = (p[1:-1, 1:] - p[1:-1, :-1]) / h
        gx_y = 0.5 * (cx[:, 1:] + cx[:, :-1])
        Wx = gx**2 + gy_x**2
        Wy = gy**2 + gx_y**2
        Wx_c, c1 = _clamped(Wx, gradient_floor)
        Wy_c, c2 = _clamped(Wy, gradient_floor)
        clamped += c1 + c2
        with np.errstate(all="ignore"):
            Dx = np.asarray(D(Wx_c), dtype=float) * np.ones(Wx.shape)
            Dy = np.asarray(D(Wy_c), dtype=float) * np.ones(Wy.shape)
            ex = np.maximum(np.abs(Dx), np.abs(Dx + 2 * Wx_c * np.asarray(dD(Wx_c), dtype=float)))
            ey = np.maximum(np.abs(Dy), np.abs(Dy + 2 * Wy_c * np.asarray(dD(Wy_c), dtype=float)))
        Fx = Dx * gx
        Fy = Dy * gy
        if not dirichlet:
            Fx[0, :] = Fx[-1, :] = 0.0
            Fy[:, 0] = Fy[:, -1] = 0.0
        emax = max(float(np.max(ex)), float(np.max(ey)))
        dt_max = safety * h**2 / (4 * emax) if emax > 0 else t_end - t
        if not math.isfinite(dt_max) or dt_max < min_dt:
            raise SolverError(f"time step collapsed to {dt_max:.3g} at t={t:.6g}")
        dt = min(dt_max, t_end - t)
        div = (Fx[1:, :] - Fx[:-1, :] + Fy[:, 1:] - Fy[:, :-1]) / h
        if has_source:
            div = div + np.asarray(Q(vals), dtype=float)
        vals = vals + dt * div
        t = t + dt
        steps += 1
        if dirichlet:
            _apply_dirichlet(vals, init, t, mask)
        _check_finite(vals, t)
    return init.replace(vals, t_end, steps=steps, clamped=clamped)


def solve_radial(
    k,
    init: GridField,
    T: float,
    safety: float = 0.4,
    sign: int = 1,
    min_dt: float = 1e-12,
) -> GridField:
    """Finite-volume solver for ``U_t = (1/r)(r |U_r|^{2k} U_r)_r``.

    ``init`` is one-dimensional in ``r``.  With ``r_0 > 0`` the inner face is
    an ordinary face (zero flux under Neumann); a grid starting at ``r = 0``
    uses the symmetric ghost value there.  ``sign`` is accepted for the
    ``U_r < 0`` branch, which the same flux ``|U_r|^{2k} U_r`` covers.
    """
    if init.n != 1:
        raise ValueError("radial solver needs a one-dimensional grid")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    k = float(Fraction(k)) if not isinstance(k, float) else k
    h = init.h
    r = init.axes()[0]
    if r[0] < 0:
        raise ValueError("radial grid must start at r >= 0")
    faces = np.concatenate([[r[0] - h / 2], r + h / 2])
    faces = np.maximum(faces, 0.0)
    vals = np.array(init.values)
    t, t_end = init.t, init.t + T
    mask = boundary_mask(vals.shape)
    dirichlet = init.boundary == DIRICHLET
    steps = 0
    vol = np.where(r > 0, r, h / 8) * h
    while t < t_end - 1e-14 * max(1.0, abs(t_end)):
        p = np.pad(vals, 1, mode="edge")
        g = np.diff(p) / h
        with np.errstate(all="ignore"):
            mag = np.abs(g) ** (2 * k)
            eff = (2 * k + 1) * mag
        flux = mag * g
        if not dirichlet:
            flux[0] = flux[-1] = 0.0
        finite_eff = eff[np.isfinite(eff)]
        emax = float(np.max(finite_eff)) if finite_eff.size else 0.0
        dt_max = safety * h**2 / emax if emax > 0 else t_end - t
        if not math.isfinite(dt_max) or dt_max < min_dt:
            raise SolverError(f"time step collapsed to {dt_max:.3g} at t={t:.6g}")
        dt = min(dt_max, t_end - t)
        du = np.diff(faces * flux) / vol
        vals = vals + dt * du
        t += dt
        steps += 1
        if dirichlet:
            _apply_dirichlet(vals, init, t, mask)
        _check_finite(vals, t)
    return init.replace(vals, t_end, steps=steps)


__all__ = ["SolverError", "GRADIENT_FLOOR", "solve_pde_1d", "solve_pde_2d", "solve_radial"]
