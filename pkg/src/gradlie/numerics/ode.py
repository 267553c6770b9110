"""Adaptive Dormand-Prince 5(4) integration of first-order systems."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

# Dormand-Prince tableau; the 5th-order weights equal the last row of A (FSAL)
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


@dataclass
class Trajectory:
    """Accepted steps of an integration.

    ``errors[i]`` is the local error estimate of the step ending at ``s[i]``
    (zero for the initial point), measured as ``max |e_j| / max(1, |y_j|)``.
    ``status`` is ``"ok"`` or ``"underflow"``; in the latter case the
    trajectory stops at the last accepted point and ``message`` says why.
    """

    s: np.ndarray
    y: np.ndarray
    errors: np.ndarray
    status: str = "ok"
    message: str = ""
    evaluations: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def at(self, s: float) -> np.ndarray:
        """State at an abscissa that was requested through ``s_eval``."""
        hit = np.flatnonzero(np.isclose(self.s, s, rtol=0, atol=1e-12 * max(1.0, abs(s))))
        if hit.size == 0:
            raise KeyError(f"abscissa {s} is not a trajectory point")
        return self.y[hit[0]]


def integrate_ode(
    rhs: Callable,
    y0: Sequence[float],
    span: tuple,
    tol: float = 1e-9,
    s_eval: Sequence[float] | None = None,
    h0: float | None = None,
    max_steps: int = 200000,
    h_min: float | None = None,
) -> Trajectory:
    """Integrate ``y' = rhs(s, y)`` from ``span[0]`` to ``span[1]``.

    Steps are controlled so that every accepted local error estimate is at
    most ``tol``.  Abscissae in ``s_eval`` are hit exactly and recorded.  A
    step size below ``h_min`` (default ``1e-12 * |span|``) ends the
    integration with ``status = "underflow"``.
    """
    s0, s1 = float(span[0]), float(span[1])
    direction = 1.0 if s1 >= s0 else -1.0
    length = abs(s1 - s0)
    h_min = h_min if h_min is not None else 1e-12 * max(length, 1.0)
    y = np.array(y0, dtype=float)
    requested = () if s_eval is None else np.ravel(s_eval)
    stops = sorted({float(v) for v in requested} | {s1}, key=lambda v: direction * v)
    stops = [v for v in stops if direction * (v - s0) > 0]

    def f(s, yy):
        return np.asarray(rhs(s, yy), dtype=float)

    k0 = f(s0, y)
    nfev = 1
    if h0 is None:
        scale = max(1.0, float(np.max(np.abs(y))))
        slope = float(np.max(np.abs(k0))) / scale
        h0 = 0.01 * length if slope == 0 else min(0.01 * length, 0.1 * tol ** 0.2 / slope)
    h = max(abs(h0), h_min)
    s = s0
    out_s, out_y, out_e = [s0], [y.copy()], [0.0]
    status, message = "ok", ""
    steps = 0
    for stop in stops:
        while direction * (stop - s) > 0:
            if steps >= max_steps:
                return Trajectory(np.array(out_s), np.array(out_y), np.array(out_e),
                                  "underflow", f"step budget {max_steps} exhausted at s={s:.6g}", nfev)
            step = min(h, abs(stop - s))
            hits_stop = step == abs(stop - s)
            hs = direction * step
            K = [k0]
            for i in range(1, 7):
                yi = y + hs * sum(a * K[j] for j, a in enumerate(_A[i]))
                K.append(f(s + _C[i] * hs, yi))
            nfev += 6
            Kmat = np.array(K)
            y_new = y + hs * (_B5 @ Kmat)
            err_vec = hs * (_E @ Kmat)
            scale = np.maximum(1.0, np.maximum(np.abs(y), np.abs(y_new)))
            err = float(np.max(np.abs(err_vec) / scale))
            finite = np.all(np.isfinite(y_new)) and np.isfinite(err)
            steps += 1
            if finite and err <= tol:
                s = stop if hits_stop else s + hs
                y = y_new
                k0 = K[6]
                out_s.append(s)
                out_y.append(y.copy())
                out_e.append(err)
                factor = 5.0 if err == 0 else min(5.0, 0.9 * (tol / err) ** 0.2)
                h = step * max(0.2, factor) if hits_stop else h * max(0.2, factor)
            else:
                factor = 0.2 if not finite else max(0.2, 0.9 * (tol / err) ** 0.2)
                h = step * factor
            if h < h_min:
                status = "underflow"
                message = f"step size {h:.3g} below {h_min:.3g} at s={s:.6g}"
                return Trajectory(np.array(out_s), np.array(out_y), np.array(out_e), status, message, nfev)
    return Trajectory(np.array(out_s), np.array(out_y), np.array(out_e), status, message, nfev)
