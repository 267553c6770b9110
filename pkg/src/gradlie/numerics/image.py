"""Binary PGM I/O and the Perona-Malik filter."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..expr import Num, parse
from ..pde import PdeSpec
from .grid import GridField
from .solvers import solve_pde_2d

PM_DIFFUSIVITY = {
    "exponential": "exp(-W/D0)",
    "rational": "(1 + W/D0)^-1",
    "linear": "1",
}


class PgmError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


def _header_tokens(data: bytes, count: int):
    """First ``count`` whitespace-separated header tokens after the magic,
    skipping ``#`` comments; returns the tokens and the offset of the raster."""
    tokens = []
    i = 2
    while len(tokens) < count:
        if i >= len(data):
            raise PgmError("truncated header", i)
        c = data[i : i + 1]
        if c.isspace():
            i += 1
        elif c == b"#":
            while i < len(data) and data[i : i + 1] not in (b"\n", b"\r"):
                i += 1
        else:
            start = i
            while i < len(data) and not data[i : i + 1].isspace() and data[i : i + 1] != b"#":
                i += 1
            tok = data[start:i]
            if not tok.isdigit():
                raise PgmError(f"expected a decimal header field, found {tok[:16]!r}", start)
            tokens.append((int(tok), start))
    if i >= len(data) or not data[i : i + 1].isspace():
        raise PgmError("header must end with a single whitespace byte", i)
    return tokens, i + 1


def read_pgm(path) -> np.ndarray:
    """Read a binary (``P5``) 8-bit PGM file into a ``(height, width)`` array."""
    with open(path, "rb") as fh:
        data = fh.read()
    return parse_pgm(data)


def parse_pgm(data: bytes) -> np.ndarray:
    if data[:2] != b"P5":
        raise PgmError(f"bad magic {data[:2]!r}, expected b'P5'", 0)
    tokens, start = _header_tokens(data, 3)
    (w, w_at), (h, h_at), (maxval, m_at) = tokens
    if w <= 0:
        raise PgmError("width must be positive", w_at)
    if h <= 0:
        raise PgmError("height must be positive", h_at)
    if maxval != 255:
        raise PgmError(f"only maxval 255 is supported, found {maxval}", m_at)
    need = w * h
    have = len(data) - start
    if have < need:
        raise PgmError(f"raster has {have} bytes, expected {need}", len(data))
    return np.frombuffer(data, dtype=np.uint8, count=need, offset=start).reshape(h, w).copy()


def write_pgm(path, image: np.ndarray) -> None:
    """Write a ``(height, width)`` uint8 array as binary PGM (no comments)."""
    img = np.asarray(image)
    if img.ndim != 2 or img.dtype != np.uint8:
        raise ValueError("expected a two-dimensional uint8 array")
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(img).tobytes())


def image_field(image: np.ndarray) -> GridField:
    """Pixel grid with unit spacing and values scaled to ``[0, 1]``."""
    return GridField(np.asarray(image, dtype=float) / 255.0, 1.0, 0.0)


def to_bytes(field: GridField) -> np.ndarray:
    return np.clip(np.rint(np.asarray(field.values) * 255.0), 0, 255).astype(np.uint8)


def step_edge(size: int = 128, low: float = 0.2, high: float = 0.8, noise: float = 0.0, seed: int = 0) -> np.ndarray:
    """Square test image with a vertical step edge through the middle."""
    img = np.full((size, size), low)
    img[:, size // 2 :] = high
    if noise:
        img = img + noise * np.random.default_rng(seed).standard_normal(img.shape)
    return img


def pm_equation(model: str, D0) -> PdeSpec:
    if model not in PM_DIFFUSIVITY:
        raise ValueError(f"unknown model {model!r}; expected one of {sorted(PM_DIFFUSIVITY)}")
    if model != "linear" and not float(D0) > 0:
        raise ValueError("D0 must be positive")
    D0 = Fraction(str(D0)) if isinstance(D0, float) else Fraction(D0)
    return PdeSpec(2, parse(PM_DIFFUSIVITY[model], names={"D0": Num(D0)}))


@dataclass
class FilterStats:
    mass_before: float
    mass_after: float
    min_before: float
    max_before: float
    min_after: float
    max_after: float
    steps: int

    @property
    def mass_error(self) -> float:
        return abs(self.mass_after - self.mass_before) / max(abs(self.mass_before), 1e-300)

    @property
    def maximum_principle(self) -> bool:
        return self.min_after >= self.min_before and self.max_after <= self.max_before

    def as_dict(self) -> dict:
        out = dict(vars(self))
        out["mass_error"] = self.mass_error
        out["maximum_principle"] = self.maximum_principle
        return out


def perona_malik_filter(
    image: GridField, model: str = "rational", D0=0.01, T: float = 0.5, safety: float = 0.4
) -> tuple[GridField, FilterStats]:
    """Run ``u_t = div(D(|grad u|^2) grad u)`` with zero-flux boundaries.

    ``model`` is ``exponential`` (``exp(-W/D0)``), ``rational``
    (``1/(1 + W/D0)``) or ``linear`` (``D = 1``, for comparison).
    """
    if not np.all(np.isfinite(image.values)):
        raise ValueError("image values must be finite")
    if image.boundary != "neumann":
        raise ValueError("the filter uses zero-flux boundaries")
    out = solve_pde_2d(pm_equation(model, D0), image, T, safety)
    v0, v1 = image.values, out.values
    stats = FilterStats(
        image.mass(), out.mass(), float(v0.min()), float(v0.max()),
        float(v1.min()), float(v1.max()), int(out.meta.get("steps", 0)),
    )
    return out, stats


def edge_gradient(field: GridField) -> float:
    """Largest absolute difference between horizontally adjacent pixels."""
    return float(np.max(np.abs(np.diff(field.values, axis=1))) / field.spacing[1])
