"""Flat-torus foliation of the unit sphere S^{2L-1}.

A unit radius vector ``c`` with nonnegative entries selects the torus
``T_c``; arc-length coordinates ``u`` in the box ``0 <= u_i < 2*pi*c_i``
parametrize it through :func:`embed`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

TWO_PI = 2.0 * math.pi
GEOMETRY_TOL = 1e-12


class DimensionError(ValueError):
    """Raised when vectors that must share a dimension do not."""


@dataclass(frozen=True)
class RadiusVector:
    """Unit vector of per-circle radii ``(c_1, ..., c_L)`` with ``c_i >= 0``."""

    entries: tuple[float, ...]

    def __init__(self, entries: Sequence[float], tol: float = GEOMETRY_TOL):
        vals = tuple(float(x) for x in entries)
        if not vals:
            raise ValueError("radius vector must have at least one entry")
        if any(x < -tol for x in vals):
            raise ValueError(f"radius vector has a negative entry: {vals}")
        vals = tuple(max(x, 0.0) for x in vals)
        norm = math.sqrt(math.fsum(x * x for x in vals))
        if abs(norm - 1.0) > tol:
            raise ValueError(f"radius vector must have unit norm, got {norm!r}")
        object.__setattr__(self, "entries", vals)

    @classmethod
    def normalized(cls, entries: Sequence[float], zero_tol: float = 1e-12) -> "RadiusVector":
        """Build from any nonnegative vector; entries below ``zero_tol`` snap to 0."""
        arr = np.asarray(entries, dtype=float)
        arr = np.where(np.abs(arr) < zero_tol, 0.0, arr)
        return cls(arr / np.linalg.norm(arr))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def array(self) -> np.ndarray:
        return np.array(self.entries)

    @property
    def box(self) -> np.ndarray:
        """Side lengths ``2*pi*c_i`` of the fundamental box."""
        return TWO_PI * self.array

    @property
    def is_degenerate(self) -> bool:
        return any(x == 0.0 for x in self.entries)

    @property
    def effective_dim(self) -> int:
        return sum(1 for x in self.entries if x > 0.0)


@dataclass(frozen=True)
class DistortionBounds:
    lower: float
    upper: float
    delta: float
    min_coord_index: int


def _as_radius(c) -> np.ndarray:
    if isinstance(c, RadiusVector):
        return c.array
    return np.asarray(c, dtype=float)


def _check_same(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[-1] != b.shape[-1]:
        raise DimensionError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")


def reduce_to_box(c, u) -> np.ndarray:
    """Reduce arc-length coordinates into ``[0, 2*pi*c_i)``; degenerate axes map to 0."""
    cv = _as_radius(c)
    u = np.asarray(u, dtype=float)
    _check_same(cv, u)
    box = TWO_PI * cv
    out = np.zeros(np.broadcast_shapes(u.shape, cv.shape))
    pos = cv > 0
    out[..., pos] = np.mod(u[..., pos], box[pos])
    # np.mod can return the modulus itself for tiny negative inputs
    out[..., pos] = np.where(out[..., pos] >= box[pos], 0.0, out[..., pos])
    return out


def embed(c, u) -> np.ndarray:
    """Map box coordinates ``u`` on torus ``T_c`` to a unit vector in R^{2L}.

    Works on a single point or a stack of points (leading axes of ``u``).
    Coordinate pairs with ``c_i = 0`` are (0, 0).
    """
    cv = _as_radius(c)
    u = np.asarray(u, dtype=float)
    _check_same(cv, u)
    ang = np.zeros(np.broadcast_shapes(u.shape, cv.shape))
    pos = cv > 0
    ang[..., pos] = u[..., pos] / cv[pos]
    out = np.empty(ang.shape[:-1] + (2 * cv.shape[-1],))
    out[..., 0::2] = cv * np.cos(ang)
    out[..., 1::2] = cv * np.sin(ang)
    return out


def polar_parts(x) -> tuple[np.ndarray, np.ndarray]:
    """Return per-pair radii ``gamma`` and full angles ``phi`` in ``[0, 2*pi)``."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] % 2:
        raise DimensionError(f"expected an even dimension, got {x.shape[-1]}")
    a = x[..., 0::2]
    b = x[..., 1::2]
    gamma = np.hypot(a, b)
    phi = np.mod(np.arctan2(b, a), TWO_PI)
    phi = np.where(phi >= TWO_PI, 0.0, phi)
    phi = np.where(gamma == 0.0, 0.0, phi)
    return gamma, phi


def unembed(x) -> tuple[np.ndarray, np.ndarray]:
    """Invert :func:`embed` for a unit vector.

    Returns ``(gamma, theta)`` where ``gamma`` is the radius vector of the
    torus through ``x`` and ``theta`` its arc-length coordinates. The angle
    of each pair comes from both coordinates, so ``embed(gamma, theta) == x``.
    """
    gamma, phi = polar_parts(x)
    return gamma, phi * gamma


def inter_torus_distance(c, b) -> float:
    """Minimum distance between tori ``T_c`` and ``T_b``: ``||c - b||``."""
    cv, bv = _as_radius(c), _as_radius(b)
    _check_same(cv, bv)
    return float(np.linalg.norm(cv - bv))


def on_torus_distance(c, u, v):
    """Chord distance between ``embed(c, u)`` and ``embed(c, v)`` from box coordinates."""
    cv = _as_radius(c)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_same(cv, u)
    _check_same(cv, v)
    diff = u - v
    half = np.zeros(np.broadcast_shapes(diff.shape, cv.shape))
    pos = cv > 0
    half[..., pos] = diff[..., pos] / (2.0 * cv[pos])
    return 2.0 * np.sqrt(np.sum((cv * np.sin(half)) ** 2, axis=-1))


def distortion_bounds(c, delta: float) -> DistortionBounds:
    """Range of chord lengths for box displacements of flat length ``delta``."""
    cv = _as_radius(c)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if np.any(cv <= 0):
        raise ValueError("distortion bounds need a non-degenerate radius vector")
    xi = int(np.argmin(cv))
    lower = 2.0 * cv[xi] * math.sin(delta / (2.0 * cv[xi]))
    upper = 2.0 * math.sin(delta / 2.0)
    return DistortionBounds(lower=lower, upper=upper, delta=delta, min_coord_index=xi)
