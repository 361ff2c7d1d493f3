"""Closest-vector search: exact enumeration for small dimensions, Babai otherwise."""
from __future__ import annotations

import math

import numpy as np

EXACT_DIM_CAP = 8


class DimensionCapError(ValueError):
    pass


class _Tri:
    """QR factors of a float basis (columns are generators)."""

    def __init__(self, B: np.ndarray):
        B = np.asarray(B, dtype=float)
        Q, R = np.linalg.qr(B)
        s = np.sign(np.diag(R))
        s[s == 0] = 1.0
        self.Q = Q * s
        self.R = (R.T * s).T
        self.n = B.shape[0]
        self.B = B

    def project(self, t):
        return self.Q.T @ np.asarray(t, dtype=float)


def _is_diagonal(B: np.ndarray) -> bool:
    return np.count_nonzero(B - np.diag(np.diag(B))) == 0


def babai(B, t) -> np.ndarray:
    """Nearest-plane approximation; returns integer coordinates."""
    tri = B if isinstance(B, _Tri) else _Tri(B)
    y = tri.project(t)
    R = tri.R
    x = np.zeros(tri.n, dtype=np.int64)
    for i in range(tri.n - 1, -1, -1):
        r = y[i] - R[i, i + 1:] @ x[i + 1:]
        x[i] = int(np.rint(r / R[i, i]))
    return x


def enumerate_ball(B, t, radius: float, limit: int = 1_000_000) -> list[tuple[int, ...]]:
    """All integer ``x`` with ``||B x - t|| <= radius`` (Fincke-Pohst)."""
    tri = B if isinstance(B, _Tri) else _Tri(B)
    y = tri.project(t)
    R = tri.R
    n = tri.n
    r2 = radius * radius * (1 + 1e-12) + 1e-300
    out: list[tuple[int, ...]] = []
    x = [0] * n

    def rec(i, partial):
        shift = y[i] - sum(R[i, j] * x[j] for j in range(i + 1, n))
        centre = shift / R[i, i]
        span = math.sqrt(max(r2 - partial, 0.0)) / abs(R[i, i])
        lo = math.ceil(centre - span)
        hi = math.floor(centre + span)
        for v in range(lo, hi + 1):
            e = R[i, i] * v - shift
            p = partial + e * e
            if p > r2:
                continue
            x[i] = v
            if i == 0:
                out.append(tuple(x))
                if len(out) > limit:
                    raise RuntimeError("enumeration limit exceeded")
            else:
                rec(i - 1, p)
        x[i] = 0

    rec(n - 1, 0.0)
    return out


def closest_vector(B, t) -> np.ndarray:
    """Exact closest lattice vector (integer coordinates); ties go to the
    lexicographically smallest coordinates."""
    tri = B if isinstance(B, _Tri) else _Tri(B)
    t = np.asarray(t, dtype=float)
    x0 = babai(tri, t)
    r = float(np.linalg.norm(tri.B @ x0 - t))
    cands = enumerate_ball(tri, t, r)
    best = None
    for c in cands:
        dist = float(np.sum((tri.B @ np.array(c) - t) ** 2))
        key = (dist, c)
        if best is None or key < best:
            best = key
    return np.array(best[1], dtype=np.int64) if best else x0


def nearest_point(B, t, mode: str = "exact", dim_cap: int = EXACT_DIM_CAP) -> np.ndarray:
    """Closest lattice point to ``t`` in flat coordinates.

    ``B`` is a float basis matrix or a :class:`LatticeBasis` (its flat matrix
    is used). Returns the lattice vector itself, not its coordinates.
    """
    Bf = B.flat_matrix if hasattr(B, "flat_matrix") else np.asarray(B, dtype=float)
    t = np.asarray(t, dtype=float)
    if Bf.shape[0] != t.shape[-1]:
        raise ValueError("target and basis dimensions differ")
    return Bf @ nearest_coords(Bf, t, mode, dim_cap)


def nearest_coords(Bf: np.ndarray, t, mode: str = "exact", dim_cap: int = EXACT_DIM_CAP):
    if mode == "babai":
        return babai(Bf, t)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    if _is_diagonal(Bf):
        return np.rint(np.asarray(t) / np.diag(Bf)).astype(np.int64)
    if Bf.shape[0] > dim_cap:
        raise DimensionCapError(
            f"exact closest-vector search refused in dimension {Bf.shape[0]} (cap {dim_cap})")
    return closest_vector(Bf, t)


def lll_reduce(columns: list[list[int]]) -> tuple[np.ndarray, np.ndarray]:
    """LLL-reduce an integer basis given as a matrix whose columns are generators.

    Returns ``(R, T)``: ``R`` has the reduced generators as columns and
    ``R = B @ T`` with ``T`` unimodular, so coordinates map back as ``x = T y``.
    """
    from sympy import ZZ
    from sympy.polys.matrices import DomainMatrix

    n = len(columns)
    rows = [[int(columns[i][j]) for i in range(n)] for j in range(n)]
    red, trans = DomainMatrix(rows, (n, n), ZZ).lll_transform()
    R = np.array(red.to_list(), dtype=object).T
    T = np.array(trans.to_list(), dtype=object).T
    return R, T
