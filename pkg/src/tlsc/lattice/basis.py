"""Exact rational lattice bases and the bundled lattice data."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from importlib import resources
from typing import Sequence

import numpy as np

from . import snf


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("lattice entries must be exact (int, Fraction or 'p/q' string)")
    return Fraction(x)


def rational_inverse(A: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise snf.SingularMatrixError("matrix is singular")
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        M[col] = [x / p for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [row[n:] for row in M]


def rational_det(A: Sequence[Sequence[Fraction]]) -> Fraction:
    den = 1
    for row in A:
        for x in row:
            den = math.lcm(den, Fraction(x).denominator)
    ints = [[int(Fraction(x) * den) for x in row] for row in A]
    return Fraction(snf.det(ints), den ** len(A))


@dataclass(frozen=True)
class LatticeBasis:
    """Generator matrix ``B`` (columns are generators) times a float ``scale``.

    ``B`` is exact. Flat coordinates of the lattice point with integer
    coordinates ``x`` are ``scale * B @ x``. ``min_norm2`` is the squared
    minimum norm of the lattice generated by ``B`` (without ``scale``) when
    known.
    """

    matrix: tuple[tuple[Fraction, ...], ...]
    scale: float = 1.0
    name: str = "custom"
    min_norm2: Fraction | None = None
    scale_note: str = ""
    _det: Fraction = field(default=None, compare=False, repr=False)

    def __init__(self, matrix, scale: float = 1.0, name: str = "custom",
                 min_norm2=None, scale_note: str = ""):
        rows = tuple(tuple(_frac(x) for x in row) for row in matrix)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("lattice basis must be a nonempty square matrix")
        object.__setattr__(self, "matrix", rows)
        object.__setattr__(self, "scale", float(scale))
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "min_norm2", None if min_norm2 is None else _frac(min_norm2))
        object.__setattr__(self, "scale_note", scale_note)
        d = rational_det(rows)
        if d == 0:
            raise snf.SingularMatrixError("lattice basis is singular")
        object.__setattr__(self, "_det", d)

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @property
    def det(self) -> Fraction:
        """Exact determinant of ``B`` (the scale is not included)."""
        return self._det

    def recompute_det(self) -> Fraction:
        return rational_det(self.matrix)

    @cached_property
    def inverse(self) -> list[list[Fraction]]:
        return rational_inverse(self.matrix)

    @cached_property
    def float_matrix(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.matrix])

    @property
    def flat_matrix(self) -> np.ndarray:
        return self.scale * self.float_matrix

    @property
    def min_distance(self) -> float | None:
        """Minimum distance in flat coordinates (scale included)."""
        if self.min_norm2 is None:
            return None
        return self.scale * math.sqrt(self.min_norm2)

    def scaled(self, factor: float, note: str = "") -> "LatticeBasis":
        return LatticeBasis(self.matrix, self.scale * factor, self.name, self.min_norm2,
                            note or self.scale_note)

    def with_min_distance(self, dist: float) -> "LatticeBasis":
        if self.min_norm2 is None:
            raise ValueError("minimum norm of this basis is unknown")
        return LatticeBasis(self.matrix, dist / math.sqrt(self.min_norm2), self.name,
                            self.min_norm2, f"scaled to minimum distance {dist!r}")

    def solve(self, y: Sequence) -> list[Fraction]:
        """Exact coordinates ``x`` with ``B x = y``."""
        y = [_frac(v) for v in y]
        return [sum((a * b for a, b in zip(row, y)), Fraction(0)) for row in self.inverse]

    def contains(self, y: Sequence) -> bool:
        return all(x.denominator == 1 for x in self.solve(y))

    def apply(self, x: Sequence[int]) -> list[Fraction]:
        return [sum((a * int(b) for a, b in zip(row, x)), Fraction(0)) for row in self.matrix]

    def sublattice_matrix(self, other: "LatticeBasis") -> list[list[int]]:
        """Integer ``Q`` with ``other.B = self.B @ Q``; raises if not a sublattice."""
        Binv = self.inverse
        cols = list(zip(*other.matrix))
        Q = [[sum((a * b for a, b in zip(Binv[i], col)), Fraction(0)) for col in cols]
             for i in range(self.dim)]
        bad = [(i, j) for i in range(self.dim) for j in range(self.dim) if Q[i][j].denominator != 1]
        if bad:
            raise ValueError(f"not a sublattice: B^-1 B1 has non-integer entry at {bad[0]}")
        return [[int(x) for x in row] for row in Q]

    def to_text(self) -> str:
        return "\n".join(" ".join(str(x) for x in row) for row in self.matrix) + "\n"


def parse_matrix(text: str) -> list[list[Fraction]]:
    """Parse a matrix from text: one row per line, entries ``p`` or ``p/q``."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([Fraction(tok) for tok in line.replace(",", " ").split()])
        except ValueError:
            raise ValueError(f"line {lineno}: cannot parse {line!r}") from None
    return rows


def load_basis(path, scale: float = 1.0, name: str = "custom", min_norm2=None) -> LatticeBasis:
    with open(path) as f:
        return LatticeBasis(parse_matrix(f.read()), scale, name, min_norm2)


def _bundled(fname: str) -> list[list[Fraction]]:
    return parse_matrix(resources.files(__package__).joinpath("data", fname).read_text())


def zn_basis(n: int) -> LatticeBasis:
    return LatticeBasis([[int(i == j) for j in range(n)] for i in range(n)], 1.0, f"Z{n}", 1)


def d4_basis() -> LatticeBasis:
    return LatticeBasis(_bundled("d4.txt"), 1.0, "D4", 2)


def e8_basis() -> LatticeBasis:
    return LatticeBasis(_bundled("e8.txt"), 1.0, "E8", 2)


def leech_basis() -> LatticeBasis:
    """Leech lattice normalized to minimum distance 2.

    Entries are the integer sqrt(8)-scaled coordinates (minimum squared norm
    32); the global factor ``1/sqrt(8)`` lives in ``scale``. Relative to the
    integer matrix, ``det`` of the normalized lattice is ``det(B) * 8**-12 = 1``.
    ``scaled(beta / 2)`` gives minimum distance ``beta``.
    """
    return LatticeBasis(_bundled("leech.txt"), 1.0 / math.sqrt(8.0), "leech", 32,
                        "1/sqrt(8): minimum distance 2, unimodular")


BUNDLED = {"d4": d4_basis, "e8": e8_basis, "leech": leech_basis}


def named_basis(name: str, dim: int | None = None) -> LatticeBasis:
    key = name.lower()
    if key in BUNDLED:
        return BUNDLED[key]()
    if key in ("z", "zn", "cubic"):
        if dim is None:
            raise ValueError("Z^n needs a dimension")
        return zn_basis(dim)
    if key.startswith("z") and key[1:].isdigit():
        return zn_basis(int(key[1:]))
    raise ValueError(f"unknown lattice {name!r}")
