"""Quotient groups of a lattice by an orthogonal sublattice fitted in a box."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import snf
from .basis import LatticeBasis


class BoxTooSmallError(ValueError):
    pass


@dataclass(frozen=True)
class GroupStructure:
    """``Lambda / Lambda_1`` as ``Z_{d_1} x ... x Z_{d_n}`` with ``d_i | d_{i+1}``.

    ``coset_generators[i]`` (lattice coordinates) generates the ``Z_{d_i}``
    factor; ``label_transform`` maps lattice coordinates to residues.
    """

    invariant_factors: tuple[int, ...]
    coset_generators: tuple[tuple[int, ...], ...]
    label_transform: tuple[tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def nontrivial(self) -> tuple[int, ...]:
        """Indices of the factors with ``d_i > 1``."""
        return tuple(i for i, d in enumerate(self.invariant_factors) if d > 1)

    @property
    def moduli(self) -> tuple[int, ...]:
        return tuple(self.invariant_factors[i] for i in self.nontrivial)

    def coords_from_residues(self, k: Sequence[int]) -> list[int]:
        """Lattice coordinates of ``sum k_i g_i`` over the nontrivial factors."""
        idx = self.nontrivial
        if len(k) != len(idx):
            raise ValueError(f"expected {len(idx)} residues, got {len(k)}")
        n = len(self.invariant_factors)
        x = [0] * n
        for ki, i in zip(k, idx):
            ki = int(ki)
            if not 0 <= ki < self.invariant_factors[i]:
                raise ValueError(f"residue {ki} out of range for Z_{self.invariant_factors[i]}")
            if ki:
                g = self.coset_generators[i]
                for r in range(n):
                    x[r] += ki * g[r]
        return x

    def residues_from_coords(self, x: Sequence[int]) -> tuple[int, ...]:
        out = []
        for i in self.nontrivial:
            row = self.label_transform[i]
            out.append(sum(a * int(b) for a, b in zip(row, x)) % self.invariant_factors[i])
        return tuple(out)


def quotient_structure(B: LatticeBasis, B1: LatticeBasis) -> GroupStructure:
    """Group structure of ``Lambda(B) / Lambda(B1)`` from the SNF of ``B^-1 B1``."""
    Q = B.sublattice_matrix(B1)
    return structure_from_Q(Q)


def structure_from_Q(Q: Sequence[Sequence[int]]) -> GroupStructure:
    factors, U, Uinv = snf.group_decomposition(Q)
    factors = tuple(factors)
    n = len(factors)
    gens = tuple(tuple(Uinv[r][i] for r in range(n)) for i in range(n))
    return GroupStructure(factors, gens, tuple(tuple(row) for row in U))


@dataclass(frozen=True)
class BoxFit:
    """Orthogonal sublattice ``alpha * diag(v)`` fitted in the box of a layer.

    ``alpha_exact`` is the step in units of the exact basis matrix; the flat
    step is ``alpha_scale = alpha_exact * scale``.
    """

    alpha_exact: Fraction
    alpha_scale: float
    counts: tuple[int, ...]
    guard: float

    def sublattice(self, B: LatticeBasis) -> LatticeBasis:
        n = len(self.counts)
        mat = [[self.alpha_exact * self.counts[i] if i == j else 0 for j in range(n)]
               for i in range(n)]
        return LatticeBasis(mat, B.scale, f"{B.name}-orthogonal-sublattice")

    @property
    def side_exact(self) -> tuple[Fraction, ...]:
        return tuple(self.alpha_exact * v for v in self.counts)

    @property
    def side(self) -> np.ndarray:
        return self.alpha_scale * np.array(self.counts, dtype=float)


def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(math.gcd(a.numerator * b.denominator, b.numerator * a.denominator),
                    a.denominator * b.denominator)


def _frac_lcm(a: Fraction, b: Fraction) -> Fraction:
    return a * b / _frac_gcd(a, b)


def axis_step(B: LatticeBasis, i: int) -> Fraction:
    """Smallest ``s > 0`` with ``s e_i`` in the lattice (exact, basis units)."""
    col = [row[i] for row in B.inverse]
    nz = [x for x in col if x != 0]
    # s * p_k / q_k integral for all k  <=>  s in (lcm q_k / gcd p_k) Z
    den = 1
    num = 0
    for x in nz:
        den = math.lcm(den, x.denominator)
        num = math.gcd(num, x.numerator)
    return Fraction(den, num)


def orthogonal_step(B: LatticeBasis) -> Fraction:
    """Smallest ``alpha > 0`` with ``alpha Z^n`` a sublattice."""
    step = axis_step(B, 0)
    for i in range(1, B.dim):
        step = _frac_lcm(step, axis_step(B, i))
    return step


def orthogonal_fit(B: LatticeBasis, c, guard: float) -> BoxFit:
    """Largest ``alpha * diag(v)`` fitting in the box ``2*pi*c`` with a guard band.

    ``v_i = floor((2*pi*c_i - guard) / alpha)``; ``alpha`` is the minimal
    orthogonal step of ``B`` in flat units.
    """
    cv = np.asarray(list(c), dtype=float)
    if len(cv) != B.dim:
        raise ValueError("radius vector and lattice dimensions differ")
    if np.any(cv <= 0):
        raise ValueError("orthogonal fit needs a non-degenerate radius vector")
    a_exact = orthogonal_step(B)
    a_flat = float(a_exact) * B.scale
    counts = []
    for ci in cv:
        v = math.floor((2.0 * math.pi * ci - guard) / a_flat)
        if v < 1:
            raise BoxTooSmallError(f"box side {2 * math.pi * ci:.6g} holds no step {a_flat:.6g}")
        counts.append(v)
    return BoxFit(a_exact, a_flat, tuple(counts), float(guard))


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def minimality_certificate(B: LatticeBasis, alpha: Fraction) -> bool:
    """Check ``alpha e_i`` lies in the lattice for every axis and no ``alpha / p`` does.

    The valid steps form ``s0 Z`` with ``s0`` a multiple of ``1/D`` (``D`` the
    common denominator of ``B``), so any excess factor of ``alpha`` over
    ``s0`` divides ``alpha * D``; only those primes need testing.
    """
    n = B.dim
    if not all(B.contains([alpha if k == i else 0 for k in range(n)]) for i in range(n)):
        return False
    D = 1
    for row in B.matrix:
        for x in row:
            D = math.lcm(D, x.denominator)
    scaled = alpha * D
    if scaled.denominator != 1:
        return False
    for p in _prime_factors(scaled.numerator):
        smaller = alpha / p
        if all(B.contains([smaller if k == i else 0 for k in range(n)]) for i in range(n)):
            return False
    return True
