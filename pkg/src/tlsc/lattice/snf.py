"""Smith normal form over the integers with unimodular transforms.

All arithmetic uses Python ints, so entries may grow without overflow.
"""
from __future__ import annotations

import math
from typing import Sequence

IntMatrix = list[list[int]]


class SingularMatrixError(ValueError):
    pass


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def det(A: Sequence[Sequence]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    M = [list(r) for r in A]
    n = len(M)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1] if n else 1


class _Work:
    """Matrix under reduction plus the row/column transforms applied so far.

    Invariant: ``U @ Q @ V == A`` and ``U @ Uinv == I``.
    """

    def __init__(self, Q: IntMatrix):
        n = len(Q)
        self.n = n
        self.A = [list(map(int, r)) for r in Q]
        self.U = identity(n)
        self.Uinv = identity(n)
        self.V = identity(n)

    def swap_rows(self, i, j):
        if i == j:
            return
        self.A[i], self.A[j] = self.A[j], self.A[i]
        self.U[i], self.U[j] = self.U[j], self.U[i]
        for row in self.Uinv:
            row[i], row[j] = row[j], row[i]

    def swap_cols(self, i, j):
        if i == j:
            return
        for M in (self.A, self.V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(self, dst, src, q):
        """row[dst] += q * row[src]"""
        if q == 0:
            return
        for M in (self.A, self.U):
            rs, rd = M[src], M[dst]
            for k in range(self.n):
                rd[k] += q * rs[k]
        for row in self.Uinv:
            row[src] -= q * row[dst]

    def add_col(self, dst, src, q):
        """col[dst] += q * col[src]"""
        if q == 0:
            return
        for M in (self.A, self.V):
            for row in M:
                row[dst] += q * row[src]

    def negate_row(self, i):
        self.A[i] = [-x for x in self.A[i]]
        self.U[i] = [-x for x in self.U[i]]
        for row in self.Uinv:
            row[i] = -row[i]


def _min_pivot(A, t, n):
    best = None
    for i in range(t, n):
        for j in range(t, n):
            v = abs(A[i][j])
            if v and (best is None or v < best[0]):
                best = (v, i, j)
                if v == 1:
                    return best
    return best


def smith_decomposition(Q: Sequence[Sequence[int]]):
    """Return ``(U, D, V, Uinv)`` with ``U Q V = D`` diagonal, ``d_i | d_{i+1}``.

    ``U`` and ``V`` are unimodular; ``Uinv`` is the exact inverse of ``U``.
    """
    n = len(Q)
    if any(len(r) != n for r in Q):
        raise ValueError("Smith normal form needs a square matrix")
    w = _Work([list(r) for r in Q])
    A = w.A
    for t in range(n):
        piv = _min_pivot(A, t, n)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        _, pi, pj = piv
        w.swap_rows(t, pi)
        w.swap_cols(t, pj)
        while True:
            dirty = False
            for i in range(t + 1, n):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    w.add_row(i, t, -q)
                    if A[i][t]:
                        w.swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    w.add_col(j, t, -q)
                    if A[t][j]:
                        w.swap_cols(t, j)
                        dirty = True
            if dirty:
                continue
            p = A[t][t]
            bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, n)
                        if A[i][j] % p), None)
            if bad is None:
                break
            w.add_row(t, bad[0], 1)
        if A[t][t] < 0:
            w.negate_row(t)
    return w.U, A, w.V, w.Uinv


def smith_normal_form(Q: Sequence[Sequence[int]]):
    """Return ``(U, D, V)`` with ``U Q V = D``."""
    U, D, V, _ = smith_decomposition(Q)
    return U, D, V


def invariant_factors(Q: Sequence[Sequence[int]]) -> list[int]:
    _, D, _, _ = smith_decomposition(Q)
    return [D[i][i] for i in range(len(D))]


def row_basis(vectors: Sequence[Sequence[int]]) -> IntMatrix:
    """Echelon basis of the integer row lattice spanned by ``vectors`` (full rank)."""
    rows = [list(map(int, v)) for v in vectors]
    n = len(rows[0])
    basis = []
    for col in range(n):
        live = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            p = live[0]
            nxt = [p]
            for r in live[1:]:
                q = r[col] // p[col]
                r = [a - q * b for a, b in zip(r, p)]
                (nxt if r[col] else rest).append(r)
            live = nxt
        if not live:
            raise SingularMatrixError("vectors do not span a full-rank lattice")
        piv = live[0]
        if piv[col] < 0:
            piv = [-a for a in piv]
        basis.append(piv)
        rows = [r for r in rest if any(r)]
    return basis


def group_decomposition(Q: Sequence[Sequence[int]]):
    """Structure of ``Z^n / Q Z^n`` by elimination modulo ``D = |det Q|``.

    Since ``D Z^n`` lies in ``Q Z^n``, all entries may be reduced modulo
    ``D``, which keeps them small where exact elimination can blow up.
    Returns ``(factors, U, Uinv)``: ``x -> (U x)_i mod d_i`` maps cosets to
    residues and column ``i`` of ``Uinv`` represents the generator of
    ``Z_{d_i}``. ``U`` and ``Uinv`` are exact only modulo ``D``.
    """
    n = len(Q)
    if any(len(r) != n for r in Q):
        raise ValueError("Smith normal form needs a square matrix")
    D = abs(det(Q))
    if D == 0:
        raise SingularMatrixError("matrix is singular")
    w = _Work([[int(x) % D for x in r] for r in Q])
    A = w.A

    def reduce():
        for M in (A, w.U):
            for row in M:
                for k in range(n):
                    row[k] %= D
        for row in w.Uinv:
            for k in range(n):
                row[k] %= D

    factors = []
    for t in range(n):
        piv = _min_pivot(A, t, n)
        if piv is None:
            factors.extend([D] * (n - t))
            break
        _, pi, pj = piv
        w.swap_rows(t, pi)
        w.swap_cols(t, pj)
        while True:
            dirty = False
            for i in range(t + 1, n):
                if A[i][t]:
                    w.add_row(i, t, -(A[i][t] // A[t][t]))
                    if A[i][t]:
                        w.swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, n):
                if A[t][j]:
                    w.add_col(j, t, -(A[t][j] // A[t][t]))
                    if A[t][j]:
                        w.swap_cols(t, j)
                        dirty = True
            reduce()
            if dirty or A[t][t] == 0:
                if A[t][t] == 0:
                    piv = _min_pivot(A, t, n)
                    if piv is None:
                        break
                    w.swap_rows(t, piv[1])
                    w.swap_cols(t, piv[2])
                continue
            # the implicit column D e_t lets the pivot drop to gcd(p, D)
            A[t][t] = math.gcd(A[t][t], D)
            p = A[t][t]
            bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, n)
                        if A[i][j] % p), None)
            if bad is None:
                break
            w.add_row(t, bad[0], 1)
            reduce()
        if len(factors) == n:
            break
        factors.append(A[t][t] if A[t][t] else D)
    if math.prod(factors) != D:
        raise ArithmeticError("modular Smith form lost track of the determinant")
    return factors, w.U, w.Uinv
