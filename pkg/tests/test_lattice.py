import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from tlsc.layering import permutation_layers
from tlsc.lattice import (BoxTooSmallError, DimensionCapError, LatticeBasis, babai,
                          closest_vector, d4_basis, e8_basis, enumerate_ball, invariant_factors,
                          leech_basis, minimality_certificate, named_basis, nearest_point,
                          orthogonal_fit, orthogonal_step, quotient_structure, smith_normal_form,
                          structure_from_Q, zn_basis)
from tlsc.lattice.basis import parse_matrix
from tlsc.lattice.cvp import lll_reduce
from tlsc.lattice.snf import SingularMatrixError, det, group_decomposition, matmul, row_basis

LEECH_ORDER = 11 * 2 ** 105


def sympy_factors(Q):
    D = sympy_snf(Matrix(Q), domain=ZZ)
    return sorted(abs(int(D[i, i])) for i in range(len(Q)))


def random_nonsingular(rng, n, lo=-9, hi=9):
    while True:
        Q = [[int(v) for v in rng.integers(lo, hi + 1, n)] for _ in range(n)]
        if det(Q) != 0:
            return Q


def test_snf_examples():
    assert invariant_factors([[2, 0], [0, 4]]) == [2, 4]
    assert invariant_factors([[2, 1], [0, 3]]) == [1, 6]
    with pytest.raises(SingularMatrixError):
        invariant_factors([[1, 2], [2, 4]])


def test_snf_contract_random():
    rng = np.random.default_rng(0)
    for _ in range(150):
        n = int(rng.integers(1, 6))
        Q = random_nonsingular(rng, n)
        U, D, V = smith_normal_form(Q)
        assert matmul(matmul(U, Q), V) == D
        assert abs(det(U)) == 1 and abs(det(V)) == 1
        diag = [D[i][i] for i in range(n)]
        assert all(D[i][j] == 0 for i in range(n) for j in range(n) if i != j)
        assert all(b % a == 0 for a, b in zip(diag, diag[1:]))
        assert diag == sympy_factors(Q)


def test_modular_decomposition_agrees():
    rng = np.random.default_rng(1)
    for _ in range(150):
        n = int(rng.integers(1, 6))
        Q = random_nonsingular(rng, n)
        f, U, Uinv = group_decomposition(Q)
        assert f == invariant_factors(Q)
        D = abs(det(Q))
        I = matmul(U, Uinv)
        assert all((I[i][j] - (i == j)) % D == 0 for i in range(n) for j in range(n))


def coset_count(group, box):
    """Number of distinct labels over all integer points of a box."""
    labels = {group.residues_from_coords(x) for x in itertools.product(*(range(b) for b in box))}
    return len(labels)


def test_quotient_examples():
    I2 = zn_basis(2)
    g = quotient_structure(I2, LatticeBasis([[3, 0], [0, 3]]))
    assert g.invariant_factors == (3, 3) and g.order == 9
    g = quotient_structure(I2, LatticeBasis([[2, 1], [0, 3]]))
    assert g.invariant_factors == (1, 6) and g.moduli == (6,)
    assert coset_count(g, (6, 6)) == 6


def test_quotient_labels_are_a_bijection():
    rng = np.random.default_rng(2)
    for _ in range(40):
        n = int(rng.integers(1, 4))
        Q = random_nonsingular(rng, n, -5, 5)
        g = structure_from_Q(Q)
        D = abs(det(Q))
        assert g.order == D
        seen = set()
        for k in itertools.product(*(range(m) for m in g.moduli)):
            x = g.coords_from_residues(k)
            assert g.residues_from_coords(x) == k
            seen.add(k)
        assert len(seen) == D
        # labels are invariant under the sublattice (columns of Q)
        for j in range(n):
            col = [Q[i][j] for i in range(n)]
            assert g.residues_from_coords(col) == tuple(0 for _ in g.moduli)
        if D ** n <= 20000:
            assert coset_count(g, [D] * n) == D


def test_residue_range_checked():
    g = structure_from_Q([[3, 0], [0, 3]])
    with pytest.raises(ValueError):
        g.coords_from_residues([3, 0])


def test_row_basis():
    b = row_basis([(1, 98), (233, 0), (0, 233)])
    assert abs(det(b)) == 233
    with pytest.raises(SingularMatrixError):
        row_basis([(1, 2), (2, 4)])


def test_bundled_determinants():
    assert e8_basis().det == 1
    assert abs(d4_basis().det) == 2
    assert abs(leech_basis().det) == 2 ** 36
    for b in (e8_basis(), d4_basis(), leech_basis()):
        assert b.det == b.recompute_det()


@pytest.mark.parametrize("basis", [d4_basis(), e8_basis()], ids=["D4", "E8"])
def test_small_lattice_minimum_norm(basis):
    B = basis.float_matrix
    short = enumerate_ball(B, np.zeros(basis.dim), math.sqrt(float(basis.min_norm2)) + 1e-9)
    norms = sorted(float(np.sum((B @ np.array(v)) ** 2)) for v in short)
    assert norms[0] == 0 and norms[1] == pytest.approx(float(basis.min_norm2))
    kissing = {4: 24, 8: 240}[basis.dim]
    assert len(short) - 1 == kissing


def test_leech_witness_vectors():
    B = leech_basis()
    witnesses = [[4, 4] + [0] * 22, [4, -4] + [0] * 22, [-3] + [1] * 23]
    for w in witnesses:
        assert sum(v * v for v in w) == 32
        assert B.contains(w)
    for j in range(24):
        col = [B.matrix[i][j] for i in range(24)]
        assert sum(v * v for v in col) >= 32
    assert B.min_distance == pytest.approx(2.0)


@pytest.mark.slow
def test_leech_has_no_shorter_vectors():
    B = leech_basis()
    cols = [[int(B.matrix[i][j]) for j in range(24)] for i in range(24)]
    R, _ = lll_reduce(cols)
    assert enumerate_ball(np.array(R, dtype=float), np.zeros(24), math.sqrt(31.5)) == [(0,) * 24]


def test_leech_contains_4z24_in_normalized_units():
    B = leech_basis()
    # 4*sqrt(8) e_i in normalized units is 32 e_i in the integer coordinates
    for i in range(24):
        assert B.contains([32 if k == i else 0 for k in range(24)])
    assert orthogonal_step(B) == 8
    assert minimality_certificate(B, Fraction(8))
    assert not minimality_certificate(B, Fraction(4))


def test_cubic_fit():
    beta = 0.3
    B = zn_basis(2).scaled(beta)
    c = (0.6, 0.8)
    fit = orthogonal_fit(B, c, beta)
    assert fit.alpha_scale == pytest.approx(beta)
    assert fit.counts == tuple(math.floor((2 * math.pi * ci - beta) / beta) for ci in c)
    for ci, side in zip(c, fit.side):
        assert side + beta <= 2 * math.pi * ci + 1e-12
    with pytest.raises(BoxTooSmallError):
        orthogonal_fit(zn_basis(2).scaled(5.0), c, 5.0)


@pytest.mark.parametrize("beta", [0.10187, None])
def test_leech_fit(beta):
    fam = permutation_layers(24, 0.1)
    c0 = fam.radii[0].array
    if beta is None:
        beta = 2 * c0.min() * math.asin(0.1 / (2 * c0.min()))
        assert beta == pytest.approx(0.1010645, abs=1e-7)
    B = leech_basis().with_min_distance(beta)
    fit = orthogonal_fit(B, fam.radii[0].entries, beta)
    assert fit.alpha_scale / beta == pytest.approx(math.sqrt(2))
    assert fit.counts == (11,) + (8,) * 23
    B1 = fit.sublattice(B)
    assert B1.det / B.det == LEECH_ORDER
    g = quotient_structure(B, B1)
    assert g.order == LEECH_ORDER
    assert g.invariant_factors == (1,) + (16,) * 11 + (32,) * 11 + (704,)


def test_leech_group_oracles():
    fam = permutation_layers(24, 0.1)
    B = leech_basis().with_min_distance(0.10187)
    fit = orthogonal_fit(B, fam.radii[5].entries, 0.10187)
    Q = B.sublattice_matrix(fit.sublattice(B))
    assert sympy_factors(Q) == [1] + [16] * 11 + [32] * 11 + [704]
    # 704 annihilates the quotient: 704 * Q^-1 is integral
    Qinv = Matrix(Q).inv()
    assert all((704 * v).is_integer for v in Qinv)
    assert not all((352 * v).is_integer for v in Qinv)


def test_nearest_point_examples():
    np.testing.assert_array_equal(nearest_point(np.eye(2), [0.4, 2.6]), [0, 3])
    A = np.diag([0.7, 1.9])
    rng = np.random.default_rng(3)
    for _ in range(50):
        t = rng.normal(size=2) * 5
        got = nearest_point(A, t)
        cands = [A @ np.array(v) for v in itertools.product(range(-30, 31), repeat=2)]
        best = min(cands, key=lambda p: np.linalg.norm(p - t))
        np.testing.assert_allclose(got, best)


def test_exact_cvp_matches_brute_force():
    rng = np.random.default_rng(4)
    for _ in range(100):
        n = int(rng.integers(2, 5))
        B = rng.normal(size=(n, n)) + 2 * np.eye(n)
        t = rng.normal(size=n)
        x = closest_vector(B, t)
        r = np.linalg.norm(B @ x - t)
        ball = enumerate_ball(B, t, r + 1e-9)
        best = min(np.linalg.norm(B @ np.array(v) - t) for v in ball)
        assert r == pytest.approx(best, abs=1e-12)
        rad = r * 1.5
        inside = enumerate_ball(B, t, rad)
        grid = [v for v in itertools.product(range(-6, 7), repeat=n)
                if np.linalg.norm(B @ np.array(v) - t) <= rad]
        if all(max(abs(c) for c in v) < 6 for v in inside):
            assert sorted(inside) == sorted(grid)


def test_babai_and_dimension_cap():
    rng = np.random.default_rng(5)
    B = leech_basis().flat_matrix
    t = rng.normal(size=24)
    x = babai(B, t)
    assert x.dtype.kind == "i"
    with pytest.raises(DimensionCapError):
        nearest_point(B, t, "exact")
    p = nearest_point(B, t, "babai")
    assert leech_basis().contains(np.rint(p * math.sqrt(8)).astype(int))


def test_lll_transform_is_unimodular():
    B = leech_basis()
    cols = [[int(B.matrix[i][j]) for j in range(24)] for i in range(24)]
    R, T = lll_reduce(cols)
    assert abs(det([[int(v) for v in row] for row in T])) == 1
    Bi = np.array(cols, dtype=object)
    assert (Bi.dot(T) == R).all()


def test_parse_and_named():
    assert parse_matrix("1 1/2\n# x\n0 3\n") == [[1, Fraction(1, 2)], [0, 3]]
    with pytest.raises(ValueError):
        parse_matrix("1 q\n")
    assert named_basis("z3").dim == 3
    assert named_basis("E8").dim == 8
    with pytest.raises(ValueError):
        named_basis("a2")
    with pytest.raises(TypeError):
        LatticeBasis([[1.5, 0], [0, 1]])
    with pytest.raises(SingularMatrixError):
        LatticeBasis([[1, 2], [2, 4]])
