import random
from fractions import Fraction

import gmpy2
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from dihedra.exactnum import GF, EchelonBasis, Matrix, Q, ShapeError, kernel_basis, quotient_dim, rank, rref

small = st.integers(-4, 4)


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def test_parse_rationals():
    assert Q("3/6") == gmpy2.mpq(1, 2)
    assert Q(-4) == -4
    assert Q(Fraction(2, 3)) == gmpy2.mpq(2, 3)
    with pytest.raises(TypeError):
        Q(0.5)


def test_prime_field_arithmetic():
    F = GF(7)
    assert F("1/2") * 2 == 1
    assert F(3) + F(5) == 1
    assert F(3) - 5 == F(5)
    assert (F(3) / F(4)) * 4 == 3
    with pytest.raises(ZeroDivisionError):
        F("1/7")
    with pytest.raises(ValueError):
        GF(9)


@given(st.integers(-50, 50), st.integers(-50, 50), st.sampled_from([3, 5, 7, 11]))
def test_prime_field_matches_integers_mod_p(a, b, p):
    F = GF(p)
    assert (F(a) * F(b)).v == (a * b) % p
    assert (F(a) + F(b)).v == (a + b) % p
    if b % p:
        assert (F(a) / F(b) * F(b)).v == a % p


@given(matrices())
def test_rank_matches_sympy(rows):
    assert rank(Matrix.from_dense(rows)) == sympy.Matrix(rows).rank()


@given(matrices())
def test_kernel_matches_sympy(rows):
    M = Matrix.from_dense(rows)
    K = kernel_basis(M)
    assert len(K) == len(sympy.Matrix(rows).nullspace())
    for v in K:
        assert not M.apply({j: c for j, c in enumerate(v) if c})
    if K:
        assert rank(Matrix.from_dense(K)) == len(K)


@given(matrices())
def test_rref_is_reduced(rows):
    R, piv = rref(Matrix.from_dense(rows))
    assert piv == sorted(piv)
    for r, p in zip(R, piv):
        assert r[p] == 1
        assert all(j >= p for j in r)
        for other, q in zip(R, piv):
            if other is not r:
                assert other.get(p, 0) == 0


def test_rank_over_prime_field():
    F = GF(3)
    M = Matrix.from_dense([[F(1), F(2)], [F(2), F(1)]])
    assert rank(M) == 1
    assert rank(Matrix.from_dense([[1, 2], [2, 1]])) == 2


def test_quotient_dim():
    amb = Matrix.identity(3)
    sub = Matrix.from_dense([[1], [1], [0]])
    assert quotient_dim(amb, sub) == 2


def test_shape_errors():
    with pytest.raises(ShapeError):
        Matrix.identity(2) @ Matrix.identity(3)


@given(matrices(4, 6), st.randoms(use_true_random=False))
def test_echelon_coordinates(rows, rng):
    vecs = [{j: c for j, c in enumerate(r) if c} for r in rows]
    E = EchelonBasis(vecs, len(rows[0]))
    coeffs = [rng.randint(-3, 3) for _ in E.vectors]
    target = {}
    for c, v in zip(coeffs, E.vectors):
        for j, x in v.items():
            target[j] = target.get(j, 0) + c * x
    target = {j: x for j, x in target.items() if x}
    got = E.coordinates(target)
    assert [got.get(k, 0) for k in range(len(E.vectors))] == coeffs
    assert len(E.vectors) == rank(Matrix.from_dense(rows))


def test_echelon_rejects_outside_vectors():
    E = EchelonBasis([{0: 1}], 2)
    assert not E.contains({1: 1})
    with pytest.raises(ValueError):
        E.coordinates({1: 1})


def test_matrix_algebra():
    rng = random.Random(4)
    A = Matrix.from_dense([[rng.randint(-3, 3) for _ in range(3)] for _ in range(3)])
    B = Matrix.from_dense([[rng.randint(-3, 3) for _ in range(3)] for _ in range(3)])
    assert (A @ B).transpose() == B.transpose() @ A.transpose()
    assert A + B - B == A
    assert (A.scale(2) - A - A).is_zero()
    dense = sympy.Matrix(A.to_dense()) * sympy.Matrix(B.to_dense())
    assert (A @ B).to_dense() == dense.tolist()
