import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from builders import random_space
from dihedra.exactnum import Matrix
from dihedra.graded import (
    BilinearForm,
    GradedSpace,
    StructureError,
    desuspend,
    dualize,
    inverse_form,
    reversal_sign,
    rotation_matrix,
    rotation_sign,
    suspend,
    tensor_involution,
    tensor_power_star,
)

degree_lists = st.lists(st.integers(-3, 3), min_size=1, max_size=7)


def koszul_sign(degrees, perm):
    """Sign of sending position perm[k] to position k, by counting crossed odd pairs."""
    s = 0
    for a, b in itertools.combinations(range(len(perm)), 2):
        if perm[a] > perm[b]:
            s += degrees[perm[a]] * degrees[perm[b]]
    return -1 if s % 2 else 1


@given(degree_lists)
def test_reversal_sign_by_inversions(degs):
    n = len(degs)
    assert reversal_sign(degs) == koszul_sign(degs, list(range(n))[::-1])
    assert reversal_sign(degs) == reversal_sign(degs[::-1])


@given(degree_lists)
def test_rotation_sign_by_inversions(degs):
    n = len(degs)
    assert rotation_sign(degs) == koszul_sign(degs, [n - 1] + list(range(n - 1)))


def test_rotation_of_empty_word():
    with pytest.raises(ValueError):
        rotation_sign([])


def _odd_line():
    return GradedSpace(("w",), (1,), Matrix.from_dense([[-1]]))


def test_star_on_odd_line():
    W = _odd_line()
    assert tensor_power_star(W, (0, 0)) == {(0, 0): -1}
    assert tensor_power_star(W, (0, 0, 0)) == {(0, 0, 0): 1}
    assert tensor_involution(W, 1) == Matrix.from_dense([[-1]])


def test_rotation_on_odd_line():
    W = _odd_line()
    assert rotation_matrix(W, 2) == Matrix.from_dense([[-1]])
    assert rotation_matrix(W, 3) == Matrix.from_dense([[1]])


@given(st.randoms(use_true_random=False), st.integers(1, 4))
def test_tensor_involution_squares_to_identity(rng, n):
    W = random_space(rng, max_dim=2)
    S = tensor_involution(W, n)
    assert S @ S == Matrix.identity(W.dim**n)


@given(st.randoms(use_true_random=False), st.integers(1, 4))
def test_rotation_has_order_n(rng, n):
    W = random_space(rng, max_dim=2)
    R = rotation_matrix(W, n)
    P = Matrix.identity(W.dim**n)
    for _ in range(n):
        P = R @ P
    assert P == Matrix.identity(W.dim**n)


def test_dualize_twice_recovers_space():
    rng = random.Random(2)
    for _ in range(20):
        V = random_space(rng)
        U = dualize(dualize(V))
        assert U.degrees == V.degrees
        assert U.involution == V.involution


def test_dualize_negates_degrees():
    V = GradedSpace(("a", "b"), (0, 2), Matrix.identity(2))
    D = dualize(V)
    assert D.degrees == (0, -2)
    assert D.involution == Matrix.identity(2).scale(-1)


def test_suspension_shifts():
    V = GradedSpace(("a",), (0,), form=BilinearForm(0, Matrix.from_dense([[1]])))
    assert suspend(V).degrees == (-1,)
    assert desuspend(V).degrees == (1,)
    assert suspend(V).form is None


def test_involution_validation():
    with pytest.raises(StructureError):
        GradedSpace(("a", "b"), (0, 1), Matrix.from_dense([[0, 1], [1, 0]]))
    with pytest.raises(StructureError):
        GradedSpace(("a",), (0,), Matrix.from_dense([[2]]))
    with pytest.raises(StructureError):
        GradedSpace(("a", "a"), (0, 0))


def test_form_validation():
    with pytest.raises(StructureError):
        GradedSpace(("a", "b"), (0, 1), form=BilinearForm(0, Matrix.from_dense([[0, 1], [1, 0]])))
    # graded symmetry: odd elements pair antisymmetrically
    with pytest.raises(StructureError):
        GradedSpace(("a", "b"), (1, -1), form=BilinearForm(0, Matrix.from_dense([[0, 1], [1, 0]])))
    V = GradedSpace(("a", "b"), (1, -1), form=BilinearForm(0, Matrix.from_dense([[0, 1], [-1, 0]])))
    assert V.form.is_nondegenerate()


def test_degenerate_form_radical():
    V = GradedSpace(("a", "b"), (0, 0), form=BilinearForm(0, Matrix.from_dense([[1, 0], [0, 0]])))
    assert not V.form.is_nondegenerate()
    assert V.form.radical() == [[0, 1]]


def test_inverse_form_symmetry():
    G = Matrix.from_dense([[0, 1], [-1, 0]])
    inv = inverse_form(BilinearForm(0, G))
    assert inv.degree == 0
    assert inv.gram @ G.transpose() == Matrix.identity(2)


def test_invariant_form():
    J = Matrix.from_dense([[0, 1], [1, 0]])
    V = GradedSpace(("a", "b"), (0, 0), J, BilinearForm(0, Matrix.identity(2)))
    assert V.form_is_invariant()
    U = V.replace(form=BilinearForm(0, Matrix.from_dense([[1, 0], [0, 2]])))
    assert not U.form_is_invariant()
