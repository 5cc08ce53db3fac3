"""Small named algebras used as fixtures by the tests and the command line."""

from __future__ import annotations

from .ainfty import AInftyStructure
from .exactnum import Matrix
from .graded import BilinearForm, GradedSpace


def _space(names, degrees, J=None, gram=None, form_degree=0):
    form = None if gram is None else BilinearForm(form_degree, Matrix.from_dense(gram))
    inv = None if J is None else Matrix.from_dense(J)
    return GradedSpace(tuple(names), tuple(degrees), inv, form)


def ground_field(N: int = 5, unital: bool = True, with_form: bool = True) -> AInftyStructure:
    """k in degree 0, identity involution, <1,1> = 1; zero product if not unital."""
    V = _space(["1"], [0], [[1]], [[1]] if with_form else None)
    mult = {(0, 0): {0: 1}} if unital else {}
    return AInftyStructure.from_dga(V, N, mult)


def dual_numbers(N: int = 5, form: str = "frobenius") -> AInftyStructure:
    """k[x]/(x^2), identity involution. ``form`` is frobenius, degenerate or none."""
    grams = {"frobenius": [[0, 1], [1, 0]], "degenerate": [[1, 0], [0, 0]], "none": None}
    V = _space(["1", "x"], [0, 0], [[1, 0], [0, 1]], grams[form])
    mult = {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}}
    return AInftyStructure.from_dga(V, N, mult)


def product_field(N: int = 5) -> AInftyStructure:
    """k x k with idempotents swapped by the involution; trace form."""
    V = _space(["a", "b"], [0, 0], [[0, 1], [1, 0]], [[1, 0], [0, 1]])
    mult = {(0, 0): {0: 1}, (1, 1): {1: 1}}
    return AInftyStructure.from_dga(V, N, mult)


def upper_triangular(N: int = 4) -> AInftyStructure:
    """2x2 upper triangular matrices; the involution is the anti-transpose."""
    J = [[0, 0, 1], [0, 1, 0], [1, 0, 0]]
    V = _space(["e11", "e12", "e22"], [0, 0, 0], J)
    mult = {
        (0, 0): {0: 1},
        (0, 1): {1: 1},
        (1, 2): {1: 1},
        (2, 2): {2: 1},
    }
    return AInftyStructure.from_dga(V, N, mult)


def exterior(N: int = 4, with_form: bool = True) -> AInftyStructure:
    """Exterior algebra on one generator of degree 1; form pairs 1 with x."""
    gram = [[0, 1], [1, 0]] if with_form else None
    V = _space(["1", "x"], [0, 1], [[1, 0], [0, 1]], gram, form_degree=-1)
    mult = {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}}
    return AInftyStructure.from_dga(V, N, mult)


def trivial_line(N: int = 5, degree: int = 0) -> AInftyStructure:
    """One-dimensional space with the zero structure, identity involution, unit form."""
    gram = [[1]] if degree == 0 else None
    V = _space(["e"], [degree], [[1]], gram)
    return AInftyStructure.zero(V, N)


CATALOG = {
    "ground_field": ground_field,
    "dual_numbers": dual_numbers,
    "product_field": product_field,
    "upper_triangular": upper_triangular,
    "exterior": exterior,
    "trivial_line": trivial_line,
}
