"""Graded vector spaces with involutions and bilinear forms; Koszul signs.

Degrees are cohomological. Suspension lowers degrees by one. An involution is
stored as a degree-0 matrix ``J`` with ``J[i, j]`` the coefficient of basis
vector ``i`` in ``(e_j)*``. A bilinear form of degree ``d`` pairs ``x`` and
``y`` only when ``|x| + |y| = -d`` (the form is a degree-0 map to a copy of the
ground field sitting in degree ``-d``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .exactnum import Matrix, kernel_basis, rank, rref

GRADED = "graded"
PLAIN = "plain"


class StructureError(ValueError):
    """Raised when data violates a structural invariant."""


def reversal_sign(degrees: Sequence[int]) -> int:
    """Koszul sign of reversing a tensor word with the given degrees."""
    eps = 0
    tail = 0
    for d in reversed(degrees):
        eps += d * tail
        tail += d
    return -1 if eps % 2 else 1


def rotation_sign(degrees: Sequence[int]) -> int:
    """Koszul sign of moving the last tensor factor to the front."""
    if not degrees:
        raise ValueError("rotation of an empty word")
    eps = degrees[-1] * sum(degrees[:-1])
    return -1 if eps % 2 else 1


@dataclass(frozen=True, eq=False)
class BilinearForm:
    degree: int
    gram: Matrix
    symmetry: str = GRADED

    def __call__(self, i: int, j: int):
        return self.gram[i, j]

    def is_nondegenerate(self) -> bool:
        return rank(self.gram) == self.gram.nrows

    def radical(self) -> list[list]:
        """Null vectors ``v`` with ``<v, -> = 0``."""
        return kernel_basis(self.gram.transpose())


@dataclass(frozen=True, eq=False)
class GradedSpace:
    """Finite-dimensional graded space, optionally involutive and with a form."""

    names: tuple[str, ...]
    degrees: tuple[int, ...]
    involution: Matrix | None = None
    form: BilinearForm | None = None
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        if len(self.names) != len(self.degrees):
            raise StructureError("names and degrees differ in length")
        if len(set(self.names)) != len(self.names):
            raise StructureError("basis names must be unique")
        self._index.update({n: i for i, n in enumerate(self.names)})
        n = self.dim
        J = self.involution
        if J is not None:
            if J.shape != (n, n):
                raise StructureError(f"involution must be {n}x{n}")
            for i, row in enumerate(J.rows):
                for j in row:
                    if self.degrees[i] != self.degrees[j]:
                        raise StructureError(
                            f"involution mixes degrees of {self.names[j]} and {self.names[i]}"
                        )
            if J @ J != Matrix.identity(n):
                raise StructureError("involution does not square to the identity")
        if self.form is not None:
            G = self.form.gram
            if G.shape != (n, n):
                raise StructureError(f"form must be {n}x{n}")
            for i, row in enumerate(G.rows):
                for j, v in row.items():
                    if self.degrees[i] + self.degrees[j] != -self.form.degree:
                        raise StructureError(
                            f"<{self.names[i]},{self.names[j]}> is nonzero but the "
                            f"degrees do not add up to {-self.form.degree}"
                        )
                    s = self.form_sign(i, j)
                    if G[j, i] != s * v:
                        raise StructureError(
                            f"form is not {self.form.symmetry}-symmetric at "
                            f"({self.names[i]}, {self.names[j]})"
                        )

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise StructureError(f"unknown basis element {name!r}") from None

    def form_sign(self, i: int, j: int) -> int:
        if self.form is None or self.form.symmetry == PLAIN:
            return 1
        return -1 if (self.degrees[i] * self.degrees[j]) % 2 else 1

    def star(self, j: int) -> dict:
        """Image of basis vector ``j`` under the involution, sparse."""
        if self.involution is None:
            raise StructureError("space has no involution")
        return self.involution.column(j)

    def form_is_invariant(self) -> bool:
        if self.involution is None or self.form is None:
            return False
        J, G = self.involution, self.form.gram
        return J.transpose() @ G @ J == G

    def replace(self, **kw) -> "GradedSpace":
        args = dict(
            names=self.names,
            degrees=self.degrees,
            involution=self.involution,
            form=self.form,
        )
        args.update(kw)
        return GradedSpace(**args)

    def __repr__(self):
        body = ", ".join(f"{n}:{d}" for n, d in zip(self.names, self.degrees))
        return f"GradedSpace({body})"


def identity_involution(V: GradedSpace) -> GradedSpace:
    return V.replace(involution=Matrix.identity(V.dim))


def suspend(V: GradedSpace, n: int = 1) -> GradedSpace:
    """n-fold suspension (n < 0 desuspends). The form is not transported."""
    return GradedSpace(
        names=V.names,
        degrees=tuple(d - n for d in V.degrees),
        involution=V.involution,
        form=None,
    )


def desuspend(V: GradedSpace, n: int = 1) -> GradedSpace:
    return suspend(V, -n)


def _dual_name(name: str) -> str:
    return name[:-2] if name.endswith("^v") else name + "^v"


def inverse_form(form: BilinearForm) -> BilinearForm:
    """The induced form on the dual, Gram matrix ``(G^-1)^T`` of degree ``-d``."""
    G = form.gram
    n = G.nrows
    aug = G.hstack(Matrix.identity(n))
    rows, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise StructureError("form is degenerate; no inverse form")
    inv = Matrix(n, n, [{j - n: v for j, v in r.items() if j >= n} for r in rows])
    return BilinearForm(-form.degree, inv.transpose(), form.symmetry)


def dualize(V: GradedSpace) -> GradedSpace:
    """Dual space: negated degrees, involution ``phi* = -phi(-*)`` i.e. ``-J^T``."""
    J = V.involution
    form = None
    if V.form is not None and V.form.is_nondegenerate():
        form = inverse_form(V.form)
    return GradedSpace(
        names=tuple(_dual_name(n) for n in V.names),
        degrees=tuple(-d for d in V.degrees),
        involution=None if J is None else -J.transpose(),
        form=form,
    )


def words(dim: int, n: int):
    """Basis words of the n-th tensor power in lexicographic order."""
    return itertools.product(range(dim), repeat=n)


def word_index(word: Sequence[int], dim: int) -> int:
    k = 0
    for a in word:
        k = k * dim + a
    return k


def tensor_power_star(W: GradedSpace, word: Sequence[int]) -> dict:
    """``(w_1 ... w_n)* = (-1)^eps w_n* ... w_1*`` as a sparse word vector."""
    degs = [W.degrees[a] for a in word]
    sign = reversal_sign(degs)
    out = {(): sign}
    for a in reversed(word):
        img = W.star(a)
        nxt = {}
        for u, c in out.items():
            for b, x in img.items():
                nxt[u + (b,)] = nxt.get(u + (b,), 0) + c * x
        out = {u: c for u, c in nxt.items() if c}
    return out


def tensor_involution(W: GradedSpace, n: int) -> Matrix:
    """Matrix of the involution on the n-th tensor power of W."""
    if n < 1:
        raise ValueError("tensor power must be at least 1")
    dim = W.dim
    cols = []
    for word in words(dim, n):
        img = tensor_power_star(W, word)
        cols.append({word_index(u, dim): c for u, c in img.items()})
    return Matrix.from_sparse_columns(cols, dim**n)


def rotation_matrix(W: GradedSpace, n: int) -> Matrix:
    """Matrix of ``r(w_1..w_n) = ± w_n w_1 .. w_{n-1}`` on the n-th tensor power."""
    dim = W.dim
    cols = []
    for word in words(dim, n):
        s = rotation_sign([W.degrees[a] for a in word])
        cols.append({word_index((word[-1],) + word[:-1], dim): s})
    return Matrix.from_sparse_columns(cols, dim**n)
