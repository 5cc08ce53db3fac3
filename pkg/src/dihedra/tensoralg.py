"""Weight-truncated tensor algebra, its derivations and the cyclic/dihedral actions.

Elements of the algebra are sparse dicts ``{word: coefficient}`` where a word
is a tuple of generator indices; the empty word is the unit. Everything of
weight (word length) above ``max_weight`` is dropped, which is the quotient by
an ideal preserved by every derivation without a weight-0 component.
"""

from __future__ import annotations

from math import factorial
from typing import Iterable, Sequence

from . import graded
from .exactnum import Matrix, rref
from .graded import GradedSpace, StructureError, rotation_sign

CYCLIC = "cyclic"
DIHEDRAL_PLUS = "dihedral+"
DIHEDRAL_MINUS = "dihedral-"
GROUPS = (CYCLIC, DIHEDRAL_PLUS, DIHEDRAL_MINUS)


# ----------------------------------------------------------------------------
# sparse vectors


def vadd(acc: dict, vec: dict, c=1) -> dict:
    """acc += c * vec, in place."""
    for k, v in vec.items():
        x = acc.get(k, 0) + c * v
        if x:
            acc[k] = x
        else:
            acc.pop(k, None)
    return acc


def vscale(vec: dict, c) -> dict:
    if not c:
        return {}
    return {k: c * v for k, v in vec.items()}


def veq(a: dict, b: dict) -> bool:
    return all(a.get(k, 0) == b.get(k, 0) for k in set(a) | set(b))


def by_weight(vec: dict) -> dict[int, dict]:
    out: dict[int, dict] = {}
    for w, c in vec.items():
        out.setdefault(len(w), {})[w] = c
    return out


# ----------------------------------------------------------------------------


class TensorAlgebra:
    """Completed tensor algebra on a generator space, truncated above ``max_weight``."""

    def __init__(self, generators: GradedSpace, max_weight: int):
        if max_weight < 1:
            raise ValueError("max_weight must be at least 1")
        self.W = generators
        self.N = max_weight
        self.dim = generators.dim
        self.degrees = generators.degrees
        self._words: dict[int, list] = {}

    @classmethod
    def on_dual(cls, V: GradedSpace, max_weight: int) -> "TensorAlgebra":
        """The algebra on the desuspended dual of ``V``."""
        return cls(graded.desuspend(graded.dualize(V)), max_weight)

    def same_as(self, other: "TensorAlgebra") -> bool:
        return self.N == other.N and self.degrees == other.degrees

    def word_degree(self, word: Sequence[int]) -> int:
        d = self.degrees
        return sum(d[a] for a in word)

    def words(self, n: int) -> list[tuple]:
        if n not in self._words:
            self._words[n] = list(graded.words(self.dim, n))
        return self._words[n]

    def words_by_degree(self, n: int) -> dict[int, list]:
        out: dict[int, list] = {}
        for w in self.words(n):
            out.setdefault(self.word_degree(w), []).append(w)
        return out

    def generator(self, i: int) -> dict:
        return {(i,): 1}

    def mul(self, x: dict, y: dict) -> dict:
        out: dict = {}
        N = self.N
        for u, a in x.items():
            for v, b in y.items():
                if len(u) + len(v) <= N:
                    w = u + v
                    c = out.get(w, 0) + a * b
                    if c:
                        out[w] = c
                    else:
                        out.pop(w, None)
        return out

    def truncate(self, vec: dict) -> dict:
        return {w: c for w, c in vec.items() if len(w) <= self.N}

    def star(self, vec: dict) -> dict:
        """The algebra involution (anti-automorphism) extended from the generators."""
        out: dict = {}
        for w, c in vec.items():
            if not w:
                vadd(out, {(): c})
            else:
                vadd(out, graded.tensor_power_star(self.W, w), c)
        return out

    def rotate(self, vec: dict) -> dict:
        out: dict = {}
        for w, c in vec.items():
            s = rotation_sign([self.degrees[a] for a in w])
            vadd(out, {(w[-1],) + w[:-1]: s * c})
        return out

    def __repr__(self):
        return f"TensorAlgebra(dim={self.dim}, degrees={self.degrees}, N={self.N})"


# ----------------------------------------------------------------------------


class Derivation:
    """A derivation of the truncated tensor algebra, fixed by its generator images.

    ``images[i]`` is the (sparse) value on generator ``i``. The weight-``n``
    component is the part of the images made of words of length ``n``.
    """

    __slots__ = ("alg", "degree", "images")

    def __init__(self, alg: TensorAlgebra, degree: int, images: Sequence[dict]):
        if len(images) != alg.dim:
            raise ValueError(f"need {alg.dim} generator images, got {len(images)}")
        self.alg = alg
        self.degree = degree
        self.images = tuple(
            {w: c for w, c in img.items() if c and len(w) <= alg.N} for img in images
        )

    @classmethod
    def zero(cls, alg: TensorAlgebra, degree: int) -> "Derivation":
        return cls(alg, degree, [{} for _ in range(alg.dim)])

    @classmethod
    def from_entries(
        cls, alg: TensorAlgebra, degree: int, entries: Iterable[tuple[int, tuple, object]]
    ) -> "Derivation":
        imgs: list[dict] = [{} for _ in range(alg.dim)]
        for i, word, c in entries:
            vadd(imgs[i], {tuple(word): c})
        return cls(alg, degree, imgs)

    @classmethod
    def elementary(cls, alg: TensorAlgebra, gen: int, word: tuple) -> "Derivation":
        deg = alg.word_degree(word) - alg.degrees[gen]
        imgs: list[dict] = [{} for _ in range(alg.dim)]
        imgs[gen] = {tuple(word): 1}
        return cls(alg, deg, imgs)

    # -- bookkeeping

    def entries(self):
        for i, img in enumerate(self.images):
            for w, c in sorted(img.items()):
                yield i, w, c

    def component(self, n: int) -> "Derivation":
        return Derivation(
            self.alg,
            self.degree,
            [{w: c for w, c in img.items() if len(w) == n} for img in self.images],
        )

    def weights(self) -> set[int]:
        return {len(w) for img in self.images for w in img}

    def restrict_weights(self, lo: int = 0, hi: int | None = None) -> "Derivation":
        hi = self.alg.N if hi is None else hi
        return Derivation(
            self.alg,
            self.degree,
            [{w: c for w, c in img.items() if lo <= len(w) <= hi} for img in self.images],
        )

    def homogeneity_defects(self) -> list[tuple[int, tuple]]:
        """Entries whose degree differs from ``self.degree``."""
        alg = self.alg
        return [
            (i, w)
            for i, img in enumerate(self.images)
            for w in img
            if alg.word_degree(w) - alg.degrees[i] != self.degree
        ]

    def is_zero(self) -> bool:
        return not any(self.images)

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return all(veq(a, b) for a, b in zip(self.images, other.images))

    def __hash__(self):
        return id(self)

    def _check(self, other: "Derivation"):
        if not self.alg.same_as(other.alg):
            raise ValueError("derivations live on different truncated algebras")

    # -- linear structure

    def __add__(self, other: "Derivation") -> "Derivation":
        self._check(other)
        if self.degree != other.degree and not (self.is_zero() or other.is_zero()):
            raise ValueError("adding derivations of different degrees")
        deg = other.degree if self.is_zero() else self.degree
        return Derivation(
            self.alg, deg, [vadd(dict(a), b) for a, b in zip(self.images, other.images)]
        )

    def __neg__(self) -> "Derivation":
        return self.scale(-1)

    def __sub__(self, other: "Derivation") -> "Derivation":
        return self + (-other)

    def scale(self, c) -> "Derivation":
        return Derivation(self.alg, self.degree, [vscale(img, c) for img in self.images])

    __rmul__ = scale

    # -- action

    def apply(self, vec: dict) -> dict:
        """Leibniz extension ``xi(a b) = xi(a) b + (-1)^{|xi||a|} a xi(b)``."""
        alg = self.alg
        N, degs, imgs = alg.N, alg.degrees, self.images
        odd = self.degree % 2
        out: dict = {}
        for word, coef in vec.items():
            k = len(word)
            pre = 0
            for p, a in enumerate(word):
                img = imgs[a]
                if img:
                    c0 = -coef if (odd and pre % 2) else coef
                    head, tail = word[:p], word[p + 1 :]
                    for u, c in img.items():
                        if k - 1 + len(u) <= N:
                            w = head + u + tail
                            x = out.get(w, 0) + c0 * c
                            if x:
                                out[w] = x
                            else:
                                out.pop(w, None)
                pre += degs[a]
        return out

    def __call__(self, vec: dict) -> dict:
        return self.apply(vec)

    def compose_images(self, other: "Derivation") -> list[dict]:
        """Generator values of ``self o other`` (not a derivation in general)."""
        return [self.apply(img) for img in other.images]

    def bracket(self, other: "Derivation") -> "Derivation":
        """Graded commutator ``[x, y] = x y - (-1)^{|x||y|} y x``."""
        self._check(other)
        sign = -1 if (self.degree * other.degree) % 2 else 1
        imgs = []
        for a, b in zip(self.compose_images(other), other.compose_images(self)):
            imgs.append(vadd(a, b, -sign))
        return Derivation(self.alg, self.degree + other.degree, imgs)

    def square_images(self) -> list[dict]:
        """Generator values of ``xi o xi``."""
        return self.compose_images(self)

    def star(self) -> "Derivation":
        """``xi*(x) = xi(x*)*``."""
        alg = self.alg
        imgs = []
        for j in range(alg.dim):
            imgs.append(alg.star(self.apply(alg.star({(j,): 1}))))
        return Derivation(alg, self.degree, imgs)

    def plus_minus(self) -> tuple["Derivation", "Derivation"]:
        s = self.star()
        half = _half(self)
        return (self + s).scale(half), (self - s).scale(half)

    def __repr__(self):
        nnz = sum(map(len, self.images))
        return f"Derivation(degree={self.degree}, weights={sorted(self.weights())}, nnz={nnz})"


def _half(xi: Derivation):
    from .exactnum import Q

    for img in xi.images:
        for c in img.values():
            if hasattr(c, "p"):
                return type(c)(Q(1) / 2, c.p)
    return Q(1) / 2


def commutator(xi: Derivation, eta: Derivation) -> Derivation:
    return xi.bracket(eta)


def derivation_involution(xi: Derivation) -> Derivation:
    return xi.star()


def plus_minus_split(xi: Derivation) -> tuple[Derivation, Derivation]:
    return xi.plus_minus()


def leibniz_apply(xi: Derivation, vec: dict) -> dict:
    return xi.apply(vec)


# ----------------------------------------------------------------------------
# derivation bases


def derivation_basis(alg: TensorAlgebra, degree: int, weights: Iterable[int]) -> list[tuple]:
    """Elementary derivations ``w_i -> word`` of a given degree, as (gen, word) pairs.

    Ordered by weight, then generator, then word.
    """
    out = []
    for n in weights:
        by_deg = alg.words_by_degree(n)
        for i in range(alg.dim):
            for w in by_deg.get(alg.degrees[i] + degree, []):
                out.append((i, w))
    return out


# ----------------------------------------------------------------------------
# algebra maps


class AlgebraMap:
    """Degree-0 algebra map between truncated tensor algebras, fixed on generators.

    ``images[i]`` is the value on generator ``i`` of the source, as an element
    of the target algebra with no weight-0 part.
    """

    def __init__(self, source: TensorAlgebra, target: TensorAlgebra, images: Sequence[dict]):
        if len(images) != source.dim:
            raise ValueError("one image per source generator required")
        if source.N != target.N:
            raise ValueError("truncation mismatch")
        for img in images:
            if () in img and img[()]:
                raise StructureError("algebra map images must have no weight-0 part")
        self.source = source
        self.target = target
        self.images = tuple(
            {w: c for w, c in img.items() if c and len(w) <= target.N} for img in images
        )

    @classmethod
    def identity(cls, alg: TensorAlgebra) -> "AlgebraMap":
        return cls(alg, alg, [{(i,): 1} for i in range(alg.dim)])

    @classmethod
    def linear(cls, source: TensorAlgebra, target: TensorAlgebra, A: Matrix) -> "AlgebraMap":
        """``w_i -> sum_j A[j, i] w_j``."""
        return cls(source, target, [{(j,): c for j, c in A.column(i).items()} for i in range(source.dim)])

    def apply(self, vec: dict) -> dict:
        tgt = self.target
        out: dict = {}
        for word, c in vec.items():
            prod = {(): c}
            for a in word:
                prod = tgt.mul(prod, self.images[a])
                if not prod:
                    break
            vadd(out, prod)
        return out

    __call__ = apply

    def compose(self, other: "AlgebraMap") -> "AlgebraMap":
        """``self o other``."""
        return AlgebraMap(other.source, self.target, [self.apply(img) for img in other.images])

    def linear_part(self) -> Matrix:
        cols = []
        for img in self.images:
            cols.append({w[0]: c for w, c in img.items() if len(w) == 1})
        return Matrix.from_sparse_columns(cols, self.target.dim)

    def inverse(self) -> "AlgebraMap":
        """Inverse of an automorphism with invertible linear part."""
        if self.source.dim != self.target.dim:
            raise ValueError("not an automorphism")
        A = self.linear_part()
        n = A.nrows
        rows, piv = rref(A.hstack(Matrix.identity(n)))
        if piv[:n] != list(range(n)):
            raise StructureError("linear part is not invertible")
        Ainv = Matrix(n, n, [{j - n: v for j, v in r.items() if j >= n} for r in rows])
        lin_inv = AlgebraMap(self.target, self.source, [
            {(j,): c for j, c in Ainv.column(i).items()} for i in range(n)
        ])
        psi = lin_inv
        for _ in range(self.source.N):
            phipsi = self.compose(psi)
            err = [vadd(dict(img), {(i,): 1}, -1) for i, img in enumerate(phipsi.images)]
            if not any(err):
                break
            corr = [lin_inv.apply(e) for e in err]
            psi = AlgebraMap(self.target, self.source, [
                vadd(dict(p), c, -1) for p, c in zip(psi.images, corr)
            ])
        return psi

    def commutes_with_star(self) -> bool:
        s, t = self.source, self.target
        for i in range(s.dim):
            lhs = self.apply(s.star({(i,): 1}))
            rhs = t.star(self.images[i])
            if not veq(lhs, rhs):
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, AlgebraMap):
            return NotImplemented
        return all(veq(a, b) for a, b in zip(self.images, other.images))

    def __hash__(self):
        return id(self)


def conjugate(xi: Derivation, phi: AlgebraMap, phi_inv: AlgebraMap | None = None) -> Derivation:
    """``phi^-1 o xi o phi`` for an automorphism ``phi``."""
    if phi_inv is None:
        phi_inv = phi.inverse()
    alg = xi.alg
    imgs = [phi_inv.apply(xi.apply(img)) for img in phi.images]
    return Derivation(alg, xi.degree, imgs)


# ----------------------------------------------------------------------------
# coinvariants


class CoinvariantSpace:
    """Coinvariants of the n-th tensor power under Z_n or one of the D_n actions.

    The quotient basis is a set of representative words (the free columns of
    the reduced relation matrix); ``project`` sends any weight-n vector to its
    coordinates in that basis.
    """

    def __init__(self, alg: TensorAlgebra, n: int, group: str = CYCLIC):
        if n < 1:
            raise ValueError("coinvariants need weight >= 1")
        if group not in GROUPS:
            raise ValueError(f"unknown group {group!r}")
        if group != CYCLIC and alg.W.involution is None:
            raise ValueError("dihedral actions need an involution on the generators")
        self.alg = alg
        self.weight = n
        self.group = group
        self.basis: list[tuple] = []
        self.degree_of: list[int] = []
        self._proj: dict[tuple, dict] = {}
        sgn = -1 if group == DIHEDRAL_MINUS else 1
        for deg, block in sorted(alg.words_by_degree(n).items()):
            pos = {w: k for k, w in enumerate(block)}
            rels = []
            for w in block:
                r = {pos[w]: 1}
                for u, c in alg.rotate({w: 1}).items():
                    r[pos[u]] = r.get(pos[u], 0) - c
                rels.append(r)
                if group != CYCLIC:
                    r = {pos[w]: 1}
                    for u, c in alg.star({w: 1}).items():
                        r[pos[u]] = r.get(pos[u], 0) - sgn * c
                    rels.append(r)
            rows, piv = rref(Matrix(len(rels), len(block), rels))
            pivset = set(piv)
            local = {}
            for k, w in enumerate(block):
                if k not in pivset:
                    local[k] = len(self.basis)
                    self._proj[w] = {len(self.basis): 1}
                    self.basis.append(w)
                    self.degree_of.append(deg)
            for row, p in zip(rows, piv):
                img = {}
                for k, c in row.items():
                    if k != p:
                        img[local[k]] = -c
                self._proj[block[p]] = img

    @property
    def dim(self) -> int:
        return len(self.basis)

    def project(self, vec: dict) -> dict:
        out: dict = {}
        for w, c in vec.items():
            if len(w) != self.weight:
                raise ValueError("vector has the wrong weight")
            vadd(out, self._proj[w], c)
        return out

    def lift(self, k: int) -> dict:
        return {self.basis[k]: 1}

    def projection_matrix(self) -> Matrix:
        alg = self.alg
        cols = [self._proj[w] for w in alg.words(self.weight)]
        return Matrix.from_sparse_columns(cols, self.dim)

    def relations_killed(self, vec: dict) -> bool:
        return not self.project(vec)


def coinvariants(alg: TensorAlgebra, n: int, group: str = CYCLIC) -> CoinvariantSpace:
    return CoinvariantSpace(alg, n, group)


def exp_series(op, vec: dict, max_terms: int) -> dict:
    """``sum_k op^k(vec)/k!`` for a nilpotent operator, stopping when terms vanish."""
    from .exactnum import Q

    out = dict(vec)
    term = vec
    for k in range(1, max_terms + 1):
        term = op(term)
        if not term:
            break
        vadd(out, term, Q(1) / factorial(k))
    return out
