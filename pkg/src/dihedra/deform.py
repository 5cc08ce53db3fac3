"""Maurer-Cartan elements, gauge action and BCH over truncated polynomial rings.

Coefficient rings are ``k[e_1..e_r]/(e_1^q_1, ..., e_r^q_r)``; a monomial is
an exponent tuple. An element of (derivations) x R is a dict from monomials
to :class:`Derivation`. Only elements with no constant term are used as
deformations and gauge parameters, so every series below terminates.

The gauge group acts on the left: ``e^{y1} . (e^{y2} . xi) = e^{y1 * y2} . xi``
with ``*`` the BCH product.
"""

from __future__ import annotations

from itertools import product
from math import factorial
from typing import Iterable, Mapping

from .ainfty import AInftyStructure, Report, omega
from .exactnum import Matrix, Q, kernel_basis, rank
from .graded import StructureError
from .tensoralg import AlgebraMap, Derivation, TensorAlgebra, derivation_basis, vadd, vscale

PLAIN = "plain"
INVOLUTIVE = "involutive"
CYCLIC = "cyclic"
CYCLIC_INVOLUTIVE = "cyclic-involutive"
FLAVORS = (PLAIN, INVOLUTIVE, CYCLIC, CYCLIC_INVOLUTIVE)


class NilpotentRing:
    """``k[e_1..e_r]`` modulo ``e_i^{q_i}``."""

    def __init__(self, orders: Iterable[int], names: Iterable[str] | None = None):
        self.orders = tuple(int(q) for q in orders)
        if not self.orders or any(q < 1 for q in self.orders):
            raise ValueError("need at least one variable with order >= 1")
        self.names = tuple(names) if names is not None else tuple(
            "eps" if len(self.orders) == 1 else f"eps{i + 1}" for i in range(len(self.orders))
        )
        if len(self.names) != len(self.orders):
            raise ValueError("one name per variable")
        self.one = (0,) * len(self.orders)

    @classmethod
    def truncated(cls, q: int) -> "NilpotentRing":
        """``k[eps]/(eps^q)``."""
        return cls((q,))

    def monomials(self, positive: bool = False):
        for e in product(*[range(q) for q in self.orders]):
            if positive and e == self.one:
                continue
            yield e

    def mul(self, e: tuple, f: tuple):
        g = tuple(a + b for a, b in zip(e, f))
        if any(x >= q for x, q in zip(g, self.orders)):
            return None
        return g

    @property
    def nilpotency(self) -> int:
        """Least ``k`` with ``(R_+)^k = 0``."""
        return sum(q - 1 for q in self.orders) + 1

    def format(self, e: tuple) -> str:
        parts = []
        for name, x in zip(self.names, e):
            if x == 1:
                parts.append(name)
            elif x > 1:
                parts.append(f"{name}^{x}")
        return "*".join(parts) or "1"

    def parse(self, text: str) -> tuple:
        text = text.strip()
        e = [0] * len(self.orders)
        if text in ("", "1"):
            return tuple(e)
        for part in text.split("*"):
            name, _, power = part.partition("^")
            try:
                i = self.names.index(name.strip())
            except ValueError:
                raise ValueError(f"unknown ring variable {name!r}") from None
            e[i] += int(power) if power else 1
        if self.mul(tuple(e), self.one) is None:
            raise ValueError(f"monomial {text!r} is zero in this ring")
        return tuple(e)

    def __repr__(self):
        rel = ", ".join(f"{n}^{q}" for n, q in zip(self.names, self.orders))
        return f"NilpotentRing(k[{','.join(self.names)}]/({rel}))"


# ----------------------------------------------------------------------------


class RElement:
    """A homogeneous element of (derivations) x R."""

    def __init__(self, ring: NilpotentRing, alg: TensorAlgebra, degree: int, terms: Mapping | None = None):
        self.ring = ring
        self.alg = alg
        self.degree = degree
        self.terms: dict[tuple, Derivation] = {}
        for e, xi in (terms or {}).items():
            if xi.degree != degree and not xi.is_zero():
                raise ValueError("mixed degrees in an R-element")
            if not xi.is_zero():
                self.terms[tuple(e)] = xi

    @classmethod
    def zero(cls, ring, alg, degree):
        return cls(ring, alg, degree)

    @classmethod
    def monomial(cls, ring, e, xi: Derivation) -> "RElement":
        return cls(ring, xi.alg, xi.degree, {tuple(e): xi})

    def reduction(self) -> Derivation:
        return self.terms.get(self.ring.one, Derivation.zero(self.alg, self.degree))

    def has_constant_term(self) -> bool:
        return self.ring.one in self.terms

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "RElement") -> "RElement":
        terms = dict(self.terms)
        for e, xi in other.terms.items():
            terms[e] = terms[e] + xi if e in terms else xi
        deg = self.degree if self.terms else other.degree
        return RElement(self.ring, self.alg, deg, terms)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "RElement":
        return RElement(self.ring, self.alg, self.degree, {e: xi.scale(c) for e, xi in self.terms.items()})

    def times(self, e: tuple) -> "RElement":
        """Multiply by a ring monomial."""
        out = {}
        for f, xi in self.terms.items():
            g = self.ring.mul(e, f)
            if g is not None:
                out[g] = xi
        return RElement(self.ring, self.alg, self.degree, out)

    def bracket(self, other: "RElement") -> "RElement":
        out: dict = {}
        for e, x in self.terms.items():
            for f, y in other.terms.items():
                g = self.ring.mul(e, f)
                if g is None:
                    continue
                b = x.bracket(y)
                out[g] = out[g] + b if g in out else b
        return RElement(self.ring, self.alg, self.degree + other.degree, out)

    def bracket_plain(self, xi: Derivation) -> "RElement":
        """``[self, xi]`` for a coefficient-free derivation."""
        return RElement(
            self.ring,
            self.alg,
            self.degree + xi.degree,
            {e: x.bracket(xi) for e, x in self.terms.items()},
        )

    def star(self) -> "RElement":
        return RElement(self.ring, self.alg, self.degree, {e: x.star() for e, x in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, RElement):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return id(self)

    # -- operator view

    def apply(self, vec: dict) -> dict:
        """Act on an R-valued tensor ``{(monomial, word): c}``."""
        out: dict = {}
        by_mono: dict = {}
        for (f, w), c in vec.items():
            by_mono.setdefault(f, {})[w] = c
        for e, x in self.terms.items():
            for f, part in by_mono.items():
                g = self.ring.mul(e, f)
                if g is None:
                    continue
                for w, c in x.apply(part).items():
                    vadd(out, {(g, w): c})
        return out

    def __repr__(self):
        body = ", ".join(f"{self.ring.format(e)}: {x!r}" for e, x in sorted(self.terms.items()))
        return f"RElement(degree={self.degree}, {{{body}}})"


class RAlgebraMap:
    """R-linear algebra endomorphism of the truncated tensor algebra, fixed on generators."""

    def __init__(self, ring: NilpotentRing, alg: TensorAlgebra, images: list[dict]):
        self.ring = ring
        self.alg = alg
        self.images = [{k: c for k, c in img.items() if c} for img in images]

    @classmethod
    def identity(cls, ring, alg):
        return cls(ring, alg, [{(ring.one, (i,)): 1} for i in range(alg.dim)])

    def _mul(self, x: dict, y: dict) -> dict:
        out: dict = {}
        N = self.alg.N
        for (e, u), a in x.items():
            for (f, v), b in y.items():
                if len(u) + len(v) > N:
                    continue
                g = self.ring.mul(e, f)
                if g is None:
                    continue
                vadd(out, {(g, u + v): a * b})
        return out

    def apply(self, vec: dict) -> dict:
        out: dict = {}
        for (e, word), c in vec.items():
            prod = {(e, ()): c}
            for a in word:
                prod = self._mul(prod, self.images[a])
                if not prod:
                    break
            vadd(out, prod)
        return out

    def compose(self, other: "RAlgebraMap") -> "RAlgebraMap":
        """``self o other``."""
        return RAlgebraMap(self.ring, self.alg, [self.apply(img) for img in other.images])

    def reduction(self) -> AlgebraMap:
        one = self.ring.one
        return AlgebraMap(
            self.alg,
            self.alg,
            [{w: c for (e, w), c in img.items() if e == one} for img in self.images],
        )

    def is_identity(self) -> bool:
        one = self.ring.one
        return all(img == {(one, (i,)): 1} for i, img in enumerate(self.images))

    def commutes_with_star(self) -> bool:
        alg = self.alg
        for i in range(alg.dim):
            lhs = self.apply(_star_r(alg, {(self.ring.one, (i,)): 1}))
            rhs = _star_r(alg, self.images[i])
            if vadd(dict(lhs), rhs, -1):
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, RAlgebraMap):
            return NotImplemented
        return all(not vadd(dict(a), b, -1) for a, b in zip(self.images, other.images))

    def __hash__(self):
        return id(self)


def _star_r(alg: TensorAlgebra, vec: dict) -> dict:
    out: dict = {}
    for (e, w), c in vec.items():
        for u, x in alg.star({w: c}).items():
            vadd(out, {(e, u): x})
    return out


def _require_nilpotent(*xs: RElement):
    for x in xs:
        if x.has_constant_term():
            raise ValueError("coefficients must lie in the augmentation ideal")


def exp_automorphism(y: RElement) -> RAlgebraMap:
    """``e^y = id + sum y^n / n!`` as an algebra automorphism."""
    _require_nilpotent(y)
    if y.degree != 0:
        raise ValueError("only degree-0 elements exponentiate to automorphisms")
    ring, alg = y.ring, y.alg
    images = []
    for i in range(alg.dim):
        term = {(ring.one, (i,)): 1}
        total = dict(term)
        for n in range(1, ring.nilpotency + 1):
            term = vscale(y.apply(term), Q(1) / n)
            if not term:
                break
            vadd(total, term)
        images.append(total)
    return RAlgebraMap(ring, alg, images)


def log_automorphism(phi: RAlgebraMap) -> RElement:
    """``log phi = sum (-1)^{n+1}/n (phi - id)^n`` for ``phi`` reducing to the identity."""
    ring, alg = phi.ring, phi.alg
    if not phi.reduction() == AlgebraMap.identity(alg):
        raise ValueError("log needs an automorphism whose reduction is the identity")
    images: dict[tuple, list] = {}
    for i in range(alg.dim):
        term = {(ring.one, (i,)): 1}
        total: dict = {}
        for n in range(1, ring.nilpotency + 1):
            term = vadd(phi.apply(term), term, -1)
            if not term:
                break
            vadd(total, term, Q((-1) ** (n + 1)) / n)
        for (e, w), c in total.items():
            images.setdefault(e, [{} for _ in range(alg.dim)])[i][w] = c
    terms = {e: Derivation(alg, 0, imgs) for e, imgs in images.items()}
    return RElement(ring, alg, 0, terms)


def bch(x: RElement, y: RElement) -> RElement:
    """``x * y = log(e^x e^y)``, computed from the operator product."""
    _require_nilpotent(x, y)
    if x.ring is not y.ring and x.ring.orders != y.ring.orders:
        raise ValueError("elements over different rings")
    return log_automorphism(exp_automorphism(x).compose(exp_automorphism(y)))


def bch_series(x: RElement, y: RElement) -> RElement:
    """Closed form through third order, ``x + y + [x,y]/2 + ([x,[x,y]] + [y,[y,x]])/12``."""
    xy = x.bracket(y)
    return x + y + xy.scale(Q(1) / 2) + (x.bracket(xy) + y.bracket(y.bracket(x))).scale(Q(1) / 12)


# ----------------------------------------------------------------------------
# flavors


def _require_flavor(S: AInftyStructure, flavor: str):
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}")
    if flavor in (INVOLUTIVE, CYCLIC_INVOLUTIVE) and S.V.involution is None:
        raise StructureError(f"{flavor} flavor needs an involution")
    if flavor in (CYCLIC, CYCLIC_INVOLUTIVE) and S.V.form is None:
        raise StructureError(f"{flavor} flavor needs a bilinear form")


def in_flavor(S: AInftyStructure, xi: Derivation, flavor: str) -> bool:
    """Membership of a derivation without constant term in the flavored Lie algebra."""
    _require_flavor(S, flavor)
    if any(() in img for img in xi.images):
        return False
    if flavor in (INVOLUTIVE, CYCLIC_INVOLUTIVE) and not xi.star() == xi:
        return False
    if flavor in (CYCLIC, CYCLIC_INVOLUTIVE) and _kill_omega(S, xi):
        return False
    return True


def _kill_omega(S: AInftyStructure, xi: Derivation) -> dict:
    """``xi(omega)``, computed one weight higher so top-weight terms are seen."""
    big = TensorAlgebra(xi.alg.W, xi.alg.N + 1)
    return Derivation(big, xi.degree, xi.images).apply(omega(S.V))


def check_flavor(S: AInftyStructure, eta: RElement, flavor: str):
    for e, xi in eta.terms.items():
        if not in_flavor(S, xi, flavor):
            raise StructureError(
                f"coefficient of {eta.ring.format(e)} is not in the {flavor} Lie algebra"
            )


# ----------------------------------------------------------------------------
# MC and gauge


def mc_defect(S: AInftyStructure, eta: RElement) -> RElement:
    """``[m, eta] + 1/2 [eta, eta]``."""
    m = S.m
    lin = RElement(eta.ring, eta.alg, 2, {e: m.bracket(x) for e, x in eta.terms.items()})
    return lin + eta.bracket(eta).scale(Q(1) / 2)


def mc_check(S: AInftyStructure, eta: RElement, flavor: str = PLAIN) -> Report:
    """Is ``m + eta`` an R-linear structure of the given flavor?"""
    _require_nilpotent(eta)
    if eta.degree != 1 and not eta.is_zero():
        raise ValueError("deformations have degree 1")
    check_flavor(S, eta, flavor)
    rep = Report("maurer_cartan")
    dfc = mc_defect(S, eta)
    for e, x in sorted(dfc.terms.items()):
        i, w, _ = next(x.entries())
        rep.fail(len(w), f"coefficient of {eta.ring.format(e)} nonzero on w_{S.V.names[i]}")
    return rep


def gauge_action(S: AInftyStructure, y: RElement, xi: RElement, flavor: str = PLAIN) -> RElement:
    """``e^y . xi = xi + sum_{n>=1} 1/n! ad_y^{n-1}(ad_y xi - d y)`` with ``d = [m, -]``."""
    _require_nilpotent(y, xi)
    if y.degree != 0:
        raise ValueError("gauge parameters have degree 0")
    check_flavor(S, y, flavor)
    check_flavor(S, xi, flavor)
    dy = RElement(y.ring, y.alg, 1, {e: S.m.bracket(x) for e, x in y.terms.items()})
    term = y.bracket(xi) - dy
    out = xi
    for n in range(1, y.ring.nilpotency + 1):
        if term.is_zero():
            break
        out = out + term.scale(Q(1) / factorial(n))
        term = y.bracket(term)
    return out


def gauge_by_conjugation(S: AInftyStructure, y: RElement, xi: RElement) -> RElement:
    """Same action computed as ``e^y (m + xi) e^{-y} - m`` on generators."""
    ring, alg = y.ring, y.alg
    ey = exp_automorphism(y)
    emy = exp_automorphism(-y)
    total = RElement(ring, alg, 1, {ring.one: S.m}) + xi
    images: dict = {}
    for i in range(alg.dim):
        v = emy.images[i]
        v = total.apply(v)
        v = ey.apply(v)
        for (e, w), c in v.items():
            images.setdefault(e, [{} for _ in range(alg.dim)])[i][w] = c
    res = RElement(ring, alg, 1, {e: Derivation(alg, 1, imgs) for e, imgs in images.items()})
    return res - RElement(ring, alg, 1, {ring.one: S.m})


def reduction(S: AInftyStructure, eta: RElement) -> AInftyStructure:
    """The structure obtained by setting every ring variable to zero in ``m + eta``."""
    return AInftyStructure(S.V, S.m + eta.reduction())


# ----------------------------------------------------------------------------
# infinitesimal moduli


def flavored_basis(S: AInftyStructure, degree: int, flavor: str, weights=None) -> list[Derivation]:
    """Basis of the flavored derivations of the given degree (weights 1..N by default)."""
    _require_flavor(S, flavor)
    alg = S.alg
    weights = range(1, alg.N + 1) if weights is None else weights
    basis: list[Derivation] = []
    for n in weights:
        elems = [Derivation.elementary(alg, i, w) for i, w in derivation_basis(alg, degree, [n])]
        if not elems:
            continue
        if flavor in (INVOLUTIVE, CYCLIC_INVOLUTIVE):
            elems = _independent([x + x.star() for x in elems], degree)
        if flavor in (CYCLIC, CYCLIC_INVOLUTIVE):
            elems = _kernel_combinations(elems, lambda x: _kill_omega(S, x), degree)
        basis.extend(elems)
    return basis


def _coords(xs: list[Derivation]):
    keys: dict = {}
    cols = []
    for x in xs:
        col = {}
        for i, w, c in x.entries():
            col[keys.setdefault((i, w), len(keys))] = c
        cols.append(col)
    return cols, keys


def _independent(xs: list[Derivation], degree) -> list[Derivation]:
    from .exactnum import EchelonBasis

    cols, keys = _coords(xs)
    inv = {t: k for k, t in keys.items()}
    eb = EchelonBasis(cols, len(keys))
    alg = xs[0].alg
    return [
        Derivation.from_entries(alg, degree, [(*inv[t], c) for t, c in v.items()]) for v in eb.vectors
    ]


def _kernel_combinations(xs: list[Derivation], op, degree) -> list[Derivation]:
    imgs = [op(x) for x in xs]
    keys = sorted({w for img in imgs for w in img})
    pos = {w: r for r, w in enumerate(keys)}
    if not keys:
        return xs
    M = Matrix.from_sparse_columns([{pos[w]: c for w, c in img.items()} for img in imgs], len(keys))
    out = []
    for v in kernel_basis(M):
        acc = Derivation.zero(xs[0].alg, degree)
        for x, c in zip(xs, v):
            if c:
                acc = acc + x.scale(c)
        out.append(acc)
    return out


def infinitesimal_moduli(S: AInftyStructure, flavor: str = PLAIN) -> int:
    """Dimension of first-order deformations modulo first-order gauge.

    That is ``{eta : [m, eta] = 0} / {[m, y]}`` with ``eta`` of degree 1 and
    ``y`` of degree 0 in the flavored derivations without constant term.
    """
    _require_flavor(S, flavor)
    if S.V.dim == 0:
        return 0
    m = S.m
    ones = flavored_basis(S, 1, flavor)
    zeros = flavored_basis(S, 0, flavor)
    cols, keys = _coords([m.bracket(x) for x in ones])
    cocycles = len(ones) - (rank(Matrix.from_sparse_columns(cols, len(keys))) if cols else 0)
    cols, keys = _coords([m.bracket(y) for y in zeros])
    boundaries = rank(Matrix.from_sparse_columns(cols, len(keys))) if cols else 0
    return cocycles - boundaries
