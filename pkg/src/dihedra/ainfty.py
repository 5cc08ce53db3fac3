"""A-infinity structures as square-zero derivations, and their validators.

A structure on ``V`` is a degree-1 derivation ``m`` of the truncated tensor
algebra on the generators ``w_i`` (dual basis of ``V``, shifted). The
multilinear operations on ``V`` are a derived view. With ``c`` the coefficient
of ``w_{j_1} ... w_{j_n}`` in ``m(w_i)``,

    hat_m(e_{j_1}, ..., e_{j_n}) = tau(j) * sum_i c * e_i,
    tau(j) = (-1)^{sum_k (n - k) |e_{j_k}|},

which is the sign of pushing the suspension symbols leftwards through the
arguments. All checks return a :class:`Report` listing each failure with the
weight it occurs in and a witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Mapping

from .exactnum import Matrix
from .graded import GradedSpace, StructureError, reversal_sign
from .tensoralg import AlgebraMap, Derivation, TensorAlgebra, vadd, veq


@dataclass
class Failure:
    weight: int
    witness: str

    def __str__(self):
        return f"weight {self.weight}: {self.witness}"


@dataclass
class Report:
    check: str
    failures: list[Failure] = field(default_factory=list)
    skipped: str | None = None

    @property
    def ok(self) -> bool:
        return self.skipped is None and not self.failures

    def __bool__(self):
        return self.ok

    @property
    def weights(self) -> list[int]:
        return sorted({f.weight for f in self.failures})

    def fail(self, weight: int, witness: str):
        self.failures.append(Failure(weight, witness))

    def to_dict(self) -> dict:
        out = {"check": self.check, "ok": self.ok}
        if self.skipped:
            out["skipped"] = self.skipped
        if self.failures:
            out["failures"] = [{"weight": f.weight, "witness": f.witness} for f in self.failures]
        return out


def suspension_sign(degrees) -> int:
    n = len(degrees)
    e = sum((n - 1 - k) * d for k, d in enumerate(degrees))
    return -1 if e % 2 else 1


# ----------------------------------------------------------------------------


class AInftyStructure:
    def __init__(self, V: GradedSpace, m: Derivation):
        if m.alg.dim != V.dim or tuple(1 - d for d in V.degrees) != m.alg.degrees:
            raise StructureError("derivation does not live on the dual of this space")
        self.V = V
        self.m = m
        self.alg = m.alg

    @property
    def N(self) -> int:
        return self.alg.N

    @staticmethod
    def algebra_for(V: GradedSpace, N: int) -> TensorAlgebra:
        return TensorAlgebra.on_dual(V, N)

    @classmethod
    def zero(cls, V: GradedSpace, N: int) -> "AInftyStructure":
        return cls(V, Derivation.zero(cls.algebra_for(V, N), 1))

    @classmethod
    def from_dual(cls, V: GradedSpace, N: int, entries) -> "AInftyStructure":
        """From triples ``(generator, word, coefficient)`` of ``m``."""
        alg = cls.algebra_for(V, N)
        return cls(V, Derivation.from_entries(alg, 1, entries))

    @classmethod
    def from_hat(cls, V: GradedSpace, N: int, hats: Mapping[int, Mapping]) -> "AInftyStructure":
        """From operations ``hats[n][(j_1..j_n)] = {i: coefficient}``."""
        alg = cls.algebra_for(V, N)
        entries = []
        for n, table in hats.items():
            if not 1 <= n <= N:
                raise StructureError(f"operation arity {n} outside 1..{N}")
            for J, out in table.items():
                J = tuple(J)
                if len(J) != n:
                    raise StructureError(f"arity {n} operation given {len(J)} inputs")
                tau = suspension_sign([V.degrees[j] for j in J])
                for i, c in out.items():
                    entries.append((i, J, tau * c))
        return cls(V, Derivation.from_entries(alg, 1, entries))

    @classmethod
    def from_dga(cls, V: GradedSpace, N: int, mult: Mapping, diff: Mapping | None = None):
        """From a product table ``{(j, k): {i: c}}`` and differential ``{j: {i: c}}``."""
        deg = V.degrees
        for (j, k), out in mult.items():
            for i, c in out.items():
                if c and deg[i] != deg[j] + deg[k]:
                    raise StructureError(
                        f"product {V.names[j]}*{V.names[k]} has a component on "
                        f"{V.names[i]} of the wrong degree"
                    )
        diff = diff or {}
        for j, out in diff.items():
            for i, c in out.items():
                if c and deg[i] != deg[j] + 1:
                    raise StructureError(
                        f"differential of {V.names[j]} hits {V.names[i]} in the wrong degree"
                    )
        hats = {1: {(j,): out for j, out in diff.items()}}
        if N >= 2:
            hats[2] = dict(mult)
        elif mult:
            raise StructureError("truncation N=1 cannot hold a product")
        return cls.from_hat(V, N, hats)

    # -- views

    def hat(self, n: int) -> dict:
        """``{(j_1..j_n): {i: c}}``; only nonzero entries."""
        return hat_table(self.m, self.V, n)

    def hat_apply(self, n: int, args) -> dict:
        """Multilinear evaluation on a tuple of sparse vectors of ``V``."""
        table = self.hat(n)
        return _hat_eval(table, args)

    def component(self, n: int) -> Derivation:
        return self.m.component(n)

    def retruncate(self, N: int) -> "AInftyStructure":
        """Same operations viewed at another truncation; higher components stay zero."""
        alg = self.algebra_for(self.V, N)
        return AInftyStructure(self.V, Derivation(alg, self.m.degree, self.m.images))

    def conjugate(self, phi: AlgebraMap, phi_inv: AlgebraMap | None = None):
        """Structure ``phi^-1 m phi`` on the same space; ``phi`` becomes a morphism to it."""
        from .tensoralg import conjugate

        return AInftyStructure(self.V, conjugate(self.m, phi, phi_inv))

    def replace_space(self, V: GradedSpace) -> "AInftyStructure":
        alg = self.algebra_for(V, self.N)
        return AInftyStructure(V, Derivation(alg, self.m.degree, self.m.images))

    def __repr__(self):
        return f"AInftyStructure({self.V!r}, N={self.N}, m={self.m!r})"


def hat_table(xi: Derivation, V: GradedSpace, n: int) -> dict:
    """Operation on ``V`` corresponding to the weight-n part of a derivation."""
    out: dict = {}
    deg = V.degrees
    for i, J, c in xi.entries():
        if len(J) == n:
            tau = suspension_sign([deg[j] for j in J])
            out.setdefault(J, {})[i] = tau * c
    return out


def cyclic_defect(V: GradedSpace, i: int, J: tuple, coeff=1) -> dict:
    """Failure of the rotation identity for the derivation ``w_i -> coeff * w_J``.

    Returns ``{(x_1..x_{n+1}): lhs - rhs}``; the identity holds for a derivation
    exactly when the sum of these over its entries vanishes.
    """
    G = V.form.gram
    deg = V.degrees
    n = len(J)
    if n == 0:
        return {}
    tau = suspension_sign([deg[j] for j in J]) * coeff
    out: dict = {}
    # lhs: <hat(J), x> for X = J + (x,)
    for x, g in G.rows[i].items():
        X = J + (x,)
        vadd(out, {X: tau * g})
    # rhs: X = (J[1..n-1], y, J[0]) rotated so that (x_{n+1}, x_1..x_{n-1}) = J
    if n >= 1:
        last = J[0]
        for y, g in G.rows[i].items():
            X = J[1:] + (y, last)
            head = X[:n]
            eps = deg[last] * sum(deg[a] for a in head) + n
            vadd(out, {X: -(tau * g if eps % 2 == 0 else -tau * g)})
    return out


def _hat_eval(table: Mapping, args) -> dict:
    out: dict = {}
    for J in product(*[sorted(a.items()) for a in args]):
        idx = tuple(j for j, _ in J)
        if idx in table:
            c = 1
            for _, x in J:
                c *= x
            vadd(out, table[idx], c)
    return out


def _fmt_word(names, word) -> str:
    return "(" + ",".join(names[a] for a in word) + ")"


def _gen_name(S: AInftyStructure, i: int) -> str:
    return "w_" + S.V.names[i]


# ----------------------------------------------------------------------------
# checks


def check_degree(S: AInftyStructure) -> Report:
    rep = Report("degree")
    if S.m.degree != 1:
        rep.fail(0, f"structure derivation has degree {S.m.degree}")
    for i, w in S.m.homogeneity_defects():
        rep.fail(len(w), f"{_gen_name(S, i)} -> {_fmt_word(S.V.names, w)} has the wrong degree")
    for i, img in enumerate(S.m.images):
        if () in img:
            rep.fail(0, f"{_gen_name(S, i)} has a constant term")
    return rep


def check_square_zero(S: AInftyStructure) -> Report:
    rep = Report("square_zero")
    sq = S.m.square_images()
    for n in range(S.N + 1):
        for i, img in enumerate(sq):
            bad = [w for w in img if len(w) == n]
            if bad:
                rep.fail(n, f"m(m({_gen_name(S, i)})) has {_fmt_word(S.V.names, min(bad))}")
                break
    return rep


def check_involutive(S: AInftyStructure) -> Report:
    rep = Report("involutive")
    if S.V.involution is None:
        rep.skipped = "no involution"
        return rep
    ms = S.m.star()
    for n in range(S.N + 1):
        for i in range(S.V.dim):
            a = {w: c for w, c in S.m.images[i].items() if len(w) == n}
            b = {w: c for w, c in ms.images[i].items() if len(w) == n}
            if not veq(a, b):
                rep.fail(n, f"m and m* differ on {_gen_name(S, i)}")
                break
    return rep


def check_hat_involutive(S: AInftyStructure) -> Report:
    """The involution condition phrased through the operations on ``V``."""
    rep = Report("hat_involutive")
    V = S.V
    if V.involution is None:
        rep.skipped = "no involution"
        return rep
    J = V.involution
    stars = [J.column(j) for j in range(V.dim)]
    for n in range(1, S.N + 1):
        table = S.hat(n)
        tri = -1 if (n * (n + 1) // 2 - 1) % 2 else 1
        for X in product(range(V.dim), repeat=n):
            lhs = _apply_matrix(J, table.get(X, {}))
            sign = tri * reversal_sign([V.degrees[x] for x in X])
            rhs = _hat_eval(table, [stars[x] for x in reversed(X)])
            if not veq(lhs, {k: sign * v for k, v in rhs.items()}):
                rep.fail(n, f"fails on {_fmt_word(V.names, X)}")
                break
    return rep


def _apply_matrix(M: Matrix, vec: dict) -> dict:
    out: dict = {}
    for j, c in vec.items():
        vadd(out, M.column(j), c)
    return out


def _pair(G: Matrix, vec: dict, y: int):
    s = 0
    for i, c in vec.items():
        g = G[i, y]
        if g:
            s += c * g
    return s


def check_cyclic(S: AInftyStructure, max_arity: int | None = None) -> Report:
    """Rotation identity for every operation up to ``max_arity`` (default: all)."""
    return cyclic_report(S.m, S.V, max_arity)


def cyclic_report(xi: Derivation, V: GradedSpace, max_arity: int | None = None) -> Report:
    rep = Report("cyclic")
    if V.form is None:
        raise StructureError("cyclicity needs a bilinear form on the space")
    G = V.form.gram
    deg = V.degrees
    N = xi.alg.N
    top = N if max_arity is None else min(max_arity, N)
    for n in range(1, top + 1):
        table = hat_table(xi, V, n)
        if not table:
            continue
        for X in product(range(V.dim), repeat=n + 1):
            head, last = X[:n], X[n]
            lhs = _pair(G, table.get(head, {}), last)
            rot = (last,) + X[: n - 1]
            rhs = _pair(G, table.get(rot, {}), X[n - 1])
            eps = deg[last] * sum(deg[x] for x in head) + n
            if lhs != (-rhs if eps % 2 else rhs):
                rep.fail(n, f"fails on {_fmt_word(V.names, X)}")
                break
    return rep


def validate(S: AInftyStructure, involutive: bool | None = None, cyclic: bool | None = None):
    """Run the applicable checks. ``None`` means: run if the data is present."""
    reports = [check_degree(S), check_square_zero(S)]
    if involutive or (involutive is None and S.V.involution is not None):
        reports.append(check_involutive(S))
        reports.append(check_hat_involutive(S))
    if cyclic or (cyclic is None and S.V.form is not None):
        reports.append(check_cyclic(S))
    return reports


# ----------------------------------------------------------------------------
# forms as tensors


def omega(V: GradedSpace, alg: TensorAlgebra | None = None) -> dict:
    """The weight-2 element representing the form, ``sum G_ij s_ij w_i w_j``.

    ``s_ij = (-1)^{|e_i|}``; with this choice a derivation of the dual algebra
    kills it exactly when its operations satisfy the rotation identity.
    """
    if V.form is None:
        raise StructureError("space has no bilinear form")
    out = {}
    for i, row in enumerate(V.form.gram.rows):
        for j, g in row.items():
            out[(i, j)] = -g if V.degrees[i] % 2 else g
    return out


# ----------------------------------------------------------------------------
# morphisms


class AInftyMorphism:
    """A morphism from ``source`` to ``target``.

    Stored as the algebra map ``phi`` from the target's dual algebra to the
    source's; it must satisfy ``m o phi = phi o m'``.
    """

    def __init__(self, source: AInftyStructure, target: AInftyStructure, phi: AlgebraMap):
        if source.N != target.N:
            raise ValueError("source and target truncations differ")
        if phi.source.dim != target.V.dim or phi.target.dim != source.V.dim:
            raise ValueError("algebra map has the wrong shape")
        self.source = source
        self.target = target
        self.phi = phi

    @classmethod
    def identity(cls, S: AInftyStructure) -> "AInftyMorphism":
        return cls(S, S, AlgebraMap.identity(S.alg))

    @classmethod
    def from_hat(cls, source, target, hats: Mapping[int, Mapping]) -> "AInftyMorphism":
        """From components ``hats[n][(j_1..j_n)] = {i: c}`` mapping into the target space."""
        deg = source.V.degrees
        imgs: list[dict] = [{} for _ in range(target.V.dim)]
        for n, table in hats.items():
            for J, out in table.items():
                tau = suspension_sign([deg[j] for j in J])
                for i, c in out.items():
                    vadd(imgs[i], {tuple(J): tau * c})
        phi = AlgebraMap(target.alg, source.alg, imgs)
        return cls(source, target, phi)

    def hat(self, n: int) -> dict:
        out: dict = {}
        deg = self.source.V.degrees
        for i, img in enumerate(self.phi.images):
            for J, c in img.items():
                if len(J) == n:
                    out.setdefault(J, {})[i] = suspension_sign([deg[j] for j in J]) * c
        return out


def check_morphism(F: AInftyMorphism) -> dict[str, Report]:
    """Verdicts for ``commutes`` (a), ``involution`` (b) and ``form`` (c)."""
    S, T, phi = F.source, F.target, F.phi
    a = Report("morphism_commutes")
    for i, img in enumerate(phi.images):
        lhs = S.m.apply(img)
        rhs = phi.apply(T.m.images[i])
        diff = vadd(dict(lhs), rhs, -1)
        if diff:
            a.fail(min(len(w) for w in diff), f"m o phi != phi o m' on {_gen_name(T, i)}")
    b = Report("morphism_involution")
    if S.V.involution is None or T.V.involution is None:
        b.skipped = "no involution"
    else:
        for i in range(T.V.dim):
            lhs = phi.apply(T.alg.star({(i,): 1}))
            rhs = S.alg.star(phi.images[i])
            diff = vadd(dict(lhs), rhs, -1)
            if diff:
                b.fail(min(len(w) for w in diff), f"phi does not commute with * on {_gen_name(T, i)}")
    c = Report("morphism_form")
    if S.V.form is None or T.V.form is None:
        c.skipped = "no forms"
    else:
        diff = vadd(phi.apply(omega(T.V)), omega(S.V), -1)
        for n in sorted({len(w) for w in diff}):
            w = min(x for x in diff if len(x) == n)
            c.fail(n, f"form not preserved at {_fmt_word(S.V.names, w)}")
    return {"commutes": a, "involution": b, "form": c}


def check_morphism_form_hat(F: AInftyMorphism) -> Report:
    """The form condition phrased through the components on ``V``.

    For each word ``a_1..a_n``:
    ``sum_{i+j=n} (-1)^{(1-j)(|a_1|+..+|a_i|) + i - 1} <phi_i(a_1..a_i), phi_j(a_i+1..a_n)>``
    equals ``<a_1, a_2>`` when ``n = 2`` and vanishes otherwise.
    """
    S, T = F.source, F.target
    rep = Report("morphism_form_hat")
    if S.V.form is None or T.V.form is None:
        rep.skipped = "no forms"
        return rep
    G, H = S.V.form.gram, T.V.form.gram
    deg = S.V.degrees
    hats = {n: F.hat(n) for n in range(1, S.N + 1)}

    def pair(u: dict, v: dict):
        s = 0
        for i, x in u.items():
            for j, y in v.items():
                h = H[i, j]
                if h:
                    s += x * y * h
        return s

    for n in range(2, S.N + 1):
        for X in product(range(S.V.dim), repeat=n):
            total = -G[X[0], X[1]] if n == 2 else 0
            for i in range(1, n):
                j = n - i
                e = (1 - j) * sum(deg[x] for x in X[:i]) + i - 1
                t = pair(hats[i].get(X[:i], {}), hats[j].get(X[i:], {}))
                total += -t if e % 2 else t
            if total:
                rep.fail(n, f"fails on {_fmt_word(S.V.names, X)}")
                break
    return rep
