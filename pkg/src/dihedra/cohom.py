"""Cochain complexes attached to an A-infinity structure, and their cohomology.

Every complex here is a quotient by everything of weight above the working
truncation ``N``, and every basis element is weight-homogeneous. Basis labels
are pairs ``(weight, key)`` whose meaning does not depend on ``N``; the
stability probe relies on this to compare a complex with its rebuild at
``N + 1``.

Grading conventions:

* Hochschild: degree ``k`` holds derivations of degree ``k - 1``.
* Cyclic and dihedral: degree ``k`` holds coinvariant words of degree ``k + 1``.
* Cyclic derivations: graded by derivation degree, so that with a form of
  degree ``d`` the isomorphism with the cyclic complex shifts degrees by
  ``d + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from .ainfty import AInftyStructure, cyclic_defect, suspension_sign
from .exactnum import EchelonBasis, Matrix, Q, kernel_basis, rank
from .graded import StructureError
from .tensoralg import (
    CYCLIC,
    DIHEDRAL_MINUS,
    DIHEDRAL_PLUS,
    CoinvariantSpace,
    Derivation,
    TensorAlgebra,
    derivation_basis,
    vadd,
)

HOCHSCHILD = "hochschild"
COINVARIANT = "coinvariant"
CYCLIC_DER = "cyclic-derivation"


class CochainComplex:
    """Finite window of a cochain complex with exact matrices.

    ``spaces[k]`` lists the basis labels of degree ``k``; ``diffs[k]`` is the
    matrix of ``d: C^k -> C^{k+1}``. Degrees outside ``spaces`` are zero.
    """

    def __init__(
        self,
        label: str,
        window: tuple[int, int],
        spaces: dict[int, list],
        diffs: dict[int, Matrix],
        N: int,
        kind: str,
        rebuild: Callable[[int], "CochainComplex"] | None = None,
        verify: bool = True,
    ):
        self.label = label
        self.window = window
        self.spaces = spaces
        self.diffs = diffs
        self.N = N
        self.kind = kind
        self.rebuild = rebuild
        self._index = {k: {lab: t for t, lab in enumerate(v)} for k, v in spaces.items()}
        if verify:
            self.check_square_zero()

    @property
    def degrees(self) -> list[int]:
        return sorted(self.spaces)

    def dim(self, k: int) -> int:
        return len(self.spaces.get(k, ()))

    def index(self, k: int) -> dict:
        return self._index.get(k, {})

    def weights(self, k: int) -> list[int]:
        return [lab[0] for lab in self.spaces.get(k, ())]

    def d(self, k: int) -> Matrix:
        if k in self.diffs:
            return self.diffs[k]
        return Matrix.zeros(self.dim(k + 1), self.dim(k))

    def check_square_zero(self):
        for k in self.degrees:
            if k in self.diffs and k + 1 in self.diffs:
                if not (self.diffs[k + 1] @ self.diffs[k]).is_zero():
                    raise StructureError(f"{self.label}: d o d != 0 out of degree {k}")

    @property
    def filtration_offset(self) -> int:
        """Level ``n`` of the filtration keeps weights ``>= n + offset``."""
        return 1 if self.kind in (COINVARIANT, CYCLIC_DER) else 0

    def __repr__(self):
        dims = {k: self.dim(k) for k in self.degrees}
        return f"CochainComplex({self.label!r}, N={self.N}, dims={dims})"


def _window(S: AInftyStructure, degrees):
    if degrees is None:
        return (0, S.N)
    a, b = degrees
    if a > b:
        raise ValueError("empty degree window")
    return (a, b)


# ----------------------------------------------------------------------------
# Hochschild


def _derivation_labels(alg: TensorAlgebra, deg: int, lo: int = 0) -> list:
    return [(len(w), (i, w)) for i, w in derivation_basis(alg, deg, range(lo, alg.N + 1))]


def _bracket_column(m: Derivation, xi: Derivation, target: dict, N: int) -> dict:
    d = m.bracket(xi)
    col = {}
    for i, w, c in d.entries():
        if len(w) <= N:
            col[target[(len(w), (i, w))]] = c
    return col


def hochschild_complex(S: AInftyStructure, degrees=None, N: int | None = None) -> CochainComplex:
    N = S.N if N is None else N
    a, b = _window(S, degrees)
    big = S.retruncate(N + 1)
    small = TensorAlgebra.on_dual(S.V, N)
    spaces = {k: _derivation_labels(small, k - 1) for k in range(a - 1, b + 2)}
    index = {k: {lab: t for t, lab in enumerate(v)} for k, v in spaces.items()}
    diffs = {}
    for k in range(a - 1, b + 1):
        cols = []
        for n, (i, w) in spaces[k]:
            xi = Derivation.elementary(big.alg, i, w)
            cols.append(_bracket_column(big.m, xi, index[k + 1], N))
        diffs[k] = Matrix.from_sparse_columns(cols, len(spaces[k + 1]))
    return CochainComplex(
        "CH",
        (a, b),
        spaces,
        diffs,
        N,
        HOCHSCHILD,
        rebuild=lambda M: hochschild_complex(S, (a, b), M),
    )


def derivation_vector(C: CochainComplex, k: int, xi: Derivation) -> dict:
    """Coordinates of a derivation in the full Hochschild complex (degree ``k``)."""
    idx = C.index(k)
    out = {}
    for i, w, c in xi.entries():
        if len(w) <= C.N:
            out[idx[(len(w), (i, w))]] = c
    return out


def vector_derivation(C: CochainComplex, S: AInftyStructure, k: int, vec: dict) -> Derivation:
    alg = TensorAlgebra.on_dual(S.V, C.N)
    labels = C.spaces[k]
    return Derivation.from_entries(alg, k - 1, [(*labels[t][1], c) for t, c in vec.items()])


# ----------------------------------------------------------------------------
# subcomplexes


def _by_weight_coords(C: CochainComplex, k: int, vec: dict) -> dict[int, dict]:
    labels = C.spaces.get(k, [])
    out: dict[int, dict] = {}
    for t, c in vec.items():
        out.setdefault(labels[t][0], {})[t] = c
    return out


def subcomplex(
    C: CochainComplex,
    label: str,
    blocks: dict[int, dict[int, list]],
    kind: str | None = None,
    shift: int = 0,
    rebuild=None,
) -> CochainComplex:
    """Subcomplex spanned by ``blocks[k][weight]`` (sparse vectors in C's coordinates).

    Raises :class:`StructureError` if the span is not closed under ``d``.
    The result is regraded so that ``C^k`` lands in degree ``k - shift``.
    """
    bases: dict[int, dict[int, EchelonBasis]] = {}
    spaces: dict[int, list] = {}
    for k in C.degrees:
        bases[k] = {}
        labs = []
        for n in sorted(blocks.get(k, {})):
            eb = EchelonBasis(blocks[k][n], C.dim(k))
            bases[k][n] = eb
            labs.extend((n, t) for t in range(len(eb)))
        spaces[k] = labs
    pos = {k: {lab: t for t, lab in enumerate(v)} for k, v in spaces.items()}
    diffs = {}
    for k in C.degrees:
        if k not in C.diffs:
            continue
        D = C.diffs[k]
        cols = []
        for n, eb in bases[k].items():
            for t, v in enumerate(eb.vectors):
                img = D.apply(v)
                col = {}
                for n2, part in _by_weight_coords(C, k + 1, img).items():
                    tgt = bases.get(k + 1, {}).get(n2)
                    try:
                        if tgt is None:
                            raise ValueError
                        coords = tgt.coordinates(part)
                    except ValueError:
                        raise StructureError(
                            f"{label}: not closed under the differential (degree {k}, weight {n2})"
                        ) from None
                    for s, c in coords.items():
                        col[pos[k + 1][(n2, s)]] = c
                cols.append(col)
        diffs[k] = Matrix.from_sparse_columns(cols, len(spaces.get(k + 1, [])))
    sub = CochainComplex(
        label,
        (C.window[0] - shift, C.window[1] - shift),
        {k - shift: v for k, v in spaces.items()},
        {k - shift: v for k, v in diffs.items()},
        C.N,
        kind or C.kind,
        rebuild=rebuild,
    )
    sub._parent = (C, bases, shift)
    return sub


def _elementary_blocks(C: CochainComplex, k: int) -> dict[int, list]:
    out: dict[int, list] = {}
    for t, lab in enumerate(C.spaces.get(k, [])):
        out.setdefault(lab[0], []).append({t: 1})
    return out


def _star_blocks(C: CochainComplex, S: AInftyStructure, k: int, vectors_by_weight, sign: int):
    """Symmetrize vectors under the derivation involution: ``v + sign * v*``."""
    out: dict[int, list] = {}
    for n, vecs in vectors_by_weight.items():
        res = []
        for v in vecs:
            xi = vector_derivation(C, S, k, v)
            sv = derivation_vector(C, k, xi.star())
            res.append(vadd(dict(v), sv, sign))
        out[n] = res
    return out


def _require_involutive(S: AInftyStructure):
    from .ainfty import check_involutive

    if S.V.involution is None:
        raise StructureError("structure has no involution")
    rep = check_involutive(S)
    if not rep.ok:
        raise StructureError(f"structure is not involutive: {rep.failures[0]}")


def hochschild_pm_complexes(S: AInftyStructure, degrees=None, N: int | None = None):
    """The two eigen-subcomplexes of the derivation involution."""
    _require_involutive(S)
    N = S.N if N is None else N
    C = hochschild_complex(S, degrees, N)
    out = []
    for sign, name in ((1, "CH+"), (-1, "CH-")):
        blocks = {k: _star_blocks(C, S, k, _elementary_blocks(C, k), sign) for k in C.degrees}
        out.append(
            subcomplex(
                C,
                name,
                blocks,
                rebuild=(lambda M, s=sign: hochschild_pm_complexes(S, C.window, M)[0 if s > 0 else 1]),
            )
        )
    return tuple(out)


# ----------------------------------------------------------------------------
# coinvariant complexes


def _coinvariant_complex(S: AInftyStructure, group: str, degrees, N: int, label: str, verify=True):
    a, b = _window(S, degrees)
    T = S.retruncate(N)
    alg = T.alg
    spaces_by_weight = {n: CoinvariantSpace(alg, n, group) for n in range(1, N + 1)}
    spaces: dict[int, list] = {k: [] for k in range(a - 1, b + 2)}
    for n, cq in spaces_by_weight.items():
        for w, deg in zip(cq.basis, cq.degree_of):
            if deg - 1 in spaces:
                spaces[deg - 1].append((n, w))
    for k in spaces:
        spaces[k].sort()
    index = {k: {lab: t for t, lab in enumerate(v)} for k, v in spaces.items()}
    m = T.m

    def image(word) -> dict:
        col: dict = {}
        for n2, part in _split(m.apply({word: 1})).items():
            cq = spaces_by_weight[n2]
            for s, c in cq.project(part).items():
                vadd(col, {(n2, cq.basis[s]): c})
        return col

    diffs = {}
    for k in range(a - 1, b + 1):
        cols = []
        for n, w in spaces[k]:
            cols.append({index[k + 1][lab]: c for lab, c in image(w).items()})
        diffs[k] = Matrix.from_sparse_columns(cols, len(spaces[k + 1]))
    if verify:
        _check_well_defined(T, spaces_by_weight, group, (a - 1, b + 1))
    return CochainComplex(
        label,
        (a, b),
        spaces,
        diffs,
        N,
        COINVARIANT,
        rebuild=lambda M: _coinvariant_complex(S, group, (a, b), M, label, verify),
    )


def _split(vec: dict) -> dict[int, dict]:
    out: dict[int, dict] = {}
    for w, c in vec.items():
        out.setdefault(len(w), {})[w] = c
    return out


def _check_well_defined(T: AInftyStructure, spaces, group: str, deg_range):
    """``m`` must send the relation subspace into itself."""
    alg = T.alg
    m = T.m
    sgn = -1 if group == DIHEDRAL_MINUS else 1
    lo, hi = deg_range
    for n, cq in spaces.items():
        for w in alg.words(n):
            if not lo + 1 <= alg.word_degree(w) <= hi + 1:
                continue
            rels = [vadd({w: 1}, alg.rotate({w: 1}), -1)]
            if group != CYCLIC:
                rels.append(vadd({w: 1}, alg.star({w: 1}), -sgn))
            for r in rels:
                for n2, part in _split(m.apply(r)).items():
                    if spaces[n2].project(part):
                        raise StructureError(
                            f"differential does not preserve the {group} relations at weight {n2}"
                        )


def cyclic_complex(S: AInftyStructure, degrees=None, N: int | None = None) -> CochainComplex:
    N = S.N if N is None else N
    return _coinvariant_complex(S, CYCLIC, degrees, N, "CC")


def dihedral_complexes(S: AInftyStructure, degrees=None, N: int | None = None):
    _require_involutive(S)
    N = S.N if N is None else N
    return (
        _coinvariant_complex(S, DIHEDRAL_PLUS, degrees, N, "CD+"),
        _coinvariant_complex(S, DIHEDRAL_MINUS, degrees, N, "CD-"),
    )


# ----------------------------------------------------------------------------
# cyclic derivations


def _cyclic_blocks(C: CochainComplex, S: AInftyStructure, k: int) -> dict[int, list]:
    """Per weight, a basis of the derivations of degree ``k - 1`` satisfying the rotation identity."""
    V = S.V
    by_weight: dict[int, list] = {}
    for t, (n, (i, w)) in enumerate(C.spaces.get(k, [])):
        by_weight.setdefault(n, []).append((t, i, w))
    out: dict[int, list] = {}
    for n, items in by_weight.items():
        cols = [cyclic_defect(V, i, w) for _, i, w in items]
        keys = sorted({x for col in cols for x in col})
        pos = {x: r for r, x in enumerate(keys)}
        M = Matrix.from_sparse_columns([{pos[x]: c for x, c in col.items()} for col in cols], len(keys))
        if keys:
            ker = kernel_basis(M)
        else:
            ker = [[int(r == s) for r in range(len(items))] for s in range(len(items))]
        vecs = []
        for v in ker:
            vecs.append({items[s][0]: c for s, c in enumerate(v) if c})
        out[n] = vecs
    return out


def _require_form(S: AInftyStructure, nondegenerate: bool = False):
    if S.V.form is None:
        raise StructureError("structure has no bilinear form")
    if S.V.form.gram.is_zero():
        raise StructureError("bilinear form is zero")
    if nondegenerate and not S.V.form.is_nondegenerate():
        null = S.V.form.radical()[0]
        named = {S.V.names[i]: c for i, c in enumerate(null) if c}
        raise StructureError(f"bilinear form is degenerate; null vector {named}")


def cyclic_derivation_complexes(S: AInftyStructure, degrees=None, N: int | None = None, split: bool = True):
    """``(Der_cycl, Der_cycl+, Der_cycl-)``, graded by derivation degree.

    The last two are ``None`` when the structure has no involution or
    ``split`` is false.
    """
    _require_form(S)
    N = S.N if N is None else N
    a, b = _window(S, degrees)
    C = hochschild_complex(S, (a + 1, b + 1), N)
    blocks = {k: _cyclic_blocks(C, S, k) for k in C.degrees}

    def rb(i):
        return lambda M: cyclic_derivation_complexes(S, (a, b), M, split=i > 0)[i]

    full = subcomplex(C, "Der_cycl", blocks, CYCLIC_DER, shift=1, rebuild=rb(0))
    if S.V.involution is None or not split:
        return full, None, None
    if not S.V.form_is_invariant():
        raise StructureError("form is not invariant under the involution")
    _require_involutive(S)
    plus = subcomplex(
        C,
        "Der_cycl+",
        {k: _star_blocks(C, S, k, blocks[k], 1) for k in C.degrees},
        CYCLIC_DER,
        shift=1,
        rebuild=rb(1),
    )
    minus = subcomplex(
        C,
        "Der_cycl-",
        {k: _star_blocks(C, S, k, blocks[k], -1) for k in C.degrees},
        CYCLIC_DER,
        shift=1,
        rebuild=rb(2),
    )
    return full, plus, minus


# ----------------------------------------------------------------------------
# filtration and cohomology


def filtration_piece(C: CochainComplex, n: int) -> CochainComplex:
    """Subcomplex of basis elements of weight ``>= n + offset``."""
    if C.kind not in (HOCHSCHILD, COINVARIANT, CYCLIC_DER):
        raise ValueError("complex carries no weight labels")
    cut = n + C.filtration_offset
    keep = {k: [t for t, lab in enumerate(C.spaces[k]) if lab[0] >= cut] for k in C.degrees}
    spaces = {k: [C.spaces[k][t] for t in keep[k]] for k in C.degrees}
    diffs = {}
    for k, D in C.diffs.items():
        sub = D.select_columns(keep[k]).select_rows(keep.get(k + 1, []))
        if _leaks(D, keep[k], keep.get(k + 1, [])):
            raise StructureError("weight filtration is not preserved by the differential")
        diffs[k] = sub
    rebuild = None
    if C.rebuild is not None:
        rebuild = lambda M: filtration_piece(C.rebuild(M), n)
    return CochainComplex(
        f"{C.label}>={n}", C.window, spaces, diffs, C.N, C.kind, rebuild=rebuild
    )


def _leaks(D: Matrix, cols, rows) -> bool:
    keep = set(rows)
    colset = set(cols)
    for r, row in enumerate(D.rows):
        if r in keep:
            continue
        if any(j in colset for j in row):
            return True
    return False


@dataclass
class DegreeRow:
    degree: int
    cochains: int
    dim: int
    stable: bool | None = None

    @property
    def status(self) -> str:
        if self.stable is None:
            return "unprobed"
        return "stable" if self.stable else "truncated"


@dataclass
class CohomologyTable:
    label: str
    N: int
    rows: list[DegreeRow] = field(default_factory=list)

    def dims(self) -> dict[int, int]:
        return {r.degree: r.dim for r in self.rows}

    def __getitem__(self, k: int) -> int:
        for r in self.rows:
            if r.degree == k:
                return r.dim
        raise KeyError(k)

    def to_dict(self) -> dict:
        return {
            "complex": self.label,
            "N": self.N,
            "degrees": [
                {"degree": r.degree, "cochains": r.cochains, "dim": r.dim, "status": r.status}
                for r in self.rows
            ],
        }


def _ranks(C: CochainComplex) -> dict[int, int]:
    return {k: rank(D) for k, D in C.diffs.items()}


def cohomology_dims(C: CochainComplex, probe: bool = True, degrees: Iterable[int] | None = None):
    """``dim H^k = dim C^k - rank d_k - rank d_{k-1}`` over the requested window.

    With ``probe`` the complex is rebuilt at ``N + 1``; degree ``k`` is stable
    when ``C^k`` gains nothing, nothing new in ``C^{k+1}`` is hit from ``C^k``
    and nothing new in ``C^{k-1}`` hits ``C^k``. That guarantees the value is
    the same at ``N + 1``.
    """
    a, b = C.window
    ks = list(range(a, b + 1)) if degrees is None else list(degrees)
    r = _ranks(C)
    table = CohomologyTable(C.label, C.N)
    for k in ks:
        if k - 1 not in C.diffs and C.dim(k - 1) or k not in C.diffs and C.dim(k + 1):
            raise ValueError(f"degree {k} is outside the assembled window")
        h = C.dim(k) - r.get(k, 0) - r.get(k - 1, 0)
        table.rows.append(DegreeRow(k, C.dim(k), h))
    if probe and C.rebuild is not None:
        try:
            big = C.rebuild(C.N + 1)
        except StructureError:
            big = None
        for row in table.rows:
            row.stable = big is not None and _stable(C, big, row.degree)
    return table


def _stable(C: CochainComplex, big: CochainComplex, k: int) -> bool:
    if C.spaces.get(k, []) != big.spaces.get(k, [])[: C.dim(k)] or big.dim(k) != C.dim(k):
        return False
    old_next = big.index(k + 1)
    known_next = {old_next[lab] for lab in C.spaces.get(k + 1, [])}
    D = big.d(k)
    for r, row in enumerate(D.rows):
        if r not in known_next and row:
            return False
    # the old block must be reproduced verbatim
    rows = [old_next[lab] for lab in C.spaces.get(k + 1, [])]
    if D.select_rows(rows) != C.d(k):
        return False
    prev = big.index(k - 1)
    known_prev = {prev[lab] for lab in C.spaces.get(k - 1, [])}
    new_prev = [t for t in range(big.dim(k - 1)) if t not in known_prev]
    if new_prev and not big.d(k - 1).select_columns(new_prev).is_zero():
        return False
    return True


# ----------------------------------------------------------------------------
# the isomorphism with the cyclic complex


def _word_sign(degs) -> int:
    e = sum(p * d for p, d in enumerate(degs))
    return -1 if e % 2 else 1


def cyclic_word_image(S: AInftyStructure, xi: Derivation) -> dict:
    """Send a derivation to the tensor obtained by pairing its output with the form.

    For ``w_i -> w_J`` of degree ``h`` this is
    ``sum_k sigma * lambda(J k) * tau(J) * <e_i, e_k> / (n + 1) * w_J w_k``, where
    ``n = len(J)``, ``lambda`` is the sign of pushing suspensions rightwards
    through ``J k`` and ``sigma = (-1)^{n (h + d + 1) + h}``. The division makes
    projection to coinvariants inverse to the norm map; ``sigma`` makes the
    map commute with brackets on the nose.
    """
    V = S.V
    G = V.form.gram
    deg = V.degrees
    h = xi.degree
    d = V.form.degree
    out: dict = {}
    for i, J, c in xi.entries():
        n = len(J)
        tau = suspension_sign([deg[j] for j in J])
        if (n * (h + d + 1) + h) % 2:
            tau = -tau
        for k, g in G.rows[i].items():
            K = J + (k,)
            lam = _word_sign([deg[x] for x in K])
            vadd(out, {K: lam * tau * g * c / Q(n + 1)})
    return out


@dataclass
class IsomorphismReport:
    """Outcome of comparing cyclic derivations with the cyclic complex."""

    bijective: dict = field(default_factory=dict)
    chain_map: bool = True
    plus_minus: bool | None = None
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            all(self.bijective.values())
            and self.chain_map
            and self.plus_minus is not False
        )



def cc_der_isomorphism(S: AInftyStructure, degrees=None) -> IsomorphismReport:
    """Check the form-pairing map between cyclic derivations and the cyclic complex.

    Cyclic derivations of weights ``0..N-1`` are compared with cyclic
    coinvariants of weights ``1..N``. For each derivation degree ``h`` in the
    window the map must be bijective onto degree ``h + d + 1`` weight by
    weight, intertwine ``[m, -]`` with the induced differential, and
    (involutive case) carry the
    derivation involution to the tensor involution.
    """
    _require_form(S, nondegenerate=True)
    N = S.N
    if N < 2:
        raise ValueError("need truncation at least 2")
    dform = S.V.form.degree
    a, b = _window(S, degrees)
    lower = S.retruncate(N)
    der_full = hochschild_complex(lower, (a + 1, b + 1), N - 1)
    rep = IsomorphismReport()
    alg = lower.alg
    cc = {n: CoinvariantSpace(alg, n, CYCLIC) for n in range(1, N + 1)}
    m = lower.m
    for k in range(a, b + 1):
        h = k
        blocks = _cyclic_blocks(der_full, lower, k + 1)
        for n, vecs in sorted(blocks.items()):
            cq = cc[n + 1]
            target_dim = sum(1 for dd in cq.degree_of if dd - 1 == h + dform + 1)
            images = []
            for v in vecs:
                xi = vector_derivation(der_full, lower, k + 1, v)
                fx = cq.project(cyclic_word_image(lower, xi))
                images.append(fx)
                bad = [s for s in fx if cq.degree_of[s] - 1 != h + dform + 1]
                if bad:
                    rep.failures.append(f"degree mismatch at weight {n}")
                # chain map
                dxi = m.bracket(Derivation(alg, xi.degree, xi.images))
                dxi = dxi.restrict_weights(0, N - 1)
                lhs = _project_all(cc, cyclic_word_image(lower, dxi))
                rhs = _project_all(cc, m.apply(cyclic_word_image(lower, xi)))
                if vadd(dict(lhs), rhs, -1):
                    rep.chain_map = False
                    rep.failures.append(f"chain map fails in degree {h}, weight {n}")
                if S.V.involution is not None and S.V.form_is_invariant():
                    fs = cq.project(cyclic_word_image(lower, xi.star()))
                    sf = cq.project(alg.star(cyclic_word_image(lower, xi)))
                    ok = not vadd(dict(fs), sf, -1)
                    rep.plus_minus = ok if rep.plus_minus in (None, True) else False
                    if not ok:
                        rep.failures.append(f"involutions not intertwined at weight {n}")
            M = Matrix.from_sparse_columns(images, cq.dim)
            rep.bijective[(h, n)] = rank(M) == len(vecs) == target_dim
            if not rep.bijective[(h, n)]:
                rep.failures.append(
                    f"not bijective in degree {h}, weight {n}: "
                    f"{len(vecs)} derivations, rank {rank(M)}, {target_dim} coinvariants"
                )
        # weights with cyclic coinvariants but no derivation block
        for n in range(0, N):
            if n not in blocks:
                cq = cc[n + 1]
                target_dim = sum(1 for dd in cq.degree_of if dd - 1 == h + dform + 1)
                rep.bijective[(h, n)] = target_dim == 0
                if target_dim:
                    rep.failures.append(f"no derivations for weight {n} in degree {h}")
    return rep


def _project_all(cc: dict, vec: dict) -> dict:
    out = {}
    for n, part in _split(vec).items():
        if n in cc:
            for s, c in cc[n].project(part).items():
                out[(n, s)] = c
    return out


# ----------------------------------------------------------------------------
# bracket on the cyclic complex


def _inverse_gram(V):
    from .graded import inverse_form

    return inverse_form(V.form).gram


def cc_bracket(a: dict, b: dict, S: AInftyStructure) -> dict:
    """Bracket of two tensors (sums of words), as a tensor.

    Contracts one letter of ``a`` against one letter of ``b`` through minus
    the inverse of the form (the sign that makes the pairing map a Lie
    algebra map), and concatenates the two remaining cyclic words,
    each rotated so that it starts right after the contracted letter.
    Results are meaningful modulo rotations.
    """
    _require_form(S, nondegenerate=True)
    V = S.V
    H = _inverse_gram(V)
    wdeg = [1 - x for x in V.degrees]
    d = V.form.degree
    out: dict = {}
    for u, x in a.items():
        p = d * sum(wdeg[t] for t in u)
        for v, y in b.items():
            for i in range(len(u)):
                for j in range(len(v)):
                    g = H[u[i], v[j]]
                    if not g:
                        continue
                    ru = u[i + 1 :] + u[:i]
                    rv = v[j + 1 :] + v[:j]
                    e = _bracket_sign(wdeg, u, i, v, j) + p
                    c = g * x * y
                    vadd(out, {ru + rv: c if e % 2 else -c})
    return out


def _bracket_sign(wdeg, u, i, v, j) -> int:
    """Koszul exponent for bringing ``u_i`` and ``v_j`` to the front, then
    rotating the rests into place."""
    du = [wdeg[t] for t in u]
    dv = [wdeg[t] for t in v]
    # rotate u so that u_i comes first: u_i..u_n u_1..u_{i-1}
    e = sum(du[:i]) * sum(du[i:])
    e += sum(dv[:j]) * sum(dv[j:])
    # u_i v_j adjacent: move v_j past the rest of u
    rest_u = sum(du) - du[i]
    e += dv[j] * rest_u
    return e
