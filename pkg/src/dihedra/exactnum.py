"""Exact scalars and sparse linear algebra over Q (and F_p for enumeration tests).

Rationals are ``gmpy2.mpq``; plain Python ints are accepted anywhere a
scalar is expected. Prime-field elements are :class:`Fp` instances and mix
with ints and rationals through the reflected operators, so the same
algebraic code runs over either field.

Matrices are stored row-sparse (a list of ``{column: value}`` dicts), which
suits the very sparse differentials of the truncated complexes.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2

__all__ = [
    "Q",
    "GF",
    "Fp",
    "Matrix",
    "rank",
    "kernel_basis",
    "quotient_dim",
    "rref",
    "EchelonBasis",
    "ShapeError",
]


class ShapeError(ValueError):
    pass


def Q(x) -> gmpy2.mpq:
    """Parse an exact rational from an int, ``"p/q"`` string, Fraction or mpq."""
    if isinstance(x, Fp):
        raise TypeError("cannot convert a prime-field element to a rational")
    if isinstance(x, float):
        raise TypeError("floating point values are not exact; pass 'p/q' strings")
    if isinstance(x, str):
        x = x.strip()
        return gmpy2.mpq(Fraction(x))
    if isinstance(x, Fraction):
        return gmpy2.mpq(x.numerator, x.denominator)
    return gmpy2.mpq(x)


def _rational_parts(x):
    if isinstance(x, int):
        return x, 1
    if isinstance(x, Fraction):
        return x.numerator, x.denominator
    if type(x) is type(gmpy2.mpq(0)):
        return int(x.numerator), int(x.denominator)
    raise TypeError(f"unsupported scalar {x!r}")


class Fp:
    """Element of the prime field F_p."""

    __slots__ = ("v", "p")

    def __init__(self, v, p: int):
        if isinstance(v, Fp):
            if v.p != p:
                raise ValueError("mixing different prime fields")
            self.v, self.p = v.v, p
            return
        num, den = _rational_parts(v)
        if den % p == 0:
            raise ZeroDivisionError(f"denominator {den} vanishes mod {p}")
        self.v = num * pow(den, -1, p) % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, Fp):
            if other.p != self.p:
                raise ValueError("mixing different prime fields")
            return other.v
        try:
            return Fp(other, self.p).v
        except TypeError:
            return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Fp((self.v + o) % self.p, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Fp((self.v - o) % self.p, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Fp((o - self.v) % self.p, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Fp(self.v * o % self.p, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return Fp(self.v * pow(o, -1, self.p) % self.p, self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.v == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return Fp(o * pow(self.v, -1, self.p) % self.p, self.p)

    def __neg__(self):
        return Fp(-self.v % self.p, self.p)

    def __pos__(self):
        return self

    def __bool__(self):
        return self.v != 0

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.v == o

    def __hash__(self):
        return hash((self.v, self.p))

    def __repr__(self):
        return f"{self.v} (mod {self.p})"

    def __str__(self):
        return str(self.v)


class GF:
    """The prime field F_p, as a scalar constructor. ``GF(7)("1/2") == 4``."""

    def __init__(self, p: int):
        if p < 3 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
            raise ValueError(f"F_p needs an odd prime, got {p}")
        self.p = p

    def __call__(self, x) -> Fp:
        if isinstance(x, str):
            x = Fraction(x.strip())
        return Fp(x, self.p)

    def elements(self):
        return [Fp(i, self.p) for i in range(self.p)]

    def __repr__(self):
        return f"GF({self.p})"


# ----------------------------------------------------------------------------
# matrices


class Matrix:
    """Row-sparse matrix. ``rows[i]`` maps column index to a nonzero scalar."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[dict] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            self.rows = [{} for _ in range(nrows)]
        else:
            if len(rows) != nrows:
                raise ShapeError(f"expected {nrows} rows, got {len(rows)}")
            self.rows = [{c: v for c, v in r.items() if v} for r in rows]

    @classmethod
    def from_dense(cls, entries: Sequence[Sequence], ncols: int | None = None) -> "Matrix":
        entries = [list(r) for r in entries]
        if ncols is None:
            ncols = len(entries[0]) if entries else 0
        for r in entries:
            if len(r) != ncols:
                raise ShapeError("ragged matrix")
        return cls(len(entries), ncols, [dict(enumerate(r)) for r in entries])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int) -> "Matrix":
        rows = [{} for _ in range(nrows)]
        for j, col in enumerate(columns):
            if len(col) != nrows:
                raise ShapeError("column length mismatch")
            for i, v in enumerate(col):
                if v:
                    rows[i][j] = v
        return cls(nrows, len(columns), rows)

    @classmethod
    def from_sparse_columns(cls, columns: Sequence[dict], nrows: int) -> "Matrix":
        rows = [{} for _ in range(nrows)]
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v:
                    rows[i][j] = v
        return cls(nrows, len(columns), rows)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, [{i: 1} for i in range(n)])

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i].get(j, 0)

    def to_dense(self) -> list[list]:
        return [[r.get(j, 0) for j in range(self.ncols)] for r in self.rows]

    def transpose(self) -> "Matrix":
        out = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                out[j][i] = v
        return Matrix(self.ncols, self.nrows, out)

    T = property(transpose)

    def column(self, j: int) -> dict:
        return {i: r[j] for i, r in enumerate(self.rows) if j in r}

    def columns(self) -> list[dict]:
        return self.transpose().rows

    def apply(self, vec: dict) -> dict:
        """Multiply by a sparse column vector ``{index: value}``."""
        out = {}
        for i, r in enumerate(self.rows):
            acc = 0
            for j, v in r.items():
                x = vec.get(j)
                if x:
                    acc = acc + v * x
            if acc:
                out[i] = acc
        return out

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        orows = other.rows
        for r in self.rows:
            acc: dict = {}
            for k, a in r.items():
                for j, b in orows[k].items():
                    acc[j] = acc.get(j, 0) + a * b
            out.append({j: v for j, v in acc.items() if v})
        return Matrix(self.nrows, other.ncols, out)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ShapeError("shape mismatch")
        out = []
        for r, s in zip(self.rows, other.rows):
            acc = dict(r)
            for j, v in s.items():
                acc[j] = acc.get(j, 0) + v
            out.append(acc)
        return Matrix(self.nrows, self.ncols, out)

    def __neg__(self) -> "Matrix":
        return Matrix(self.nrows, self.ncols, [{j: -v for j, v in r.items()} for r in self.rows])

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        return Matrix(self.nrows, self.ncols, [{j: c * v for j, v in r.items()} for r in self.rows])

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and all(
            _vec_eq(r, s) for r, s in zip(self.rows, other.rows)
        )

    def is_zero(self) -> bool:
        return not any(self.rows)

    def select_rows(self, idx: Sequence[int]) -> "Matrix":
        return Matrix(len(idx), self.ncols, [dict(self.rows[i]) for i in idx])

    def select_columns(self, idx: Sequence[int]) -> "Matrix":
        pos = {j: k for k, j in enumerate(idx)}
        return Matrix(
            self.nrows,
            len(idx),
            [{pos[j]: v for j, v in r.items() if j in pos} for r in self.rows],
        )

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise ShapeError("row-dimension mismatch")
        out = []
        for r, s in zip(self.rows, other.rows):
            row = dict(r)
            row.update({self.ncols + j: v for j, v in s.items()})
            out.append(row)
        return Matrix(self.nrows, self.ncols + other.ncols, out)

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols}, nnz={sum(map(len, self.rows))})"


def _vec_eq(a: dict, b: dict) -> bool:
    keys = set(a) | set(b)
    return all(a.get(k, 0) == b.get(k, 0) for k in keys)


# ----------------------------------------------------------------------------
# elimination


def _reduce_against(row: dict, pivots: dict) -> dict:
    """Eliminate every pivot column from ``row`` (in place), return it."""
    while True:
        hit = [c for c in row if c in pivots]
        if not hit:
            return row
        c = min(hit)
        a = row[c]
        for j, v in pivots[c].items():
            x = row.get(j, 0) - a * v
            if x:
                row[j] = x
            else:
                row.pop(j, None)


def _echelon(rows: Iterable[dict]) -> dict:
    """Forward elimination. Returns ``{pivot column: normalised row}``."""
    pivots: dict = {}
    for r in rows:
        row = {c: v for c, v in r.items() if v}
        while row:
            c = min(row)
            if c in pivots:
                a = row[c]
                for j, v in pivots[c].items():
                    x = row.get(j, 0) - a * v
                    if x:
                        row[j] = x
                    else:
                        row.pop(j, None)
            else:
                inv = 1 / gmpy2.mpq(row[c]) if not isinstance(row[c], Fp) else 1 / row[c]
                pivots[c] = {j: v * inv for j, v in row.items()}
                break
    return pivots


def rref(M: Matrix) -> tuple[list[dict], list[int]]:
    """Reduced row echelon form: (rows, pivot columns), pivots ascending."""
    piv = _echelon(M.rows)
    order = sorted(piv)
    # back substitution, highest pivot first
    for c in reversed(order):
        row = piv[c]
        for c2 in order:
            if c2 >= c:
                break
            r2 = piv[c2]
            a = r2.get(c)
            if a:
                for j, v in row.items():
                    x = r2.get(j, 0) - a * v
                    if x:
                        r2[j] = x
                    else:
                        r2.pop(j, None)
    return [piv[c] for c in order], order


def rank(M: Matrix) -> int:
    """Exact rank over the field of the entries."""
    if M.nrows > M.ncols:
        M = M.transpose()
    return len(_echelon(M.rows))


def kernel_basis(M: Matrix) -> list[list]:
    """Basis of the right null space, as dense column vectors."""
    rows, pivots = rref(M)
    pivset = set(pivots)
    basis = []
    for f in range(M.ncols):
        if f in pivset:
            continue
        v = [0] * M.ncols
        v[f] = 1
        for row, p in zip(rows, pivots):
            a = row.get(f)
            if a:
                v[p] = -a
        basis.append(v)
    return basis


def quotient_dim(ambient_gens: Matrix, sub_gens: Matrix) -> int:
    """dim span(ambient) / (span(ambient) ∩ span(sub)), generators as columns."""
    if ambient_gens.nrows != sub_gens.nrows:
        raise ShapeError(
            f"row dimensions differ: {ambient_gens.nrows} vs {sub_gens.nrows}"
        )
    return rank(ambient_gens.hstack(sub_gens)) - rank(sub_gens)


class EchelonBasis:
    """A subspace basis in reduced echelon form.

    Every basis vector has a pivot coordinate equal to 1 where all other basis
    vectors vanish, so the coordinates of a vector known to lie in the span are
    read off at the pivots.
    """

    def __init__(self, vectors: Iterable[dict], dim: int):
        self.dim = dim
        m = Matrix(0, dim, [])
        m.rows = [{i: v for i, v in vec.items() if v} for vec in vectors]
        m.nrows = len(m.rows)
        self.vectors, self.pivots = rref(m)

    def __len__(self):
        return len(self.vectors)

    def coordinates(self, vec: dict, check: bool = True) -> dict:
        coords = {}
        for t, p in enumerate(self.pivots):
            a = vec.get(p)
            if a:
                coords[t] = a
        if check:
            recon: dict = {}
            for t, a in coords.items():
                for j, v in self.vectors[t].items():
                    recon[j] = recon.get(j, 0) + a * v
            if not _vec_eq(recon, vec):
                raise ValueError("vector does not lie in the subspace")
        return coords

    def contains(self, vec: dict) -> bool:
        try:
            self.coordinates(vec)
        except ValueError:
            return False
        return True
