"""Exact integer linear algebra.

Everything here works on Python ints, so entries never overflow and nothing
is ever rounded.  Subtori of ``T^m`` are handled through their lattices of
circle subgroups: a ``k``-dimensional subtorus is a rank-``k`` saturated
sublattice of ``Z^m``, stored as a basis in row Hermite normal form so that
two equal subtori compare equal structurally.

Matrices act on column vectors (``psi @ v``).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import gcd
from typing import Iterable, Optional, Sequence

Vector = tuple[int, ...]


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix stored row-major.

    ``cols`` is kept explicitly so that matrices with zero rows still know
    their width.
    """

    entries: tuple[tuple[int, ...], ...]
    cols: int

    def __post_init__(self):
        for row in self.entries:
            if len(row) != self.cols:
                raise LatticeError(
                    f"row of length {len(row)} in a matrix with {self.cols} columns"
                )

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        entries = tuple(tuple(int(x) for x in row) for row in rows)
        if cols is None:
            if not entries:
                raise LatticeError("cannot infer the width of an empty matrix")
            cols = len(entries[0])
        return cls(entries, cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(tuple((0,) * cols for _ in range(rows)), cols)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self.entries)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(self.column(j) for j in range(self.cols)), self.rows)

    def tolist(self) -> list[list[int]]:
        return [list(row) for row in self.entries]

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise LatticeError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = [other.column(j) for j in range(other.cols)]
            return IntMatrix(
                tuple(tuple(_dot(row, c) for c in cols) for row in self.entries),
                other.cols,
            )
        vec = tuple(other)
        if len(vec) != self.cols:
            raise LatticeError(f"cannot apply a {self.shape} matrix to a vector of length {len(vec)}")
        return tuple(_dot(row, vec) for row in self.entries)

    def det(self) -> int:
        if self.rows != self.cols:
            raise LatticeError("determinant of a non-square matrix")
        return _bareiss_det([list(r) for r in self.entries])

    def is_unimodular(self) -> bool:
        return self.rows == self.cols and abs(self.det()) == 1

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(map(str, r)) + "]" for r in self.entries) + "]"


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def _bareiss_det(a: list[list[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def matrix_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank over Q, by fraction-free elimination."""
    a = [list(r) for r in rows if any(r)]
    if not a:
        return 0
    ncols = len(a[0])
    rank = 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(a)) if a[i][col] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        p = a[rank]
        for i in range(rank + 1, len(a)):
            if a[i][col]:
                f = a[i][col]
                a[i] = [p[col] * x - f * y for x, y in zip(a[i], p)]
        rank += 1
        if rank == len(a):
            break
    return rank


def vector_gcd(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def canonical_sign(v: Sequence[int]) -> Vector:
    """Flip ``v`` so that its first nonzero coordinate is positive."""
    for x in v:
        if x != 0:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    return tuple(v)


def primitivize(v: Sequence[int]) -> Vector:
    g = vector_gcd(v)
    if g == 0:
        raise LatticeError("zero vector has no primitive form")
    return canonical_sign(tuple(x // g for x in v))


def is_primitive(v: Sequence[int]) -> bool:
    return vector_gcd(v) == 1


def det2(v: Sequence[int], w: Sequence[int]) -> int:
    if len(v) != 2 or len(w) != 2:
        raise LatticeError(f"det2 needs vectors in Z^2, got lengths {len(v)} and {len(w)}")
    return v[0] * w[1] - v[1] * w[0]


# --- Smith normal form -------------------------------------------------------

def smith_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(U, D, V)`` with ``M == U @ D @ V``.

    ``U`` and ``V`` are unimodular and ``D`` is diagonal with nonnegative
    entries ``d1 | d2 | ...``.  Pivots are chosen as the smallest nonzero
    entry of the remaining block.
    """
    r, c = m.shape
    a = m.tolist()
    # a is transformed in place; u and v accumulate the inverse operations
    # so that M = u @ a @ v holds after every step.
    u = [[int(i == j) for j in range(r)] for i in range(r)]
    v = [[int(i == j) for j in range(c)] for i in range(c)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        for row in u:
            row[i], row[j] = row[j], row[i]

    def add_row(i, j, k):  # row_i += k * row_j
        a[i] = [x + k * y for x, y in zip(a[i], a[j])]
        for row in u:
            row[j] -= k * row[i]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        for row in u:
            row[i] = -row[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        v[i], v[j] = v[j], v[i]

    def add_col(i, j, k):  # col_i += k * col_j
        for row in a:
            row[i] += k * row[j]
        v[j] = [x - k * y for x, y in zip(v[j], v[i])]

    for t in range(min(r, c)):
        while True:
            best = None
            for i in range(t, r):
                for j in range(t, c):
                    if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return _wrap(u, a, v, r, c)
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = a[t][t]
            dirty = False
            for i in range(t + 1, r):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, c):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    dirty = dirty or a[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, r) for j in range(t + 1, c) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            negate_row(t)
    return _wrap(u, a, v, r, c)


def _wrap(u, a, v, r, c):
    return (
        IntMatrix(tuple(map(tuple, u)), r),
        IntMatrix(tuple(map(tuple, a)), c),
        IntMatrix(tuple(map(tuple, v)), c),
    )


def elementary_divisors(m: IntMatrix) -> list[int]:
    """Nonzero diagonal entries of the Smith form, in divisibility order."""
    _, d, _ = smith_normal_form(m)
    return [d[i, i] for i in range(min(d.shape)) if d[i, i] != 0]


# --- Hermite normal form and subtori ----------------------------------------

def hermite_normal_form(rows: Sequence[Sequence[int]]) -> tuple[Vector, ...]:
    """Row-style HNF basis of the lattice spanned by ``rows``.

    Zero rows are dropped; pivots are positive and entries above a pivot are
    reduced into ``[0, pivot)``.  Two generating sets give the same output
    exactly when they span the same lattice.
    """
    a = [list(r) for r in rows if any(r)]
    if not a:
        return ()
    ncols = len(a[0])
    out = 0
    for col in range(ncols):
        # gcd-eliminate column `col` among rows out..end
        while True:
            nz = [i for i in range(out, len(a)) if a[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(a[i][col]))
            a[out], a[piv] = a[piv], a[out]
            done = True
            for i in range(out + 1, len(a)):
                if a[i][col]:
                    q = a[i][col] // a[out][col]
                    a[i] = [x - q * y for x, y in zip(a[i], a[out])]
                    done = done and a[i][col] == 0
            if done:
                break
        if out < len(a) and a[out][col] != 0:
            if a[out][col] < 0:
                a[out] = [-x for x in a[out]]
            p = a[out][col]
            for i in range(out):
                q = a[i][col] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[out])]
            out += 1
    return tuple(tuple(r) for r in a[:out])


@dataclass(frozen=True)
class PrimitiveSubtorus:
    """A subtorus of ``T^m`` as a saturated sublattice of ``Z^m`` in HNF."""

    ambient_rank: int
    basis: tuple[Vector, ...] = ()

    def __post_init__(self):
        for b in self.basis:
            if len(b) != self.ambient_rank:
                raise LatticeError(f"basis vector {b} does not live in Z^{self.ambient_rank}")

    @classmethod
    def trivial(cls, m: int) -> "PrimitiveSubtorus":
        return cls(m, ())

    @classmethod
    def full(cls, m: int) -> "PrimitiveSubtorus":
        return cls(m, IntMatrix.identity(m).entries)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def direction(self) -> Vector:
        """The canonical primitive vector of a circle subgroup."""
        if self.rank != 1:
            raise LatticeError(f"direction of a rank-{self.rank} subtorus")
        return self.basis[0]

    def contains(self, other: "PrimitiveSubtorus") -> bool:
        if other.ambient_rank != self.ambient_rank:
            return False
        # saturation makes rational containment equivalent to integral containment
        return matrix_rank(self.basis + other.basis) == self.rank

    def image(self, psi: IntMatrix) -> "PrimitiveSubtorus":
        return subtorus_from_vectors([psi @ b for b in self.basis], self.ambient_rank)

    def __str__(self) -> str:
        if self.rank == 0:
            return "{1}"
        if self.rank == self.ambient_rank:
            return f"T^{self.ambient_rank}"
        return "<" + ", ".join("(" + ",".join(map(str, b)) + ")" for b in self.basis) + ">"


def subtorus_from_vectors(vs: Iterable[Sequence[int]], m: int) -> PrimitiveSubtorus:
    """Saturate the span of ``vs`` in ``Z^m``."""
    rows = [tuple(int(x) for x in v) for v in vs]
    for v in rows:
        if len(v) != m:
            raise LatticeError(f"vector {v} does not live in Z^{m}")
    rows = [v for v in rows if any(v)]
    if not rows:
        return PrimitiveSubtorus.trivial(m)
    _, d, v = smith_normal_form(IntMatrix.from_rows(rows, m))
    r = sum(1 for i in range(min(d.shape)) if d[i, i] != 0)
    # M = U D V: the row space of M is spanned by d_i * V_i, so V_0..V_{r-1}
    # form a basis of its saturation.
    return PrimitiveSubtorus(m, hermite_normal_form(v.entries[:r]))


def complete_to_unimodular(v: Sequence[int]) -> IntMatrix:
    """A unimodular matrix whose first row is ``v``."""
    v = tuple(v)
    if not is_primitive(v):
        raise LatticeError(f"{v} is not primitive")
    u, _, w = smith_normal_form(IntMatrix.from_rows([v]))
    # v = u00 * w_0 with u00 = +-1, so rescaling row 0 of w by u00 gives v
    rows = list(w.entries)
    rows[0] = v
    return IntMatrix(tuple(rows), len(v))


def adjugate(m: IntMatrix) -> IntMatrix:
    n = m.rows
    if n == 1:
        return IntMatrix(((1,),), 1)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [
                [m[r, c] for c in range(n) if c != i]
                for r in range(n) if r != j
            ]
            row.append((-1) ** (i + j) * _bareiss_det(minor))
        out.append(tuple(row))
    return IntMatrix(tuple(out), n)


def independent_subset(vectors: Sequence[Sequence[int]]) -> list[int]:
    """Indices of a greedily chosen maximal linearly independent subset."""
    chosen: list[int] = []
    for i, v in enumerate(vectors):
        if matrix_rank([vectors[j] for j in chosen] + [v]) > len(chosen):
            chosen.append(i)
    return chosen


def solve_unimodular_map(
    sources: Sequence[Sequence[int]],
    targets: Sequence[Sequence[int]],
    signs: Optional[Sequence[int]] = None,
) -> Optional[IntMatrix]:
    """The unimodular ``psi`` with ``psi @ s_i == sign_i * t_i`` for every pair.

    ``sources`` must span ``Q^m``; the map is solved on a maximal independent
    subset and checked on the remaining pairs.  Returns ``None`` when the
    solution is not integral, not unimodular, or inconsistent.
    """
    if len(sources) != len(targets):
        raise LatticeError("sources and targets differ in length")
    if signs is None:
        signs = [1] * len(sources)
    if not sources:
        raise LatticeError("no source vectors")
    m = len(sources[0])
    idx = independent_subset(sources)
    if len(idx) < m:
        raise LatticeError(f"source vectors have rank {len(idx)} < {m}")
    s = IntMatrix.from_rows([sources[i] for i in idx], m).transpose()
    t = IntMatrix.from_rows([[signs[i] * x for x in targets[i]] for i in idx], m).transpose()
    det = s.det()
    num = t @ adjugate(s)
    if any(x % det for row in num.entries for x in row):
        return None
    psi = IntMatrix(tuple(tuple(x // det for x in row) for row in num.entries), m)
    if not psi.is_unimodular():
        return None
    for src, tgt, sg in zip(sources, targets, signs):
        if psi @ src != tuple(sg * x for x in tgt):
            return None
    return psi


def gcd_of_minors(m: IntMatrix, k: int) -> int:
    """gcd of all ``k x k`` minors; used as an independent SNF check."""
    g = 0
    for rs in combinations(range(m.rows), k):
        for cs in combinations(range(m.cols), k):
            g = gcd(g, _bareiss_det([[m[r, c] for c in cs] for r in rs]))
    return g


def unimodular_inverse(m: IntMatrix) -> IntMatrix:
    d = m.det()
    if abs(d) != 1:
        raise LatticeError(f"matrix with determinant {d} has no integral inverse")
    adj = adjugate(m)
    return IntMatrix(tuple(tuple(d * x for x in row) for row in adj.entries), m.cols)


def unimodular_sending(v: Sequence[int], w: Sequence[int]) -> IntMatrix:
    """Some unimodular ``psi`` with ``psi @ v == w`` for primitive ``v``, ``w``."""
    a = complete_to_unimodular(v).transpose()  # a @ e1 == v
    b = complete_to_unimodular(w).transpose()
    return b @ unimodular_inverse(a)
