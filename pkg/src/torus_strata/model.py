"""Cellular models of canonical models over graphs, and their homology.

Over a graph the canonical model is a graph of spaces: the torus collapsed
by the vertex label sits over each vertex, and ``T^m x (0, 1)`` over each
open edge.  Its cellular chains are those of the double mapping cylinder of
the quotient maps ``T^m -> T^m / lambda(v)``.  With the one-vertex product
structure on ``T^m`` every cell of the torus is a cycle, so the boundary of
a cylinder cell only sees its two ends.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence, TextIO

from .chardata import CharacteristicData, ZeroGroup
from .lattice import (
    IntMatrix,
    elementary_divisors,
    is_primitive,
    primitivize,
    smith_normal_form,
)
from .strata import Graph


class ComplexError(ValueError):
    pass


@dataclass(frozen=True)
class ChainComplex:
    """Free chain complex ``C_d -> ... -> C_0``.

    ``boundaries[k]`` is the matrix of ``d_k : C_k -> C_{k-1}`` with shape
    ``(dims[k-1], dims[k])``; ``boundaries[0]`` is the zero map to 0.
    """

    dims: tuple[int, ...]
    boundaries: tuple[IntMatrix, ...]
    cell_names: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self):
        if len(self.boundaries) != len(self.dims):
            raise ComplexError("one boundary matrix per degree is required")
        for k, (n, b) in enumerate(zip(self.dims, self.boundaries)):
            expected = (self.dims[k - 1] if k else 0, n)
            if b.shape != expected:
                raise ComplexError(f"d_{k} has shape {b.shape}, expected {expected}")
        for k in range(2, len(self.dims)):
            if not (self.boundaries[k - 1] @ self.boundaries[k]).is_zero():
                raise ComplexError(f"d_{k - 1} d_{k} != 0")
        if self.cell_names and [len(c) for c in self.cell_names] != list(self.dims):
            raise ComplexError("cell names do not match the ranks")

    @property
    def top_degree(self) -> int:
        return len(self.dims) - 1

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.dims))


@dataclass(frozen=True)
class DegreeHomology:
    free_rank: int
    torsion: tuple[int, ...] = ()

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class HomologyProfile:
    degrees: tuple[DegreeHomology, ...] = field(default_factory=tuple)

    def __getitem__(self, k: int) -> DegreeHomology:
        return self.degrees[k]

    def __len__(self) -> int:
        return len(self.degrees)

    @property
    def betti(self) -> tuple[int, ...]:
        return tuple(h.free_rank for h in self.degrees)

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * h.free_rank for k, h in enumerate(self.degrees))

    def __str__(self) -> str:
        return "(" + ", ".join(map(str, self.degrees)) + ")"

    @classmethod
    def from_groups(cls, *groups) -> "HomologyProfile":
        """Shorthand: ``from_groups(1, 0, (0, [5]), 1)``."""
        out = []
        for g in groups:
            if isinstance(g, tuple):
                out.append(DegreeHomology(g[0], tuple(g[1])))
            else:
                out.append(DegreeHomology(g))
        return cls(tuple(out))


def homology(c: ChainComplex) -> HomologyProfile:
    """Integral homology from the Smith forms of the boundary maps."""
    ranks = []
    divisors = []
    for b in c.boundaries:
        ds = elementary_divisors(b) if b.rows and b.cols else []
        ranks.append(len(ds))
        divisors.append(ds)
    out = []
    for k, n in enumerate(c.dims):
        rank_out = ranks[k]
        rank_in = ranks[k + 1] if k + 1 < len(ranks) else 0
        torsion = tuple(d for d in divisors[k + 1] if d > 1) if k + 1 < len(ranks) else ()
        out.append(DegreeHomology(n - rank_out - rank_in, torsion))
    return HomologyProfile(tuple(out))


def collapse_functional(direction: Sequence[int]) -> tuple[int, ...]:
    """The primitive functional on ``Z^2`` vanishing on the circle ``direction``."""
    p, q = direction
    return primitivize((q, -p))


def build_canonical_complex(d: CharacteristicData) -> ChainComplex:
    """Cellular chain complex of the canonical model over a graph base.

    Cells, for ``m = 2``: per vertex a point and a circle (the quotient
    ``T^2 / lambda(v)``); per edge the cylinders ``pt x I``, ``e1 x I``,
    ``e2 x I`` and ``F x I`` over the cells of ``T^2``.  For ``m = 1`` each
    vertex space is a point and each edge carries ``pt x I`` and ``e x I``.
    """
    g = d.q
    if not isinstance(g, Graph):
        raise ComplexError(f"canonical complexes are built over graphs, not {g.kind}")
    m = d.m
    if m not in (1, 2):
        raise ComplexError(f"unsupported torus rank {m}")
    if not isinstance(d.c, ZeroGroup):
        raise ComplexError("over a graph the Chern class must vanish")

    # torus cells by degree: ("pt",), ("e1", ...), ("F",)
    torus_cells = [["pt"], [f"e{i + 1}" for i in range(m)]] + ([["F"]] if m == 2 else [])
    names: list[list[str]] = [[] for _ in range(m + 2)]
    index: dict[str, int] = {}

    def add(k: int, name: str):
        index[name] = len(names[k])
        names[k].append(name)

    for v in g.vertices:
        add(0, f"{v}*pt")
        if m == 2:
            add(1, f"{v}*s")
    for e in g.edges:
        for k, cells in enumerate(torus_cells):
            for cell in cells:
                add(k + 1, f"{e.name}*{cell}xI")

    alpha = {v: collapse_functional(d.lam[v].direction) for v in g.vertices} if m == 2 else {}

    def quotient_chain(v: str, k: int, cell: str) -> dict[str, int]:
        # image of a torus cell in the cellular chains of T^m / lambda(v)
        if k == 0:
            return {f"{v}*pt": 1}
        if k == 1 and m == 2:
            coeff = alpha[v][int(cell[1:]) - 1]
            return {f"{v}*s": coeff} if coeff else {}
        return {}

    dims = [len(x) for x in names]
    mats = [[[0] * dims[k] for _ in range(dims[k - 1] if k else 0)] for k in range(len(dims))]
    for e in g.edges:
        for k, cells in enumerate(torus_cells):
            sign = (-1) ** k
            for cell in cells:
                col = index[f"{e.name}*{cell}xI"]
                # d(cell x I) = (d cell) x I + (-1)^k (q_v1(cell) - q_v0(cell));
                # d cell = 0 for the one-vertex torus structure
                for name, coeff in quotient_chain(e.v, k, cell).items():
                    mats[k + 1][index[name]][col] += sign * coeff
                for name, coeff in quotient_chain(e.u, k, cell).items():
                    mats[k + 1][index[name]][col] -= sign * coeff
    boundaries = tuple(IntMatrix(tuple(map(tuple, mat)), dims[k]) for k, mat in enumerate(mats))
    return ChainComplex(tuple(dims), boundaries, tuple(tuple(x) for x in names))


def interval_closed_form(v: Sequence[int], w: Sequence[int]) -> HomologyProfile:
    """Homology of the canonical model over an interval with labels ``v``, ``w``.

    ``H_1 = Z^2 / <v, w>`` read off the Smith form of the matrix with rows
    ``v`` and ``w``; ``H_2`` is free of rank ``2 - rank<v, w>``.
    """
    if len(v) != 2 or len(w) != 2:
        raise ValueError("interval labels must lie in Z^2")
    if not (is_primitive(v) and is_primitive(w)):
        raise ValueError(f"labels {tuple(v)}, {tuple(w)} must be primitive")
    _, dmat, _ = smith_normal_form(IntMatrix.from_rows([v, w]))
    diag = [dmat[0, 0], dmat[1, 1]]
    rank = sum(1 for x in diag if x)
    h1 = DegreeHomology(2 - rank, tuple(x for x in diag if x > 1))
    return HomologyProfile((DegreeHomology(1), h1, DegreeHomology(2 - rank), DegreeHomology(1)))


# --- plain-text export -------------------------------------------------------

def dump_complex(c: ChainComplex, out: TextIO) -> None:
    """Write ``c`` as a plain-text listing.

    Format: a ``chain-complex`` header, then per degree ``degree K rank N``,
    one ``cell`` line per generator, and the boundary matrix as
    ``boundary K ROWS COLS`` followed by its entries row by row.
    """
    out.write(f"chain-complex top-degree {c.top_degree}\n")
    for k, n in enumerate(c.dims):
        out.write(f"degree {k} rank {n}\n")
        for name in (c.cell_names[k] if c.cell_names else ()):
            out.write(f"cell {name}\n")
        b = c.boundaries[k]
        out.write(f"boundary {k} {b.rows} {b.cols}\n")
        for row in b.entries:
            out.write(" ".join(map(str, row)) + "\n")


def load_complex(text: str) -> ChainComplex:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("chain-complex"):
        raise ComplexError("missing chain-complex header")
    dims, mats, names = [], [], []
    i = 1
    while i < len(lines):
        hdr = re.fullmatch(r"degree (\d+) rank (\d+)", lines[i])
        if not hdr:
            raise ComplexError(f"line {i + 1}: expected 'degree K rank N'")
        dims.append(int(hdr.group(2)))
        i += 1
        cells = []
        while lines[i].startswith("cell "):
            cells.append(lines[i][5:])
            i += 1
        names.append(tuple(cells))
        bnd = re.fullmatch(r"boundary (\d+) (\d+) (\d+)", lines[i])
        if not bnd:
            raise ComplexError(f"line {i + 1}: expected 'boundary K ROWS COLS'")
        rows, cols = int(bnd.group(2)), int(bnd.group(3))
        entries = [tuple(int(x) for x in lines[i + 1 + r].split()) for r in range(rows)]
        mats.append(IntMatrix(tuple(entries), cols))
        i += 1 + rows
    has_names = any(names)
    return ChainComplex(tuple(dims), tuple(mats), tuple(names) if has_names else ())
