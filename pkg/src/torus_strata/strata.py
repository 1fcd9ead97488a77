"""Combinatorial orbit spaces, their strata, links and the pseudomanifold axioms.

Five kinds of base space occur below dimension three: finite point sets, the
circle, closed surfaces (these have a single stratum per component), finite
graphs (vertices below edges) and 2-stratifolds, presented as a set of
singular circles together with compact surface pieces whose boundary circles
wrap the singular circles with a given degree.

Graphs are never smoothed: a degree-2 vertex is still a stratum.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union


class StrataError(ValueError):
    pass


@dataclass(frozen=True)
class Points:
    count: int = 1
    kind = "points"
    dims = (0, 0)


@dataclass(frozen=True)
class Circle:
    kind = "circle"
    dims = (1, 0)


@dataclass(frozen=True)
class ClosedSurface:
    """Closed surface; ``genus`` counts handles, or crosscaps if non-orientable."""

    orientable: bool = True
    genus: int = 0
    kind = "surface"
    dims = (2, 0)


@dataclass(frozen=True)
class Edge:
    name: str
    u: str
    v: str

    @property
    def is_loop(self) -> bool:
        return self.u == self.v


@dataclass(frozen=True)
class Graph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    kind = "graph"
    dims = (0, 1)

    def degree(self, vertex: str) -> int:
        """Number of edge-ends at ``vertex``; a loop contributes two."""
        return sum((e.u == vertex) + (e.v == vertex) for e in self.edges)

    def multiplicity(self, a: str, b: str) -> int:
        return sum(1 for e in self.edges if {e.u, e.v} == {a, b})

    def loops_at(self, vertex: str) -> int:
        return sum(1 for e in self.edges if e.is_loop and e.u == vertex)


@dataclass(frozen=True)
class SurfacePiece:
    """A compact surface whose boundary circles are attached to singular circles.

    ``boundary`` lists one ``(circle, degree)`` pair per boundary circle of
    the piece; ``degree`` is how many times that boundary wraps the circle.
    """

    name: str
    orientable: bool = True
    genus: int = 0
    boundary: tuple[tuple[str, int], ...] = ()


@dataclass(frozen=True)
class Stratifold2:
    circles: tuple[str, ...]
    pieces: tuple[SurfacePiece, ...]
    kind = "stratifold"
    dims = (1, 1)

    def attachments(self, circle: str) -> list[tuple[str, int]]:
        return [(p.name, d) for p in self.pieces for c, d in p.boundary if c == circle]


OrbitSpace = Union[Points, Circle, ClosedSurface, Graph, Stratifold2]


@dataclass(frozen=True)
class Stratum:
    id: str
    dimension: int
    closure_contains: tuple[str, ...] = ()


@dataclass(frozen=True)
class LinkDescription:
    component_count: int
    points_per_component: tuple[int, ...] = ()


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    location: str = ""

    def __str__(self) -> str:
        return f"{self.code}: {self.message}" + (f" [{self.location}]" if self.location else "")


@dataclass(frozen=True)
class NormalityReport:
    normal: bool
    link_sizes: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.normal

    def offenders(self) -> list[str]:
        return sorted(s for s, k in self.link_sizes.items() if k != 1)


@dataclass(frozen=True)
class SurfaceForm:
    orientable: bool
    genus: int
    boundary_count: int

    def __str__(self) -> str:
        kind = "orientable" if self.orientable else "non-orientable"
        return f"{kind} surface of genus {self.genus} with {self.boundary_count} boundary circle" + ("" if self.boundary_count == 1 else "s")


# --- builders ----------------------------------------------------------------

def graph(vertices: Iterable[str], edges: Iterable[Sequence[str]]) -> Graph:
    """Build a graph from ``(u, v)`` or ``(u, v, name)`` tuples.

    Unnamed edges get ``e0, e1, ...`` by position.
    """
    out = []
    for i, e in enumerate(edges):
        if len(e) == 3:
            u, v, name = e
        else:
            (u, v), name = e, f"e{i}"
        out.append(Edge(str(name), str(u), str(v)))
    return Graph(tuple(str(v) for v in vertices), tuple(out))


def interval(a: str = "v0", b: str = "v1") -> Graph:
    return graph([a, b], [(a, b)])


def path_graph(k: int) -> Graph:
    """Path with ``k`` vertices."""
    names = [f"v{i}" for i in range(k)]
    return graph(names, list(zip(names, names[1:])))


def loop(vertex: str = "v") -> Graph:
    return graph([vertex], [(vertex, vertex)])


def stratifold(circles: Iterable[str], pieces: Iterable[SurfacePiece]) -> Stratifold2:
    return Stratifold2(tuple(circles), tuple(pieces))


def disk_stratifold() -> Stratifold2:
    return stratifold(["c"], [SurfacePiece("disk", True, 0, (("c", 1),))])


# --- strata and links --------------------------------------------------------

def strata_poset(q: OrbitSpace) -> list[Stratum]:
    """All strata of ``q`` with the lower strata in each closure."""
    if isinstance(q, Points):
        return [Stratum(f"p{i}", 0) for i in range(q.count)]
    if isinstance(q, Circle):
        return [Stratum("S1", 1)]
    if isinstance(q, ClosedSurface):
        return [Stratum("Q", 2)]
    if isinstance(q, Graph):
        out = [Stratum(v, 0) for v in q.vertices]
        for e in q.edges:
            out.append(Stratum(e.name, 1, tuple(dict.fromkeys((e.u, e.v)))))
        return out
    if isinstance(q, Stratifold2):
        out = [Stratum(c, 1) for c in q.circles]
        for p in q.pieces:
            out.append(Stratum(p.name, 2, tuple(dict.fromkeys(c for c, _ in p.boundary))))
        return out
    raise TypeError(f"not an orbit space: {q!r}")


def top_dimension(q: OrbitSpace) -> int:
    l, n = q.dims
    return l + n


def _stratum_id(s: Union[Stratum, str]) -> str:
    return s.id if isinstance(s, Stratum) else s


def link_of(q: OrbitSpace, s: Union[Stratum, str]) -> LinkDescription:
    """Link of a point of the stratum ``s``.

    Links below the top are finite point sets here (``q`` has length at most
    one), so each component is a single point.
    """
    sid = _stratum_id(s)
    if isinstance(q, Graph) and sid in q.vertices:
        k = q.degree(sid)
        return LinkDescription(k, (1,) * k)
    if isinstance(q, Stratifold2) and sid in q.circles:
        k = sum(d for _, d in q.attachments(sid))
        return LinkDescription(k, (1,) * k)
    if sid not in {t.id for t in strata_poset(q)}:
        raise StrataError(f"{sid!r} is not a stratum")
    return LinkDescription(0, ())


def lower_strata(q: OrbitSpace) -> list[Stratum]:
    top = top_dimension(q)
    return [s for s in strata_poset(q) if s.dimension < top]


def is_normal(q: OrbitSpace) -> NormalityReport:
    """Every link below the top must be connected, i.e. a single point."""
    sizes = {s.id: link_of(q, s).component_count for s in lower_strata(q)}
    return NormalityReport(all(k == 1 for k in sizes.values()), sizes)


def is_interval(q: OrbitSpace) -> bool:
    return (
        isinstance(q, Graph)
        and len(q.vertices) == 2
        and len(q.edges) == 1
        and not q.edges[0].is_loop
    )


def is_single_loop(q: OrbitSpace) -> bool:
    return isinstance(q, Graph) and len(q.vertices) == 1 and len(q.edges) == 1 and q.edges[0].is_loop


def _components(nodes: Iterable[str], links: Iterable[tuple[str, str]]) -> list[list[str]]:
    parent = {n: n for n in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in links:
        if a in parent and b in parent:
            parent[find(a)] = find(b)
    groups: dict[str, list[str]] = defaultdict(list)
    for n in parent:
        groups[find(n)].append(n)
    return list(groups.values())


def connected_components(q: OrbitSpace) -> list[OrbitSpace]:
    if isinstance(q, Points):
        return [Points(1) for _ in range(q.count)]
    if isinstance(q, Graph):
        comps = _components(q.vertices, [(e.u, e.v) for e in q.edges])
        out = []
        for comp in comps:
            members = set(comp)
            out.append(
                Graph(
                    tuple(v for v in q.vertices if v in members),
                    tuple(e for e in q.edges if e.u in members),
                )
            )
        return out
    if isinstance(q, Stratifold2):
        nodes = list(q.circles) + [p.name for p in q.pieces]
        links = [(p.name, c) for p in q.pieces for c, _ in p.boundary]
        out = []
        for comp in _components(nodes, links):
            members = set(comp)
            out.append(
                Stratifold2(
                    tuple(c for c in q.circles if c in members),
                    tuple(p for p in q.pieces if p.name in members),
                )
            )
        return out
    return [q]


def surface_with_boundary_form(q: OrbitSpace) -> Optional[SurfaceForm]:
    """Invariants of a normal, connected 2-stratifold as a surface with boundary.

    Normal means each circle is wrapped exactly once by exactly one boundary
    circle, so the circles are just the boundary of the underlying surface.
    Returns ``None`` when ``q`` is not normal.
    """
    if not isinstance(q, Stratifold2):
        raise TypeError(f"surface_with_boundary_form needs a 2-stratifold, got {q.kind}")
    if not is_normal(q):
        return None
    if len(q.pieces) != 1:
        raise StrataError(
            f"normal 2-stratifold has {len(q.pieces)} components; split it with connected_components"
        )
    (piece,) = q.pieces
    return SurfaceForm(piece.orientable, piece.genus, len(piece.boundary))


# --- validation --------------------------------------------------------------

def _structural_violations(q: OrbitSpace) -> list[Violation]:
    v: list[Violation] = []
    if isinstance(q, Points):
        if q.count < 1:
            v.append(Violation("empty-space", "a point set needs at least one point"))
    elif isinstance(q, ClosedSurface):
        if q.genus < 0 or (not q.orientable and q.genus < 1):
            v.append(Violation("bad-genus", f"no closed surface with orientable={q.orientable}, genus={q.genus}"))
    elif isinstance(q, Graph):
        v.extend(_duplicates(list(q.vertices) + [e.name for e in q.edges]))
        if not q.vertices:
            v.append(Violation("empty-space", "graph has no vertices"))
        if not q.edges:
            v.append(Violation("no-top-stratum", "graph has no edges, so there is no top stratum"))
        names = set(q.vertices)
        for e in q.edges:
            for end in (e.u, e.v):
                if end not in names:
                    v.append(Violation("unknown-vertex", f"edge {e.name} ends at unknown vertex {end!r}", e.name))
        for x in q.vertices:
            if q.degree(x) == 0:
                v.append(Violation("density", f"density fails at vertex {x}: it lies in no edge closure", x))
    elif isinstance(q, Stratifold2):
        v.extend(_duplicates(list(q.circles) + [p.name for p in q.pieces]))
        if not q.pieces:
            v.append(Violation("no-top-stratum", "2-stratifold has no surface pieces"))
        names = set(q.circles)
        for p in q.pieces:
            if p.genus < 0 or (not p.orientable and p.genus < 1):
                v.append(Violation("bad-genus", f"piece {p.name} has impossible genus {p.genus}", p.name))
            if not p.boundary:
                v.append(Violation(
                    "empty-boundary",
                    f"piece {p.name} has no boundary; model it as a closed surface instead",
                    p.name,
                ))
            for c, d in p.boundary:
                if c not in names:
                    v.append(Violation("unknown-circle", f"piece {p.name} attaches to unknown circle {c!r}", p.name))
                if d < 1:
                    v.append(Violation("bad-degree", f"piece {p.name} wraps {c} with degree {d} < 1", p.name))
        for c in q.circles:
            if not q.attachments(c):
                v.append(Violation("density", f"density fails at circle {c}: no piece is attached", c))
    elif not isinstance(q, Circle):
        raise TypeError(f"not an orbit space: {q!r}")
    return v


def _duplicates(ids: list[str]) -> list[Violation]:
    return [
        Violation("duplicate-id", f"stratum name {name!r} is used {k} times", name)
        for name, k in Counter(ids).items() if k > 1
    ]


def cell_model(q: OrbitSpace) -> tuple[dict[str, set[str]], dict[str, str]]:
    """A finite face-poset model of ``q`` built from the raw presentation.

    Returns ``(faces, owner)``: the immediate faces of each open cell and the
    stratum each cell belongs to.  It is built independently of
    ``strata_poset`` so the two can be cross-checked.
    """
    faces: dict[str, set[str]] = {}
    owner: dict[str, str] = {}
    if isinstance(q, Points):
        for i in range(q.count):
            faces[f"p{i}"] = set()
            owner[f"p{i}"] = f"p{i}"
    elif isinstance(q, Circle):
        faces.update({"S1.pt": set(), "S1.arc": {"S1.pt"}})
        owner.update({"S1.pt": "S1", "S1.arc": "S1"})
    elif isinstance(q, ClosedSurface):
        faces["Q.pt"] = set()
        faces["Q.cell"] = {"Q.pt"}
        owner.update({"Q.pt": "Q", "Q.cell": "Q"})
    elif isinstance(q, Graph):
        for x in q.vertices:
            faces[f"{x}.pt"] = set()
            owner[f"{x}.pt"] = x
        for e in q.edges:
            faces[f"{e.name}.arc"] = {f"{e.u}.pt", f"{e.v}.pt"}
            owner[f"{e.name}.arc"] = e.name
    elif isinstance(q, Stratifold2):
        for c in q.circles:
            faces[f"{c}.pt"] = set()
            faces[f"{c}.arc"] = {f"{c}.pt"}
            owner[f"{c}.pt"] = owner[f"{c}.arc"] = c
        for p in q.pieces:
            faces[f"{p.name}.open"] = {f"{c}.arc" for c, _ in p.boundary} | {f"{c}.pt" for c, _ in p.boundary}
            owner[f"{p.name}.open"] = p.name
    return faces, owner


def _closure(faces: dict[str, set[str]], cells: Iterable[str]) -> set[str]:
    out: set[str] = set()
    todo = list(cells)
    while todo:
        c = todo.pop()
        if c not in out:
            out.add(c)
            todo.extend(faces.get(c, ()))
    return out


def stratification_checks(q: OrbitSpace) -> list[Violation]:
    """Check the general properties of strata on the face-poset model.

    Frontier condition, closures as unions of strata, agreement with
    ``strata_poset``, density of the top strata, and for spaces of length one:
    top strata open, not closed, with every component of their frontier
    containing a lower stratum.
    """
    faces, owner = cell_model(q)
    by_stratum: dict[str, set[str]] = defaultdict(set)
    for cell, s in owner.items():
        by_stratum[s].add(cell)
    poset = {s.id: s for s in strata_poset(q)}
    v: list[Violation] = []
    closures = {s: _closure(faces, cells) for s, cells in by_stratum.items()}

    for s, cells in by_stratum.items():
        if len(_components(cells, [(a, b) for a in cells for b in faces[a] if b in cells])) != 1:
            v.append(Violation("stratum-disconnected", f"stratum {s} is not connected", s))
    for s2, cl in closures.items():
        for s1, cells in by_stratum.items():
            if cells & cl and not cells <= cl:
                v.append(Violation("frontier", f"{s1} meets the closure of {s2} without lying in it", s1))
        union = set().union(*(c for c in by_stratum.values() if c <= cl))
        if union != cl:
            v.append(Violation("closure-not-union", f"closure of {s2} is not a union of strata", s2))
        lower = {s1 for s1, cells in by_stratum.items() if s1 != s2 and cells <= cl}
        if lower != set(poset[s2].closure_contains):
            v.append(Violation("poset-mismatch", f"closure of {s2} contains {sorted(lower)}", s2))
        for s1 in lower:
            if poset[s1].dimension >= poset[s2].dimension:
                v.append(Violation("poset-dimension", f"{s1} in the closure of {s2} is not lower-dimensional", s2))

    top = top_dimension(q)
    tops = [s for s in poset.values() if s.dimension == top]
    if not tops:
        return v + [Violation("no-top-stratum", "there is no top stratum")]
    dense = _closure(faces, [c for s in tops for c in by_stratum[s.id]])
    for s in poset.values():
        if s.dimension < top and not by_stratum[s.id] <= dense:
            v.append(Violation("density", f"density fails at {s.id}: it lies in no top-stratum closure", s.id))
    if q.dims[1] >= 1:
        cofaces: dict[str, set[str]] = defaultdict(set)
        for c, fs in faces.items():
            for f in fs:
                cofaces[f].add(c)
        for s in tops:
            cells = by_stratum[s.id]
            if any(not cofaces[c] <= cells for c in cells):
                v.append(Violation("top-not-open", f"top stratum {s.id} is not open", s.id))
            frontier = closures[s.id] - cells
            if not frontier:
                v.append(Violation("top-stratum-closed", f"top stratum {s.id} is closed", s.id))
            links = [(a, b) for a in frontier for b in faces[a] if b in frontier]
            for comp in _components(frontier, links):
                if not any(poset[owner[c]].dimension < s.dimension for c in comp):
                    v.append(Violation("frontier-component", f"a frontier component of {s.id} has no lower stratum", s.id))
    return v


def validate_pseudomanifold(q: OrbitSpace) -> list[Violation]:
    """Structured list of violations; empty when ``q`` is a valid orbit space."""
    v = _structural_violations(q)
    if v:
        return v
    return stratification_checks(q)
