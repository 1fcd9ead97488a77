"""Naming the equivariant homeomorphism type and deciding manifold structure.

Dispatch is on the shape ``(l, n)`` of the orbit space; the torus rank ``m``
only enters the wording.  The same per-shape descriptions drive both
:func:`classify` and the table renderer, so the tables are a view of the
dispatch rather than stored text.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .chardata import CharacteristicData, components, dimension_profiles, make_data
from .iso import decide_iso
from .lattice import det2
from .model import HomologyProfile, build_canonical_complex, homology
from .strata import (
    Circle,
    ClosedSurface,
    Graph,
    Points,
    Stratifold2,
    interval,
    is_interval,
    is_normal,
    surface_with_boundary_form,
)

NAMED_KINDS = (
    "Torus",
    "PrincipalBundleOverCircle",
    "PrincipalBundleOverSurface",
    "CanonicalOverGraph",
    "CanonicalOverStratifold",
    "Sphere3",
    "S2xS1",
    "LensSpaceOrder",
    "QuasitoricCP1",
    "MomentAngleS3",
    "Componentwise",
)


@dataclass(frozen=True)
class BaseShape:
    """What is known about every datum over one shape of orbit space."""

    l: int
    n: int
    base: str
    manifold_base: str

    def family(self, m: int) -> str:
        if self.l + self.n == 0:
            return f"T^{m}"
        if self.n == 0:
            bundle = f"principal T^{m}-bundle"
            # H^2 of the circle vanishes, so the bundle is trivial
            return f"{bundle} ~= S^1 x T^{m}" if self.l == 1 else bundle
        return f"over {self.base}"

    def functor(self, m: int) -> str:
        if self.n == 0:
            return "{1}"
        return "{1,T}" if m == self.n else "lambda"

    def chern(self) -> str:
        # only closed surfaces have room for a nonzero class; over graphs and
        # 2-stratifolds the class is forced to vanish
        return "c" if self.l == 2 and self.n == 0 else "0"

    def data(self, m: int) -> str:
        return f"({self.base}, {self.functor(m)}, {self.chern()})"


SHAPES = {
    (0, 0): BaseShape(0, 0, "{*}", "{*}"),
    (1, 0): BaseShape(1, 0, "S^1", "S^1"),
    (2, 0): BaseShape(2, 0, "closed surface", "closed surface"),
    (0, 1): BaseShape(0, 1, "graph", "interval"),
    (1, 1): BaseShape(1, 1, "2-stratifold", "compact surface with boundary"),
}


def _count(k, one: str, many: str) -> str:
    return f"{k} {one if k == 1 else many}"


@dataclass(frozen=True)
class NamedType:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in NAMED_KINDS:
            raise ValueError(f"unknown named type {self.kind!r}")

    def __str__(self) -> str:
        p = self.params
        return {
            "Torus": lambda: f"torus T^{p.get('m')}",
            "PrincipalBundleOverCircle": lambda: f"S^1 x T^{p.get('m')} (trivial principal bundle over S^1)",
            "PrincipalBundleOverSurface": lambda: (
                f"principal T^{p.get('m')}-bundle over the {p.get('surface')} with Chern class {p.get('chern')}"
            ),
            "CanonicalOverGraph": lambda: (
                f"canonical model over a graph with {_count(p.get('vertices'), 'vertex', 'vertices')}"
                f" and {_count(p.get('edges'), 'edge', 'edges')}"
            ),
            "CanonicalOverStratifold": lambda: (
                f"canonical model over a {p['surface']}" if "surface" in p
                else f"canonical model over a 2-stratifold with {_count(p.get('circles'), 'circle', 'circles')}"
                f" and {_count(p.get('pieces'), 'piece', 'pieces')}"
            ),
            "Sphere3": lambda: "S^3",
            "S2xS1": lambda: "S^2 x S^1",
            "LensSpaceOrder": lambda: f"lens space, order {p.get('k')}",
            "QuasitoricCP1": lambda: "quasitoric manifold CP^1",
            "MomentAngleS3": lambda: "moment-angle manifold S^3",
            "Componentwise": lambda: f"disjoint union of {p.get('count')} components",
        }[self.kind]()


@dataclass(frozen=True)
class ClassificationResult:
    lmn: tuple[int, int, int]
    named_type: NamedType
    is_manifold: bool
    manifold_reason: str
    family: str
    homology: Optional[HomologyProfile] = None
    tags: tuple[str, ...] = ()
    components: tuple["ClassificationResult", ...] = ()


def _shape(d: CharacteristicData) -> BaseShape:
    l, _, n = d.lmn
    return SHAPES[(l, n)]


def is_manifold(d: CharacteristicData) -> tuple[bool, str]:
    """Whether the total space is a topological manifold, with the reason."""
    l, m, n = d.lmn
    if n == 0:
        return True, f"principal T^{m}-bundle over a manifold"
    report = is_normal(d.q)
    if not report:
        worst = ", ".join(f"{s} ({report.link_sizes[s]} link points)" for s in report.offenders())
        return False, f"not normal at {worst}; total space is not a topological manifold"
    return True, f"normal orbit space: each component is a {_shape(d).manifold_base}"


def _standard_moment_angle() -> CharacteristicData:
    return make_data(interval(), 2, {"v0": [(1, 0)], "v1": [(0, 1)]})


def classify(d: CharacteristicData) -> ClassificationResult:
    l, m, n = d.lmn
    shape = _shape(d)
    manifold, reason = is_manifold(d)
    q = d.q
    hom = homology(build_canonical_complex(d)) if isinstance(q, Graph) else None

    parts = components(d)
    if len(parts) > 1:
        subs = tuple(classify(p) for p in parts)
        return ClassificationResult(
            d.lmn, NamedType("Componentwise", {"count": len(subs)}), manifold, reason,
            shape.family(m), hom, components=subs,
        )

    tags: tuple[str, ...] = ()
    if isinstance(q, Points):
        named = NamedType("Torus", {"m": m})
    elif isinstance(q, Circle):
        named = NamedType("PrincipalBundleOverCircle", {"m": m})
    elif isinstance(q, ClosedSurface):
        kind = "orientable" if q.orientable else "non-orientable"
        named = NamedType(
            "PrincipalBundleOverSurface",
            {"m": m, "surface": f"{kind} closed surface of genus {q.genus}", "chern": str(d.c)},
        )
    elif isinstance(q, Graph):
        if is_interval(q) and m == 1:
            named = NamedType("QuasitoricCP1")
        elif is_interval(q):
            v0, v1 = (d.lam[v].direction for v in q.vertices)
            k = abs(det2(v0, v1))
            if k == 1:
                named = NamedType("Sphere3")
                if decide_iso(d, _standard_moment_angle(), weak=True).isomorphic:
                    tags = ("MomentAngleS3",)
            elif k == 0:
                named = NamedType("S2xS1")
            else:
                named = NamedType("LensSpaceOrder", {"k": k})
        else:
            named = NamedType("CanonicalOverGraph", {
                "vertices": len(q.vertices),
                "edges": len(q.edges),
                "loops": sum(e.is_loop for e in q.edges),
            })
    elif isinstance(q, Stratifold2):
        form = surface_with_boundary_form(q)
        if form is not None:
            named = NamedType("CanonicalOverStratifold", {
                "surface": str(form),
                "orientable": form.orientable,
                "genus": form.genus,
                "boundary_count": form.boundary_count,
            })
        else:
            named = NamedType("CanonicalOverStratifold", {
                "circles": len(q.circles),
                "pieces": len(q.pieces),
                "singular": is_normal(q).offenders(),
            })
    else:
        raise TypeError(f"not an orbit space: {q!r}")
    return ClassificationResult(d.lmn, named, manifold, reason, shape.family(m), hom, tags)


# --- tables ------------------------------------------------------------------

def _profile_cells(l: int, m: int, n: int) -> list[str]:
    return [str(l + m + n), str(l + n), str(l), str(m), str(n)]


def enumerate_tables() -> tuple[str, str, str]:
    """Render the profile, classification and manifold tables from the dispatch."""
    head = "dim X | dim Q | l | m | n"
    t1, t2, t3 = [head], [head + " | X | (Q, lambda, c)"], [head + " | orbit space"]
    for l, m, n in dimension_profiles():
        shape = SHAPES[(l, n)]
        cells = _profile_cells(l, m, n)
        t1.append(" | ".join(cells))
        t2.append(" | ".join(cells + [shape.family(m), shape.data(m)]))
        t3.append(" | ".join(cells + [shape.manifold_base]))
    return tuple("\n".join(t) + "\n" for t in (t1, t2, t3))
