"""Characteristic functors, Chern classes and assembled characteristic data."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

from .lattice import IntMatrix, PrimitiveSubtorus, subtorus_from_vectors
from .strata import (
    Circle,
    ClosedSurface,
    Graph,
    OrbitSpace,
    Points,
    Stratifold2,
    Violation,
    connected_components,
    is_interval,
    is_normal,
    strata_poset,
    top_dimension,
    validate_pseudomanifold,
)


class DataValidationError(ValueError):
    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


def dimension_profiles(max_dim: int = 3) -> list[tuple[int, int, int]]:
    """Every admissible ``(l, m, n)`` with total dimension at most ``max_dim``.

    Admissible means ``l >= 0``, ``m >= 1``, ``m >= n >= 0`` and an orbit
    space of dimension ``l + n <= 2``.  Ordered by total dimension, then orbit
    space dimension, then decreasing ``l``.
    """
    rows = []
    for dim_x in range(1, max_dim + 1):
        for dim_q in range(0, min(dim_x, 3)):
            for l in range(dim_q, -1, -1):
                n = dim_q - l
                m = dim_x - dim_q
                if m >= 1 and m >= n >= 0:
                    rows.append((l, m, n))
    return rows


# --- Chern classes -----------------------------------------------------------

@dataclass(frozen=True)
class ZeroGroup:
    """The class in a vanishing (or forced-zero) second cohomology group."""

    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True)
class FreeVector:
    """A class in ``H^2(Q; Z^m) = Z^m`` for a closed orientable surface."""

    coords: tuple[int, ...]

    def __str__(self) -> str:
        return "(" + ", ".join(map(str, self.coords)) + ")"


@dataclass(frozen=True)
class TorsionVector:
    """A class in ``H^2(Q; Z^m) = (Z/2)^m`` for a closed non-orientable surface."""

    bits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(b % 2 for b in self.bits))

    def __str__(self) -> str:
        return "(" + ", ".join(map(str, self.bits)) + ") mod 2"


ChernClass = Union[ZeroGroup, FreeVector, TorsionVector]


def default_chern(q: OrbitSpace, m: int) -> ChernClass:
    if isinstance(q, ClosedSurface):
        return FreeVector((0,) * m) if q.orientable else TorsionVector((0,) * m)
    return ZeroGroup()


def chern_violations(q: OrbitSpace, c: ChernClass, m: int) -> list[Violation]:
    expected = type(default_chern(q, m))
    if not isinstance(c, expected):
        return [Violation(
            "chern-variant",
            f"a {q.kind} base carries a {expected.__name__} Chern class, not {type(c).__name__}",
        )]
    size = len(c.coords) if isinstance(c, FreeVector) else len(c.bits) if isinstance(c, TorsionVector) else m
    if size != m:
        return [Violation("chern-length", f"Chern class has {size} coordinates, expected {m}")]
    return []


# --- characteristic functors -------------------------------------------------

@dataclass(frozen=True)
class CharacteristicFunctor:
    m: int
    assignment: Mapping[str, PrimitiveSubtorus] = field(default_factory=dict)

    def __getitem__(self, stratum: str) -> PrimitiveSubtorus:
        return self.assignment[stratum]

    def get(self, stratum: str) -> Optional[PrimitiveSubtorus]:
        return self.assignment.get(stratum)


def validate_functor(q: OrbitSpace, lam: CharacteristicFunctor) -> list[Violation]:
    """Codimension rule, monotonicity on the strata poset, and torus rank."""
    v: list[Violation] = []
    strata = {s.id: s for s in strata_poset(q)}
    top = top_dimension(q)
    for sid in lam.assignment:
        if sid not in strata:
            v.append(Violation("unknown-stratum", f"label on nonexistent stratum {sid!r}", sid))
    for sid, s in strata.items():
        t = lam.get(sid)
        if t is None:
            v.append(Violation("missing-label", f"stratum {sid} has no subtorus", sid))
            continue
        if t.ambient_rank != lam.m:
            v.append(Violation("m-consistency", f"label of {sid} lives in T^{t.ambient_rank}, not T^{lam.m}", sid))
            continue
        codim = top - s.dimension
        if t.rank != codim:
            v.append(Violation(
                "codimension-rule",
                f"codimension rule: {sid} has codimension {codim} but its subtorus has dimension {t.rank}",
                sid,
            ))
    for sid, s in strata.items():
        upper = lam.get(sid)
        for rid in s.closure_contains:
            lower = lam.get(rid)
            if upper is None or lower is None or upper.ambient_rank != lower.ambient_rank:
                continue
            if not lower.contains(upper):
                v.append(Violation(
                    "monotonicity",
                    f"{rid} lies in the closure of {sid} but its subtorus does not contain {sid}'s",
                    sid,
                ))
    return v


# --- characteristic data -----------------------------------------------------

@dataclass(frozen=True)
class CharacteristicData:
    q: OrbitSpace
    lam: CharacteristicFunctor
    c: ChernClass
    lmn: tuple[int, int, int]

    @property
    def m(self) -> int:
        return self.lmn[1]


def infer_lmn(q: OrbitSpace, m: int) -> tuple[int, int, int]:
    l, n = q.dims
    lmn = (l, m, n)
    if lmn not in dimension_profiles():
        raise DataValidationError([Violation("dimension-profile", f"unsupported dimension profile (l, m, n) = {lmn}")])
    return lmn


def make_data(
    q: OrbitSpace,
    m: int,
    labels: Optional[Mapping[str, Union[PrimitiveSubtorus, Iterable[Sequence[int]]]]] = None,
    chern: Optional[ChernClass] = None,
) -> CharacteristicData:
    """Assemble and validate characteristic data.

    Labels are subtori or lists of generators (saturated automatically).
    Unlabelled top strata get the trivial subgroup; unlabelled lower strata
    get the whole torus when that is the only subtorus of the right
    dimension, as for ``m = 1``.  Raises :class:`DataValidationError`.
    """
    lmn = infer_lmn(q, m)
    violations = validate_pseudomanifold(q)
    if violations:
        raise DataValidationError(violations)
    top = top_dimension(q)
    assignment: dict[str, PrimitiveSubtorus] = {}
    for sid, gens in (labels or {}).items():
        if isinstance(gens, PrimitiveSubtorus):
            assignment[sid] = gens
        else:
            gens = [tuple(g) for g in gens]
            bad = [g for g in gens if len(g) != m]
            if bad:
                raise DataValidationError([Violation(
                    "m-consistency", f"generator {bad[0]} of {sid} is not in Z^{m}", sid)])
            assignment[sid] = subtorus_from_vectors(gens, m)
    for s in strata_poset(q):
        if s.id in assignment:
            continue
        codim = top - s.dimension
        if codim == 0:
            assignment[s.id] = PrimitiveSubtorus.trivial(m)
        elif codim == m:
            assignment[s.id] = PrimitiveSubtorus.full(m)
    lam = CharacteristicFunctor(m, assignment)
    c = default_chern(q, m) if chern is None else chern
    violations = validate_functor(q, lam) + chern_violations(q, c, m)
    if violations:
        raise DataValidationError(violations)
    return CharacteristicData(q, lam, c, lmn)


def apply_automorphism(d: CharacteristicData, psi: IntMatrix) -> CharacteristicData:
    """Push ``d`` forward along the torus automorphism ``psi``."""
    if not psi.is_unimodular() or psi.rows != d.m:
        raise ValueError("psi must be a unimodular m x m matrix")
    lam = CharacteristicFunctor(d.m, {s: t.image(psi) for s, t in d.lam.assignment.items()})
    c = d.c
    if isinstance(c, FreeVector):
        c = FreeVector(psi @ c.coords)
    elif isinstance(c, TorsionVector):
        c = TorsionVector(psi @ c.bits)
    return CharacteristicData(d.q, lam, c, d.lmn)


def restrict(d: CharacteristicData, q: OrbitSpace) -> CharacteristicData:
    """Restrict ``d`` to a union of its components (e.g. from ``connected_components``)."""
    keep = {s.id for s in strata_poset(q)}
    lam = CharacteristicFunctor(d.m, {s: t for s, t in d.lam.assignment.items() if s in keep})
    return CharacteristicData(q, lam, d.c, d.lmn)


def components(d: CharacteristicData) -> list[CharacteristicData]:
    return [restrict(d, part) for part in connected_components(d.q)]


# --- side conditions ---------------------------------------------------------

def check_homotopy_equivalence_condition(q: OrbitSpace) -> tuple[bool, str]:
    """Whether the inclusion of the top strata into ``q`` is a homotopy equivalence."""
    if isinstance(q, (Points, Circle, ClosedSurface)):
        return True, "the top stratum is the whole space"
    if isinstance(q, Graph):
        parts = connected_components(q)
        if all(is_interval(p) for p in parts):
            return True, "every component is an interval, whose interior is also contractible"
        return False, "the open edges are contractible and miss the cycles or branching of the graph"
    if isinstance(q, Stratifold2):
        if is_normal(q):
            return True, "a surface with boundary deformation retracts onto its interior"
        return False, "gluing a piece's boundary to a circle with more than one sheet changes the homotopy type"
    raise TypeError(f"not an orbit space: {q!r}")


def check_condition_surjective(q: OrbitSpace, m: int) -> tuple[bool, str]:
    """Surjectivity of ``H^2(Q) -> H^2(interior of Q)`` for semi-trivial bases."""
    if isinstance(q, Graph):
        return True, "H^2 of a 1-complex vanishes"
    if isinstance(q, Stratifold2):
        return True, f"the interior is a non-compact surface, so H^2(interior; Z^{m}) = 0"
    raise ValueError(f"a {q.kind} base is not a semi-trivial base of length one")
