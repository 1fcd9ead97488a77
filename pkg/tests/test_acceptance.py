"""Acceptance suite: one test per criterion, each summarised as a PASS/FAIL line."""
import io
import random
import time
from math import gcd
from pathlib import Path

import pytest

from generators import (
    random_graph_data,
    random_primitive,
    random_space,
    random_unimodular,
    rational_betti,
    read_facets,
    relabel_graph_data,
    simplicial_boundaries,
)
from torus_strata.chardata import DataValidationError, apply_automorphism, dimension_profiles, make_data
from torus_strata.classify import SHAPES, classify, enumerate_tables
from torus_strata.cli import load, main
from torus_strata.iso import VerdictKind, decide_iso, verify_witness
from torus_strata.lattice import IntMatrix
from torus_strata.model import (
    ChainComplex,
    HomologyProfile,
    build_canonical_complex,
    homology,
    interval_closed_form,
)
from torus_strata.strata import (
    Circle,
    ClosedSurface,
    Graph,
    Points,
    stratification_checks,
    interval,
    is_normal,
    loop,
    validate_pseudomanifold,
)

HERE = Path(__file__).parent
FIXTURES = HERE / "fixtures"


def interval_data(v, w):
    return make_data(interval(), 2, {"v0": [v], "v1": [w]})


def lens_pair(rng, k_max=60):
    while True:
        k = rng.randint(2, k_max)
        q = rng.randint(-3 * k, 3 * k)
        if gcd(q, k) == 1:
            return q, k


@pytest.mark.criterion(1, "tables reproduce the three classification tables")
def test_tables(monkeypatch):
    monkeypatch.setenv("TORUS_STRATA_COLOR", "0")
    start = time.perf_counter()
    out = io.StringIO()
    assert main(["tables"], out, io.StringIO()) == 0
    elapsed = time.perf_counter() - start
    tables = enumerate_tables()
    for i, table in enumerate(tables, 1):
        golden = (HERE / "golden" / f"table{i}.txt").read_text()
        assert table == golden
        assert len(golden.splitlines()) == 10
    assert out.getvalue() == "\n".join(tables)
    assert elapsed < 0.1


@pytest.mark.criterion(2, "interval trichotomy")
def test_interval_trichotomy():
    rng = random.Random(2024)
    start = time.perf_counter()
    s3 = classify(interval_data((1, 0), (0, 1)))
    assert s3.named_type.kind == "Sphere3"
    assert s3.homology == HomologyProfile.from_groups(1, 0, 0, 1) == interval_closed_form((1, 0), (0, 1))
    s2s1 = classify(interval_data((1, 0), (1, 0)))
    assert s2s1.named_type.kind == "S2xS1"
    assert s2s1.homology == HomologyProfile.from_groups(1, 1, 1, 1) == interval_closed_form((1, 0), (1, 0))
    for _ in range(20):
        q, k = lens_pair(rng)
        r = classify(interval_data((1, 0), (q, k)))
        assert r.named_type.kind == "LensSpaceOrder" and r.named_type.params["k"] == k
        assert r.homology[1].free_rank == 0 and r.homology[1].torsion == (k,)
        assert r.homology == interval_closed_form((1, 0), (q, k))
    assert time.perf_counter() - start < 1.0


@pytest.mark.criterion(3, "chain-complex homology equals the closed form on 200 pairs")
def test_oracle_equivalence():
    rng = random.Random(7)
    start = time.perf_counter()
    torsion_seen = 0
    for i in range(200):
        bound = 6 if i % 2 else 400
        v, w = random_primitive(rng, bound), random_primitive(rng, bound)
        h = homology(build_canonical_complex(interval_data(v, w)))
        assert h == interval_closed_form(v, w), (v, w)
        torsion_seen += bool(h[1].torsion)
    assert torsion_seen > 100
    assert time.perf_counter() - start < 10.0


@pytest.mark.criterion(4, "pinched torus against a simplicial wedge of a sphere and a circle")
def test_pinched_torus():
    model = homology(build_canonical_complex(make_data(loop(), 1)))
    assert model == HomologyProfile.from_groups(1, 1, 1)
    facets = read_facets(FIXTURES / "wedge_s2_s1.txt")
    cells, mats = simplicial_boundaries(facets)
    dims = tuple(len(c) for c in cells)
    wedge = ChainComplex(dims, tuple(
        [IntMatrix.zeros(0, dims[0])] + [IntMatrix.from_rows(m, dims[k]) for k, m in enumerate(mats) if k]
    ))
    assert homology(wedge) == model
    assert rational_betti(dims, mats) == model.betti


@pytest.mark.criterion(5, "weak isomorphism is invariant under torus automorphisms and relabelling")
def test_weak_iso_invariance():
    rng = random.Random(99)
    start = time.perf_counter()
    for _ in range(100):
        d = random_graph_data(rng, 8)
        psi = random_unimodular(rng, 2, 10)
        e = relabel_graph_data(rng, apply_automorphism(d, psi))
        v = decide_iso(d, e, weak=True)
        assert v.kind is VerdictKind.ISOMORPHIC
        assert verify_witness(d, e, v.witness, weak=True)
        assert homology(build_canonical_complex(d)) == homology(build_canonical_complex(e))
    assert time.perf_counter() - start < 30.0


@pytest.mark.criterion(6, "negative suite: lens orders separated, strict rejects twists")
def test_negative_suite():
    v = decide_iso(interval_data((1, 0), (1, 2)), interval_data((1, 0), (1, 3)), weak=True)
    assert v.kind is VerdictKind.NOT_ISOMORPHIC and v.certificate is not None
    assert v.certificate.invariant == "det multiset"
    rng = random.Random(5)
    twisted = 0
    for _ in range(30):
        d = random_graph_data(rng, 5)
        psi = random_unimodular(rng, 2, 10)
        e = apply_automorphism(d, psi)
        assert decide_iso(d, e, weak=True).isomorphic
        strict = decide_iso(d, e)
        if not strict.isomorphic:
            twisted += 1
            assert strict.certificate is not None
        else:
            assert verify_witness(d, e, strict.witness, weak=False)
    assert twisted > 20
    fixed = interval_data((2, 5), (1, 0))
    shear = apply_automorphism(fixed, IntMatrix.from_rows([[1, 1], [0, 1]]))
    assert decide_iso(fixed, shear, weak=True).isomorphic
    assert decide_iso(fixed, shear).kind is VerdictKind.NOT_ISOMORPHIC


@pytest.mark.criterion(7, "manifold detection matches normality")
def test_manifold_detection():
    assert not classify(make_data(loop(), 1)).is_manifold
    assert classify(make_data(interval(), 1)).is_manifold
    assert classify(interval_data((1, 0), (2, 3))).is_manifold
    normal = sorted(FIXTURES.glob("normal_*.toml"))
    assert len(normal) >= 4
    for path in normal:
        _, d = load(str(path))
        r = classify(d)
        assert r.is_manifold and "boundary circle" in r.named_type.params["surface"], path
    for name in ("pinched_stratifold.toml", "wrapped_stratifold.toml"):
        _, d = load(str(FIXTURES / name))
        assert not classify(d).is_manifold
    # one manifold per table row, over the orbit space that row names
    bases = {
        (0, 0): Points(), (1, 0): Circle(), (2, 0): ClosedSurface(False, 2),
        (0, 1): interval(), (1, 1): load(str(normal[0]))[1].q,
    }
    for l, m, n in dimension_profiles():
        q = bases[(l, n)]
        labels = {"v0": [(1, 0)], "v1": [(0, 1)]} if isinstance(q, Graph) and m == 2 else None
        r = classify(make_data(q, m, labels))
        assert r.is_manifold, (l, m, n)
        if n:
            assert r.manifold_reason.endswith(SHAPES[(l, n)].manifold_base)
    # random bases: manifold exactly when normal
    rng = random.Random(17)
    for _ in range(60):
        q = random_space(rng)
        d = make_data(q, 1)
        assert classify(d).is_manifold == (q.dims[1] == 0 or bool(is_normal(q)))


@pytest.mark.criterion(8, "validator: stratification properties on random spaces, named violations on broken fixtures")
def test_validator_suite():
    rng = random.Random(8)
    for _ in range(50):
        q = random_space(rng)
        assert validate_pseudomanifold(q) == [] and stratification_checks(q) == [], q
    broken = sorted((FIXTURES / "broken").glob("*.toml"))
    assert len(broken) == 10
    for path in broken:
        with pytest.raises(DataValidationError) as info:
            load(str(path))
        assert path.stem in {v.code for v in info.value.violations}, path


@pytest.mark.criterion(9, "boundary squares to zero and Euler characteristics agree")
def test_complexes_are_consistent():
    corpus = []
    for path in sorted(FIXTURES.glob("*.toml")):
        _, d = load(str(path))
        if isinstance(d.q, Graph):
            corpus.append(d)
    rng = random.Random(9)
    corpus += [random_graph_data(rng, 8, connected=rng.random() < 0.7) for _ in range(60)]
    corpus += [make_data(loop(), 1), make_data(interval(), 1)]
    for d in corpus:
        c = build_canonical_complex(d)
        for k in range(2, len(c.dims)):
            assert (c.boundaries[k - 1] @ c.boundaries[k]).is_zero()
        h = homology(c)
        assert c.euler_characteristic() == h.euler_characteristic()
        if d.m == 2 and bool(is_normal(d.q)):
            # closed orientable 3-manifolds have vanishing Euler characteristic
            assert c.euler_characteristic() == 0
