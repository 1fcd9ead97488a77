import random

import pytest

from generators import random_graph, random_space, random_stratifold
from torus_strata.strata import (
    Circle,
    ClosedSurface,
    Points,
    Stratifold2,
    StrataError,
    SurfacePiece,
    stratification_checks,
    connected_components,
    disk_stratifold,
    graph,
    interval,
    is_interval,
    is_normal,
    is_single_loop,
    link_of,
    loop,
    lower_strata,
    path_graph,
    strata_poset,
    stratifold,
    surface_with_boundary_form,
    top_dimension,
    validate_pseudomanifold,
)


def codes(q):
    return {v.code for v in validate_pseudomanifold(q)}


def test_interval_poset():
    poset = {s.id: s for s in strata_poset(interval())}
    assert poset["v0"].dimension == poset["v1"].dimension == 0
    assert set(poset["e0"].closure_contains) == {"v0", "v1"}
    assert [s.id for s in lower_strata(interval())] == ["v0", "v1"]


def test_links_on_graphs():
    assert link_of(interval(), "v0").component_count == 1
    # both ends of the loop land at v
    assert link_of(loop(), "v").component_count == 2
    star = graph(["o", "a", "b", "c"], [("o", "a"), ("o", "b"), ("o", "c")])
    assert link_of(star, "o").component_count == 3
    assert link_of(star, "e0").component_count == 0


def test_normality():
    assert is_normal(interval())
    assert not is_normal(path_graph(5))
    report = is_normal(loop())
    assert not report and report.offenders() == ["v"]
    assert is_normal(disk_stratifold())
    pinched = stratifold(["c"], [SurfacePiece("a", boundary=(("c", 1),)), SurfacePiece("b", boundary=(("c", 1),))])
    assert is_normal(pinched).link_sizes["c"] == 2
    wrapped = stratifold(["c"], [SurfacePiece("a", boundary=(("c", 2),))])
    assert not is_normal(wrapped)


def test_shape_predicates():
    assert is_interval(interval()) and not is_interval(loop())
    assert is_single_loop(loop()) and not is_single_loop(interval())
    assert top_dimension(ClosedSurface()) == 2 and top_dimension(Points()) == 0


def test_surface_form():
    annulus = stratifold(["a", "b"], [SurfacePiece("A", True, 0, (("a", 1), ("b", 1)))])
    form = surface_with_boundary_form(annulus)
    assert (form.orientable, form.genus, form.boundary_count) == (True, 0, 2)
    assert "2 boundary circles" in str(form)
    mobius = stratifold(["c"], [SurfacePiece("M", False, 1, (("c", 1),))])
    assert not surface_with_boundary_form(mobius).orientable
    pinched = stratifold(["c"], [SurfacePiece("a", boundary=(("c", 1),)), SurfacePiece("b", boundary=(("c", 1),))])
    assert surface_with_boundary_form(pinched) is None
    two_disks = stratifold(["c", "d"], [SurfacePiece("a", boundary=(("c", 1),)), SurfacePiece("b", boundary=(("d", 1),))])
    with pytest.raises(StrataError):
        surface_with_boundary_form(two_disks)
    with pytest.raises(TypeError):
        surface_with_boundary_form(interval())


def test_components():
    g = graph(["a", "b", "c", "d"], [("a", "b"), ("c", "d"), ("d", "d")])
    parts = connected_components(g)
    assert sorted(len(p.vertices) for p in parts) == [2, 2]
    assert connected_components(Points(3)) == [Points(1)] * 3
    two = stratifold(["c", "d"], [SurfacePiece("a", boundary=(("c", 1),)), SurfacePiece("b", boundary=(("d", 1),))])
    assert len(connected_components(two)) == 2


@pytest.mark.parametrize("q, code", [
    (Points(0), "empty-space"),
    (ClosedSurface(False, 0), "bad-genus"),
    (graph(["a", "b"], [("a", "b"), ("a", "x")]), "unknown-vertex"),
    (graph(["a", "b", "z"], [("a", "b")]), "density"),
    (graph(["a"], []), "no-top-stratum"),
    (graph(["a", "a"], [("a", "a")]), "duplicate-id"),
    (stratifold(["c"], []), "no-top-stratum"),
    (stratifold(["c", "d"], [SurfacePiece("p", boundary=(("c", 1),))]), "density"),
    (stratifold(["c"], [SurfacePiece("p", boundary=(("c", -1),))]), "bad-degree"),
    (stratifold(["c"], [SurfacePiece("p", boundary=(("x", 1),))]), "unknown-circle"),
])
def test_structural_violations(q, code):
    assert code in codes(q)


@pytest.mark.parametrize("q", [Points(2), Circle(), ClosedSurface(True, 3), interval(), loop(), disk_stratifold()])
def test_valid_examples(q):
    assert validate_pseudomanifold(q) == []


def test_random_spaces_satisfy_stratification_properties():
    rng = random.Random(11)
    for _ in range(200):
        q = random_space(rng)
        assert validate_pseudomanifold(q) == [], q
        assert stratification_checks(q) == [], q


def test_random_graphs_have_dense_top_strata():
    rng = random.Random(5)
    for _ in range(100):
        g = random_graph(rng, connected=False)
        assert all(g.degree(v) > 0 for v in g.vertices)
        s = random_stratifold(rng)
        assert isinstance(s, Stratifold2)
        assert all(s.attachments(c) for c in s.circles)
