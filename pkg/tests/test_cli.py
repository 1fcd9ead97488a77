import io
import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import random_primitive, random_space
from torus_strata.chardata import FreeVector, TorsionVector, default_chern
from torus_strata.cli import InputDocument, InputError, main, parse, serialize, to_data
from torus_strata.model import load_complex
from torus_strata.strata import ClosedSurface, Graph, strata_poset

FIXTURES = Path(__file__).parent / "fixtures"
BROKEN = sorted((FIXTURES / "broken").glob("*.toml"))


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(autouse=True)
def no_colour(monkeypatch):
    monkeypatch.setenv("TORUS_STRATA_COLOR", "0")


def test_classify_lens():
    code, out, _ = run("classify", FIXTURES / "lens_5.toml")
    assert code == 0
    assert out.splitlines()[0] == "lens space, order 5; manifold: yes"


def test_classify_json_is_stable():
    code, out, _ = run("classify", FIXTURES / "lens_5.toml", "--format", "json")
    record = json.loads(out)
    assert code == 0 and record["type"] == "LensSpaceOrder" and record["params"] == {"k": 5}
    assert out == json.dumps(record, sort_keys=True, indent=2) + "\n"
    assert record["homology"][1] == {"free_rank": 0, "torsion": [5]}


def test_batch_classify_keeps_order():
    files = [FIXTURES / "lens_5.toml", FIXTURES / "loop.toml", FIXTURES / "sphere3.toml"]
    code, out, _ = run("classify", *files)
    heads = [ln for ln in out.splitlines() if not ln.startswith(" ")]
    assert code == 0
    assert [h.split(": ")[0] for h in heads] == [str(f) for f in files]
    assert "manifold: no" in heads[1]


def test_weak_iso_prints_psi():
    code, out, _ = run("iso", FIXTURES / "lens_5.toml", FIXTURES / "lens_5_twisted.toml", "--weak")
    assert code == 0 and out.startswith("Isomorphic") and "psi = " in out
    code, out, _ = run("iso", FIXTURES / "lens_5.toml", FIXTURES / "lens_5_twisted.toml")
    assert code == 0 and out.startswith("NotIsomorphic")


def test_iso_json_certificate():
    code, out, _ = run("iso", FIXTURES / "lens_5.toml", FIXTURES / "lens_3.toml", "--weak", "--format", "json")
    record = json.loads(out)
    assert record["verdict"] == "NotIsomorphic"
    assert record["certificate"]["invariant"] == "det multiset"


def test_unknown_verdict_exit_code(tmp_path):
    other = tmp_path / "renamed.toml"
    other.write_text((FIXTURES / "pinched_stratifold.toml").read_text()
                     .replace('"c"', '"k"').replace('"upper"', '"top"'))
    code, out, _ = run("iso", FIXTURES / "pinched_stratifold.toml", other)
    assert code == 3 and out.startswith("Unknown")


def test_validate_loop_warns():
    code, out, _ = run("validate", FIXTURES / "loop.toml")
    assert code == 0
    assert "warning: not normal; total space is not a topological manifold" in out


def test_nonprimitive_label_is_accepted_with_note():
    code, out, _ = run("validate", FIXTURES / "cp1_nonprimitive.toml")
    assert code == 0 and "note: labels.v0[0]: [2] is not primitive; using [1]" in out
    doc = parse((FIXTURES / "cp1_nonprimitive.toml").read_text())
    assert doc.labels["v0"] == [(1,)]


@pytest.mark.parametrize("path", BROKEN, ids=lambda p: p.stem)
def test_broken_fixtures_name_their_violation(path):
    code, out, err = run("validate", path)
    assert code == 2
    assert f": {path.stem}: " in err
    assert "Traceback" not in err
    first = err.splitlines()[0]
    assert first.startswith("error: ") and first.split(": ")[1].split(".")[0] in ("space", "labels", "chern")


def test_validate_json_errors():
    code, out, _ = run("validate", FIXTURES / "broken" / "missing-label.toml", "--format", "json")
    record = json.loads(out)
    assert code == 2 and record["valid"] is False
    assert record["errors"][0] == {"code": "missing-label", "message": "stratum v1 has no subtorus", "path": "labels.v1"}


@pytest.mark.parametrize("text, path", [
    ("[space\n", "<document>"),
    ("[torus]\nrank = 1\n", "space"),
    ('[space]\ntype = "torus"\n[torus]\nrank = 1\n', "space.type"),
    ('[space]\ntype = "loop"\n', "torus"),
    ('[space]\ntype = "loop"\n[torus]\nrank = "one"\n', "torus.rank"),
    ('[space]\ntype = "loop"\n[torus]\nrank = 1\n[labels]\nw = [[1]]\n', "labels.w"),
    ('[space]\ntype = "interval"\n[torus]\nrank = 2\n[labels]\nv0 = [[1, 0, 0]]\n', "labels.v0[0]"),
    ('[space]\ntype = "graph"\nvertices = ["a"]\nedges = [["a"]]\n[torus]\nrank = 1\n', "space.edges[0]"),
    ('[space]\ntype = "stratifold"\ncircles = ["c"]\n[[space.pieces]]\nname = "p"\nboundary = [[1, "c"]]\n'
     '[torus]\nrank = 1\n', "space.pieces[0].boundary[0]"),
    ('[space]\ntype = "surface"\n[torus]\nrank = 1\n[chern]\nfree = [1]\ntorsion = [1]\n', "chern"),
])
def test_parse_errors_carry_field_paths(text, path):
    with pytest.raises(InputError) as info:
        parse(text)
    assert info.value.path == path


def test_cli_reports_parse_errors_without_traceback(tmp_path):
    f = tmp_path / "bad.toml"
    f.write_text('[space]\ntype = "torus"\n[torus]\nrank = 1\n')
    code, _, err = run("validate", f)
    assert code == 2 and err.startswith("error: space.type: unknown variant")
    code, _, err = run("classify", tmp_path / "missing.toml")
    assert code == 2 and "missing.toml" in err


def test_usage_errors():
    assert run()[0] == 1
    assert run("frobnicate")[0] == 1
    assert run("iso", FIXTURES / "loop.toml")[0] == 1


def test_homology_and_dump(tmp_path):
    dump = tmp_path / "lens.cx"
    code, out, _ = run("homology", FIXTURES / "lens_5.toml", "--dump-complex", dump)
    assert code == 0 and out.splitlines() == ["H_0 = Z", "H_1 = Z/5", "H_2 = 0", "H_3 = Z"]
    c = load_complex(dump.read_text())
    assert c.dims == (2, 3, 2, 1)
    code, _, err = run("homology", FIXTURES / "bundle_over_torus.toml")
    assert code == 1 and "graphs" in err


def test_tables_command():
    code, out, _ = run("tables")
    golden = "".join((FIXTURES.parent / "golden" / f"table{i}.txt").read_text() for i in (1, 2, 3))
    assert code == 0 and out.replace("\n\n", "\n") == golden
    code, out, _ = run("tables", "--format", "json")
    assert len(json.loads(out)["table3"]) == 10


def test_colour_switch(monkeypatch):
    monkeypatch.setenv("TORUS_STRATA_COLOR", "1")
    _, out, _ = run("classify", FIXTURES / "sphere3.toml")
    assert "\033[32myes\033[0m" in out
    monkeypatch.setenv("TORUS_STRATA_COLOR", "0")
    _, out, _ = run("classify", FIXTURES / "sphere3.toml")
    assert "\033" not in out


def random_document(rng):
    q = random_space(rng)
    if isinstance(q, Graph) and rng.random() < 0.5:
        m = 2
        labels = {v: [random_primitive(rng)] for v in q.vertices}
    else:
        m = 1
        labels = {}
    l, n = q.dims
    if l + m + n > 3:
        m = 1
    chern = None
    if isinstance(q, ClosedSurface):
        chern = FreeVector((rng.randint(-9, 9),)) if q.orientable else TorsionVector((rng.randint(0, 1),))
    return InputDocument(q, m, labels, chern)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_serialize_round_trip(seed):
    doc = random_document(random.Random(seed))
    again = parse(serialize(doc))
    assert again == doc
    assert parse(serialize(again)) == again
    d = to_data(again)
    assert {s.id for s in strata_poset(d.q)} == set(d.lam.assignment)
    assert type(d.c) is type(default_chern(d.q, d.m))
