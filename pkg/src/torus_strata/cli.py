"""Command-line front end.

Input is one TOML document per datum::

    [space]
    type = "interval"            # points | circle | surface | interval | loop | graph | stratifold

    [torus]
    rank = 2

    [labels]                     # stratum -> generators of its subtorus
    v0 = [[1, 0]]
    v1 = [[3, 5]]

    [chern]                      # closed surfaces only
    free = [4]                   # or: torsion = [1]

Per space type the extra ``[space]`` keys are: ``count`` (points);
``orientable``, ``genus`` (surface); ``vertices`` (interval, two names);
``vertex`` (loop); ``vertices``, ``edges`` as ``[u, v]`` or ``[u, v, name]``
(graph); ``circles`` and ``[[space.pieces]]`` tables with ``name``,
``orientable``, ``genus`` and ``boundary = [[circle, degree], ...]``
(stratifold).
"""
from __future__ import annotations

import argparse
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import tomli
import tomli_w

from .chardata import (
    CharacteristicData,
    ChernClass,
    DataValidationError,
    FreeVector,
    TorsionVector,
    check_homotopy_equivalence_condition,
    make_data,
)
from .classify import ClassificationResult, classify, enumerate_tables
from .iso import IsoVerdict, VerdictKind, decide_iso
from .lattice import is_primitive, primitivize
from .model import ComplexError, HomologyProfile, build_canonical_complex, dump_complex, homology
from .strata import (
    Circle,
    ClosedSurface,
    Graph,
    OrbitSpace,
    Points,
    Stratifold2,
    SurfacePiece,
    Violation,
    graph,
    is_normal,
    strata_poset,
)

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_UNKNOWN = 0, 1, 2, 3
SPACE_TYPES = ("points", "circle", "surface", "interval", "loop", "graph", "stratifold")


class InputError(ValueError):
    """A user error tied to a field path such as ``labels.v0[1]``."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass
class InputDocument:
    space: OrbitSpace
    m: int
    labels: dict[str, list[tuple[int, ...]]]
    chern: Optional[ChernClass] = None
    notes: list[str] = field(default_factory=list, compare=False)


# --- parsing -----------------------------------------------------------------

def _get(table: dict, key: str, path: str, kind, default: Any = ...) -> Any:
    if key not in table:
        if default is ...:
            raise InputError(f"{path}.{key}", "missing required field")
        return default
    value = table[key]
    # bool is an int subclass; keep the two apart
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise InputError(f"{path}.{key}", f"expected an integer, got {value!r}")
    if kind is not int and not isinstance(value, kind):
        raise InputError(f"{path}.{key}", f"expected {kind.__name__}, got {value!r}")
    return value


def _names(values: list, path: str) -> list[str]:
    for i, v in enumerate(values):
        if not isinstance(v, str) or not v:
            raise InputError(f"{path}[{i}]", f"expected a non-empty name, got {v!r}")
    return values


def _int_vector(value: Any, path: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        raise InputError(path, f"expected a list of integers, got {value!r}")
    return tuple(value)


def _parse_space(table: Any) -> OrbitSpace:
    if not isinstance(table, dict):
        raise InputError("space", "missing [space] section")
    kind = _get(table, "type", "space", str)
    if kind not in SPACE_TYPES:
        raise InputError("space.type", f"unknown variant {kind!r}; expected one of {', '.join(SPACE_TYPES)}")
    if kind == "points":
        count = _get(table, "count", "space", int, 1)
        if count < 1:
            raise InputError("space.count", "need at least one point")
        return Points(count)
    if kind == "circle":
        return Circle()
    if kind == "surface":
        return ClosedSurface(_get(table, "orientable", "space", bool, True), _get(table, "genus", "space", int, 0))
    if kind == "interval":
        ends = _names(_get(table, "vertices", "space", list, ["v0", "v1"]), "space.vertices")
        if len(ends) != 2 or ends[0] == ends[1]:
            raise InputError("space.vertices", "an interval has exactly two distinct end points")
        a, b = ends
        return graph([a, b], [(a, b)])
    if kind == "loop":
        v = _get(table, "vertex", "space", str, "v")
        return graph([v], [(v, v)])
    if kind == "graph":
        vertices = _names(_get(table, "vertices", "space", list), "space.vertices")
        edges = []
        for i, e in enumerate(_get(table, "edges", "space", list)):
            if not isinstance(e, list) or len(e) not in (2, 3):
                raise InputError(f"space.edges[{i}]", "expected [u, v] or [u, v, name]")
            edges.append(tuple(_names(e, f"space.edges[{i}]")))
        return graph(vertices, edges)
    circles = _names(_get(table, "circles", "space", list), "space.circles")
    pieces = []
    for i, p in enumerate(_get(table, "pieces", "space", list)):
        path = f"space.pieces[{i}]"
        if not isinstance(p, dict):
            raise InputError(path, "expected a table")
        boundary = []
        for j, b in enumerate(_get(p, "boundary", path, list, [])):
            if not (isinstance(b, list) and len(b) == 2 and isinstance(b[0], str) and isinstance(b[1], int)):
                raise InputError(f"{path}.boundary[{j}]", "expected [circle, degree]")
            boundary.append((b[0], b[1]))
        pieces.append(SurfacePiece(
            _get(p, "name", path, str),
            _get(p, "orientable", path, bool, True),
            _get(p, "genus", path, int, 0),
            tuple(boundary),
        ))
    return Stratifold2(tuple(circles), tuple(pieces))


def parse(text: str) -> InputDocument:
    """Parse a TOML document; errors carry the offending field path."""
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise InputError("<document>", f"syntax error: {exc}") from None
    space = _parse_space(raw.get("space"))
    torus = raw.get("torus")
    if not isinstance(torus, dict):
        raise InputError("torus", "missing [torus] section")
    m = _get(torus, "rank", "torus", int)
    if m < 1:
        raise InputError("torus.rank", "the torus rank must be positive")

    known = {s.id for s in strata_poset(space)}
    labels: dict[str, list[tuple[int, ...]]] = {}
    notes: list[str] = []
    raw_labels = raw.get("labels", {})
    if not isinstance(raw_labels, dict):
        raise InputError("labels", "expected a table")
    for sid, gens in raw_labels.items():
        path = f"labels.{sid}"
        if sid not in known:
            raise InputError(path, f"label on nonexistent stratum {sid!r}")
        if not isinstance(gens, list):
            raise InputError(path, "expected a list of integer vectors")
        vecs = []
        for i, g in enumerate(gens):
            vec = _int_vector(g, f"{path}[{i}]")
            if len(vec) != m:
                raise InputError(f"{path}[{i}]", f"rank mismatch: vector of length {len(vec)} in Z^{m}")
            if any(vec) and not is_primitive(vec):
                fixed = primitivize(vec)
                notes.append(f"{path}[{i}]: {list(vec)} is not primitive; using {list(fixed)}")
                vec = fixed
            vecs.append(vec)
        labels[sid] = vecs

    chern: Optional[ChernClass] = None
    if "chern" in raw:
        table = raw["chern"]
        if not isinstance(table, dict) or len(table) != 1 or not ({"free", "torsion"} & table.keys()):
            raise InputError("chern", "expected exactly one of 'free' or 'torsion'")
        if "free" in table:
            chern = FreeVector(_int_vector(table["free"], "chern.free"))
        else:
            chern = TorsionVector(_int_vector(table["torsion"], "chern.torsion"))
    return InputDocument(space, m, labels, chern, notes)


def serialize(doc: InputDocument) -> str:
    q = doc.space
    space: dict[str, Any]
    if isinstance(q, Points):
        space = {"type": "points", "count": q.count}
    elif isinstance(q, Circle):
        space = {"type": "circle"}
    elif isinstance(q, ClosedSurface):
        space = {"type": "surface", "orientable": q.orientable, "genus": q.genus}
    elif isinstance(q, Graph):
        space = {
            "type": "graph",
            "vertices": list(q.vertices),
            "edges": [[e.u, e.v, e.name] for e in q.edges],
        }
    else:
        space = {
            "type": "stratifold",
            "circles": list(q.circles),
            "pieces": [
                {"name": p.name, "orientable": p.orientable, "genus": p.genus,
                 "boundary": [[c, d] for c, d in p.boundary]}
                for p in q.pieces
            ],
        }
    out: dict[str, Any] = {
        "space": space,
        "torus": {"rank": doc.m},
        "labels": {sid: [list(v) for v in gens] for sid, gens in doc.labels.items()},
    }
    if isinstance(doc.chern, FreeVector):
        out["chern"] = {"free": list(doc.chern.coords)}
    elif isinstance(doc.chern, TorsionVector):
        out["chern"] = {"torsion": list(doc.chern.bits)}
    return tomli_w.dumps(out)


def _violation_path(v: Violation, q: Optional[OrbitSpace] = None) -> str:
    if v.code.startswith("chern"):
        return "chern"
    if v.code in ("missing-label", "m-consistency", "codimension-rule", "monotonicity", "unknown-stratum"):
        return f"labels.{v.location}" if v.location else "labels"
    if v.code == "dimension-profile":
        return "torus.rank"
    if not v.location:
        return "space"
    if isinstance(q, Graph):
        group = "edges" if v.location in {e.name for e in q.edges} else "vertices"
    elif isinstance(q, Stratifold2):
        group = "pieces" if v.location in {p.name for p in q.pieces} else "circles"
    else:
        return "space"
    return f"space.{group}.{v.location}"


def to_data(doc: InputDocument) -> CharacteristicData:
    return make_data(doc.space, doc.m, doc.labels, doc.chern)


def load(path: str) -> tuple[InputDocument, CharacteristicData]:
    """Read and validate one file; raises InputError or DataValidationError."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(path, exc.strerror or str(exc)) from None
    doc = parse(text)
    try:
        return doc, to_data(doc)
    except DataValidationError as exc:
        exc.space = doc.space
        raise


# --- reports -----------------------------------------------------------------

class Style:
    def __init__(self, enabled: bool):
        self.enabled = enabled

    def __call__(self, text: str, code: str) -> str:
        return f"\033[{code}m{text}\033[0m" if self.enabled else text

    def good(self, text: str) -> str:
        return self(text, "32")

    def bad(self, text: str) -> str:
        return self(text, "31")

    def warn(self, text: str) -> str:
        return self(text, "33")


def _style(stream) -> Style:
    env = os.environ.get("TORUS_STRATA_COLOR")
    if env in ("0", "1"):
        return Style(env == "1")
    return Style(hasattr(stream, "isatty") and stream.isatty())


def homology_record(h: HomologyProfile) -> list[dict]:
    return [{"free_rank": g.free_rank, "torsion": list(g.torsion)} for g in h.degrees]


def classification_record(r: ClassificationResult) -> dict:
    return {
        "lmn": list(r.lmn),
        "type": r.named_type.kind,
        "params": {k: (list(v) if isinstance(v, (list, tuple)) else v) for k, v in r.named_type.params.items()},
        "description": str(r.named_type),
        "family": r.family,
        "manifold": r.is_manifold,
        "manifold_reason": r.manifold_reason,
        "tags": list(r.tags),
        "homology": homology_record(r.homology) if r.homology is not None else None,
        "components": [classification_record(c) for c in r.components],
    }


def verdict_record(v: IsoVerdict) -> dict:
    out: dict[str, Any] = {"verdict": v.kind.value, "reason": v.reason}
    if v.witness is not None:
        out["witness"] = {
            "stratum_map": dict(v.witness.stratum_map),
            "psi": v.witness.psi.tolist(),
            "chern_sign": v.witness.chern_sign,
        }
    if v.certificate is not None:
        out["certificate"] = {
            "invariant": v.certificate.invariant,
            "first": _plain(v.certificate.first),
            "second": _plain(v.certificate.second),
        }
    return out


def _plain(x: Any) -> Any:
    if isinstance(x, (list, tuple)):
        return [_plain(y) for y in x]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    return str(x)


def _emit_json(obj: Any, out) -> None:
    out.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _manifold_line(r: ClassificationResult, style: Style) -> str:
    return f"{r.named_type}; manifold: " + (style.good("yes") if r.is_manifold else style.bad("no"))


def _classify_text(r: ClassificationResult, style: Style, indent: str = "") -> list[str]:
    lines = [indent + _manifold_line(r, style)]
    lines.append(f"{indent}  profile (l, m, n) = {tuple(r.lmn)}; {r.family}")
    if not r.is_manifold:
        lines.append(f"{indent}  {r.manifold_reason}")
    if r.homology is not None:
        lines.append(f"{indent}  homology: {r.homology}")
    if r.tags:
        lines.append(f"{indent}  also: {', '.join(r.tags)}")
    for c in r.components:
        lines.extend(_classify_text(c, style, indent + "  "))
    return lines


# --- commands ----------------------------------------------------------------

def _report_error(exc: Exception, err, style: Style) -> int:
    if isinstance(exc, InputError):
        err.write(style.bad("error") + f": {exc}\n")
        return EXIT_INVALID
    assert isinstance(exc, DataValidationError)
    for v in exc.violations:
        err.write(style.bad("error") + f": {_violation_path(v, getattr(exc, 'space', None))}: {v.code}: {v.message}\n")
    return EXIT_INVALID


def cmd_validate(args, out, err, style) -> int:
    try:
        doc, d = load(args.file)
    except (InputError, DataValidationError) as exc:
        if args.format == "json":
            violations = exc.violations if isinstance(exc, DataValidationError) else [
                Violation("input", str(exc).split(": ", 1)[-1], exc.path)]
            _emit_json({"valid": False, "errors": [
                {"code": v.code, "message": v.message,
                 "path": exc.path if isinstance(exc, InputError) else _violation_path(v, getattr(exc, "space", None))}
                for v in violations
            ]}, out)
            return EXIT_INVALID
        return _report_error(exc, err, style)
    warnings = []
    if d.lmn[2] and not is_normal(d.q):
        warnings.append("not normal; total space is not a topological manifold")
    ok, why = check_homotopy_equivalence_condition(d.q)
    if not ok:
        warnings.append(f"top strata are not a homotopy equivalent subspace: {why}")
    if args.format == "json":
        _emit_json({"valid": True, "lmn": list(d.lmn), "notes": doc.notes, "warnings": warnings}, out)
        return EXIT_OK
    out.write(style.good("valid") + f": profile (l, m, n) = {d.lmn}\n")
    for n in doc.notes:
        out.write(f"note: {n}\n")
    for w in warnings:
        out.write(style.warn("warning") + f": {w}\n")
    return EXIT_OK


def _classify_one(path: str):
    try:
        _, d = load(path)
    except (InputError, DataValidationError) as exc:
        return path, exc
    return path, classify(d)


def cmd_classify(args, out, err, style) -> int:
    with ThreadPoolExecutor() as pool:
        results = list(pool.map(_classify_one, args.files))
    status = EXIT_OK
    records = {}
    many = len(results) > 1
    for path, r in results:
        if isinstance(r, Exception):
            status = _report_error(r, err, style) if args.format == "text" else EXIT_INVALID
            records[path] = {"error": str(r)}
            continue
        if args.format == "json":
            records[path] = classification_record(r)
        else:
            lines = _classify_text(r, style)
            if many:
                lines[0] = f"{path}: {lines[0]}"
            out.write("\n".join(lines) + "\n")
    if args.format == "json":
        _emit_json(records if many else next(iter(records.values())), out)
    return status


def cmd_iso(args, out, err, style) -> int:
    try:
        _, d1 = load(args.first)
        _, d2 = load(args.second)
    except (InputError, DataValidationError) as exc:
        return _report_error(exc, err, style)
    v = decide_iso(d1, d2, weak=args.weak)
    if args.format == "json":
        _emit_json(verdict_record(v), out)
    else:
        colour = {VerdictKind.ISOMORPHIC: style.good, VerdictKind.NOT_ISOMORPHIC: style.bad}.get(v.kind, style.warn)
        out.write(colour(v.kind.value) + ("" if not v.reason else f" ({v.reason})") + "\n")
        if v.witness is not None:
            out.write(f"psi = {v.witness.psi.tolist()}\n")
            for a, b in sorted(v.witness.stratum_map.items()):
                out.write(f"  {a} -> {b}\n")
        if v.certificate is not None:
            c = v.certificate
            out.write(f"differs in {c.invariant}: {_plain(c.first)} vs {_plain(c.second)}\n")
    return EXIT_UNKNOWN if v.kind is VerdictKind.UNKNOWN else EXIT_OK


def cmd_homology(args, out, err, style) -> int:
    try:
        _, d = load(args.file)
    except (InputError, DataValidationError) as exc:
        return _report_error(exc, err, style)
    try:
        c = build_canonical_complex(d)
    except ComplexError as exc:
        err.write(style.bad("error") + f": space.type: {exc}\n")
        return EXIT_USAGE
    h = homology(c)
    if args.dump_complex:
        buf = io.StringIO()
        dump_complex(c, buf)
        try:
            with open(args.dump_complex, "w", encoding="utf-8") as fh:
                fh.write(buf.getvalue())
        except OSError as exc:
            err.write(style.bad("error") + f": --dump-complex: {exc.strerror or exc}\n")
            return EXIT_USAGE
    if args.format == "json":
        _emit_json({"homology": homology_record(h), "euler_characteristic": c.euler_characteristic()}, out)
    else:
        for k, g in enumerate(h.degrees):
            out.write(f"H_{k} = {g}\n")
    return EXIT_OK


def cmd_tables(args, out, err, style) -> int:
    tables = enumerate_tables()
    if args.format == "json":
        _emit_json({f"table{i + 1}": t.splitlines() for i, t in enumerate(tables)}, out)
    else:
        out.write("\n".join(tables))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    p = argparse.ArgumentParser(prog="torus-strata", description="Characteristic data of T-pseudomanifolds.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("validate", parents=[common], help="check a data file")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)
    s = sub.add_parser("classify", parents=[common], help="name the homeomorphism type")
    s.add_argument("files", nargs="+")
    s.set_defaults(func=cmd_classify)
    s = sub.add_parser("iso", parents=[common], help="decide isomorphism of two data files")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--weak", action="store_true", help="allow a torus automorphism")
    s.set_defaults(func=cmd_iso)
    s = sub.add_parser("homology", parents=[common], help="homology of the canonical model over a graph")
    s.add_argument("file")
    s.add_argument("--dump-complex", metavar="PATH")
    s.set_defaults(func=cmd_homology)
    s = sub.add_parser("tables", parents=[common], help="print the classification tables")
    s.set_defaults(func=cmd_tables)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    return args.func(args, out, err, _style(out))


if __name__ == "__main__":
    sys.exit(main())
