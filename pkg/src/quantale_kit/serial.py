"""JSON instance files for groupoids, G-locales, Q-locales and equivariant maps.

A file is ``{"kind": ..., "metadata": {...}, "payload": {...}}``.  Spaces
are written as point lists plus the full list of opens; maps as objects
keyed by point name; compositions and actions as ``[g, h, gh]`` rows.  The
canonical text sorts every set and row lexicographically, so two values
are equal exactly when their canonical texts are byte-identical.

A ``groupoid`` field inside a payload may be an inline groupoid payload or
a path to a groupoid file, resolved relative to the referring file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import KitError, Verdict
from .groupoid import (
    EquivariantMap,
    FiniteGroupoid,
    GLocale,
    check_equivariant,
    check_glocale,
    check_groupoid,
)
from .order import FiniteSpace, frame_of_space
from .qmodule import QLocale, check_qlocale
from .quantale import InvQuantale, opens_quantale

KINDS = ("groupoid", "glocale", "qlocale", "hom")


class InputError(KitError):
    """Malformed file: bad JSON, a missing field or an ill-typed entry."""


class InvalidInstance(KitError):
    """Well-formed file whose instance fails its checker."""

    def __init__(self, kind: str, verdict: Verdict):
        super().__init__(f"{kind} fails its axioms: {verdict}", witness=verdict.witness)
        self.verdict = verdict


@dataclass
class InstanceFile:
    kind: str
    value: Any
    metadata: dict = field(default_factory=dict)
    groupoid: FiniteGroupoid | None = None
    quantale: InvQuantale | None = None


# --------------------------------------------------------------------------
# writing


def _sorted_names(pts) -> list[str]:
    return sorted(str(p) for p in pts)


def space_payload(S: FiniteSpace) -> dict:
    return {
        "points": _sorted_names(S.points),
        "opens": sorted(_sorted_names(S.subset(m)) for m in S.opens()),
    }


def groupoid_payload(G: FiniteGroupoid) -> dict:
    return {
        "objects": space_payload(G.objects),
        "arrows": space_payload(G.arrows),
        "d": {str(g): str(G.d(g)) for g in G.arrows.points},
        "r": {str(g): str(G.r(g)) for g in G.arrows.points},
        "u": {str(x): str(G.u(x)) for x in G.objects.points},
        "i": {str(g): str(G.i(g)) for g in G.arrows.points},
        "m": sorted([str(g), str(h), str(gh)] for (g, h), gh in G.comp.items()),
    }


def glocale_payload(A: GLocale, groupoid_ref: Any = None) -> dict:
    return {
        "groupoid": groupoid_ref if groupoid_ref is not None else groupoid_payload(A.groupoid),
        "space": space_payload(A.space),
        "p": {str(x): str(A.p(x)) for x in A.space.points},
        "action": sorted([str(g), str(x), str(y)] for (g, x), y in A.act.items()),
    }


def qlocale_payload(X: QLocale, groupoid_ref: Any = None) -> dict:
    Q = X.quantale
    rows = [
        [_sorted_names(Q.arrows(a)), _sorted_names(X.points_of(x)), _sorted_names(X.points_of(X.act(a, x)))]
        for a in Q.carrier for x in X.carrier
    ]
    return {
        "groupoid": groupoid_ref if groupoid_ref is not None else groupoid_payload(Q.groupoid),
        "space": space_payload(X.space),
        "action": sorted(rows),
    }


def hom_payload(f: EquivariantMap, groupoid_ref: Any = None) -> dict:
    ref = groupoid_ref if groupoid_ref is not None else groupoid_payload(f.source.groupoid)
    src = glocale_payload(f.source, ref)
    tgt = glocale_payload(f.target, ref)
    del src["groupoid"], tgt["groupoid"]
    return {
        "groupoid": ref,
        "source": src,
        "target": tgt,
        "map": {str(x): str(f.map(x)) for x in f.source.space.points},
    }


def payload_of(kind: str, value: Any, groupoid_ref: Any = None) -> dict:
    if kind == "groupoid":
        return groupoid_payload(value)
    if kind == "glocale":
        return glocale_payload(value, groupoid_ref)
    if kind == "qlocale":
        return qlocale_payload(value, groupoid_ref)
    if kind == "hom":
        return hom_payload(value, groupoid_ref)
    raise ValueError(f"unknown kind {kind!r}")


def document(kind: str, value: Any, metadata: dict | None = None, groupoid_ref: Any = None) -> dict:
    return {"kind": kind, "metadata": dict(metadata or {}), "payload": payload_of(kind, value, groupoid_ref)}


def _depth(obj: Any) -> int:
    if isinstance(obj, dict):
        return 99
    if isinstance(obj, list):
        return 1 + max((_depth(v) for v in obj), default=0)
    return 0


def _encode(obj: Any, indent: int, row: bool = False) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k, ensure_ascii=False)}: {_encode(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        # name lists, and rows of a table, stay on one line
        if _depth(obj) <= (2 if row else 1):
            return json.dumps(obj, ensure_ascii=False)
        items = [inner + _encode(v, indent + 1, row=True) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return json.dumps(obj, ensure_ascii=False)


def canonical_text(doc: dict) -> str:
    """Sorted keys, one row per line; lists of names stay on one line."""
    return _encode(doc, 0) + "\n"


def dumps(kind: str, value: Any, metadata: dict | None = None, groupoid_ref: Any = None) -> str:
    return canonical_text(document(kind, value, metadata, groupoid_ref))


def save(path: str | Path, kind: str, value: Any, metadata: dict | None = None, groupoid_ref: Any = None) -> None:
    Path(path).write_text(dumps(kind, value, metadata, groupoid_ref), encoding="utf-8")


# --------------------------------------------------------------------------
# reading


def _need(obj: Any, key: str, where: str, typ: type | tuple = (dict, list, str)) -> Any:
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(f"{where}: missing field {key!r}")
    val = obj[key]
    if not isinstance(val, typ):
        raise InputError(f"{where}.{key}: expected {getattr(typ, '__name__', typ)}, got {type(val).__name__}")
    return val


def _names(val: Any, where: str) -> list[str]:
    if not isinstance(val, list) or not all(isinstance(v, str) for v in val):
        raise InputError(f"{where}: expected a list of names")
    return val


def read_space(obj: Any, where: str) -> FiniteSpace:
    pts = _names(_need(obj, "points", where, list), f"{where}.points")
    if len(set(pts)) != len(pts):
        raise InputError(f"{where}.points: repeated point name")
    raw = _need(obj, "opens", where, list)
    known = set(pts)
    opens = []
    for k, o in enumerate(raw):
        names = _names(o, f"{where}.opens[{k}]")
        unknown = set(names) - known
        if unknown:
            raise InputError(f"{where}.opens[{k}]: unknown points {sorted(unknown)}")
        opens.append(names)
    try:
        return FiniteSpace(pts, opens)
    except ValueError as e:
        raise InputError(f"{where}.opens: {e}") from None


def _table(obj: Any, key: str, where: str, keys: list[str], values: set[str]) -> dict[str, str]:
    tab = _need(obj, key, where, dict)
    if set(tab) != set(keys):
        missing = sorted(set(keys) - set(tab))
        extra = sorted(set(tab) - set(keys))
        raise InputError(f"{where}.{key}: missing {missing}, unexpected {extra}")
    for k, v in tab.items():
        if v not in values:
            raise InputError(f"{where}.{key}[{k!r}]: unknown target {v!r}")
    return tab


def _rows(obj: Any, key: str, where: str, width: int) -> list[list]:
    rows = _need(obj, key, where, list)
    for k, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != width:
            raise InputError(f"{where}.{key}[{k}]: expected a row of {width} entries")
    return rows


def read_groupoid(obj: Any, where: str = "payload") -> FiniteGroupoid:
    G0 = read_space(_need(obj, "objects", where, dict), f"{where}.objects")
    G1 = read_space(_need(obj, "arrows", where, dict), f"{where}.arrows")
    objs, arrs = list(G0.points), list(G1.points)
    d = _table(obj, "d", where, arrs, set(objs))
    r = _table(obj, "r", where, arrs, set(objs))
    u = _table(obj, "u", where, objs, set(arrs))
    i = _table(obj, "i", where, arrs, set(arrs))
    comp = {}
    for k, row in enumerate(_rows(obj, "m", where, 3)):
        g, h, gh = row
        if not all(isinstance(v, str) and v in arrs for v in row):
            raise InputError(f"{where}.m[{k}]: entries must be arrow names")
        if (g, h) in comp:
            raise InputError(f"{where}.m[{k}]: composite of ({g}, {h}) given twice")
        comp[g, h] = gh
    try:
        return FiniteGroupoid(G0, G1, d, r, u, i, comp)
    except ValueError as e:
        raise InputError(f"{where}.m: {e}") from None


def _groupoid_ref(obj: Any, where: str, base_dir: Path | None) -> FiniteGroupoid:
    ref = _need(obj, "groupoid", where, (dict, str))
    if isinstance(ref, dict):
        return read_groupoid(ref, f"{where}.groupoid")
    path = Path(ref)
    if not path.is_absolute() and base_dir is not None:
        path = base_dir / path
    inst = load(path, allow_invalid=True)
    if inst.kind != "groupoid":
        raise InputError(f"{where}.groupoid: {ref} holds a {inst.kind}, not a groupoid")
    return inst.value


def read_glocale(obj: Any, G: FiniteGroupoid, where: str = "payload") -> GLocale:
    S = read_space(_need(obj, "space", where, dict), f"{where}.space")
    pts = list(S.points)
    p = _table(obj, "p", where, pts, set(G.objects.points))
    act = {}
    for k, row in enumerate(_rows(obj, "action", where, 3)):
        g, x, y = row
        if g not in G.arrows.index or x not in S.index or y not in S.index:
            raise InputError(f"{where}.action[{k}]: unknown arrow or point in {row}")
        if (g, x) in act:
            raise InputError(f"{where}.action[{k}]: ({g}, {x}) given twice")
        act[g, x] = y
    try:
        return GLocale(G, S, p, act)
    except ValueError as e:
        raise InputError(f"{where}.action: {e}") from None


def read_qlocale(obj: Any, Q: InvQuantale, where: str = "payload") -> QLocale:
    S = read_space(_need(obj, "space", where, dict), f"{where}.space")
    Xl = set(S.opens())
    n_q, n_x = len(Q.carrier), len(Xl)
    table: list[list[int | None]] = [[None] * n_x for _ in range(n_q)]
    Xf = frame_of_space(S)
    for k, row in enumerate(_rows(obj, "action", where, 3)):
        a, x, y = (_names(v, f"{where}.action[{k}]") for v in row)
        try:
            ia = Q.element(a)
            ix, iy = Xf.element(x), Xf.element(y)
        except KeyError:
            raise InputError(f"{where}.action[{k}]: {row} names a non-open set or an unknown point") from None
        if table[ia][ix] is not None:
            raise InputError(f"{where}.action[{k}]: entry given twice")
        table[ia][ix] = iy
    for ia in range(n_q):
        for ix in range(n_x):
            if table[ia][ix] is None:
                raise InputError(
                    f"{where}.action: no entry for {sorted(Q.arrows(ia))} acting on {sorted(Xf.points_of(ix))}"
                )
    return QLocale(Q, S, table)


def read_hom(obj: Any, G: FiniteGroupoid, where: str = "payload") -> EquivariantMap:
    src = read_glocale(_need(obj, "source", where, dict), G, f"{where}.source")
    tgt = read_glocale(_need(obj, "target", where, dict), G, f"{where}.target")
    mapping = _table(obj, "map", where, list(src.space.points), set(tgt.space.points))
    return EquivariantMap(src, tgt, mapping)


def validate(kind: str, value: Any, G: FiniteGroupoid | None, Q: InvQuantale | None) -> Verdict:
    if kind == "groupoid":
        return check_groupoid(value)
    v = check_groupoid(G)
    if not v:
        return v
    if kind == "glocale":
        return check_glocale(G, value)
    if kind == "qlocale":
        return check_qlocale(Q, value)
    v = check_glocale(G, value.source)
    if v:
        v = check_glocale(G, value.target)
    if v:
        v = check_equivariant(value)
    return v


def loads(text: str, *, base_dir: Path | None = None, allow_invalid: bool = False) -> InstanceFile:
    """Parse and build an instance; runs its checker unless ``allow_invalid``.

    Raises :class:`InputError` for malformed input (with line and column for
    JSON syntax errors) and :class:`InvalidInstance` when the checker fails.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    kind = _need(doc, "kind", "file", str)
    if kind not in KINDS:
        raise InputError(f"file.kind: {kind!r} is not one of {list(KINDS)}")
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise InputError("file.metadata: expected an object")
    payload = _need(doc, "payload", "file", dict)
    G = Q = None
    if kind == "groupoid":
        value = G = read_groupoid(payload)
    else:
        G = _groupoid_ref(payload, "payload", base_dir)
        if kind == "glocale":
            value = read_glocale(payload, G)
        elif kind == "hom":
            value = read_hom(payload, G)
        else:
            v = check_groupoid(G)
            if not v:
                raise InvalidInstance("groupoid", v)
            Q = opens_quantale(G)
            value = read_qlocale(payload, Q)
    if G is not None and metadata.get("name"):
        G.name = G.name or str(metadata["name"])
    if not allow_invalid:
        v = validate(kind, value, G, Q)
        if not v:
            raise InvalidInstance(kind, v)
    return InstanceFile(kind, value, metadata, G, Q)


def load(path: str | Path, *, allow_invalid: bool = False) -> InstanceFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None
    try:
        return loads(text, base_dir=path.parent, allow_invalid=allow_invalid)
    except InputError as e:
        raise InputError(f"{path}: {e}", witness=e.witness) from None
