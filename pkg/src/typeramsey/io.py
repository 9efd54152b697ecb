"""JSON documents for structures, weak types, plus-maps, instances and outcomes.

Every document carries ``"version": 1``.  Serialization is canonical: keys in
a fixed order, tuples sorted, type vertices written as ``"t0"``, ``"t1"``...
so ``parse(serialize(x)) == x`` and equal values give identical text.
"""

from __future__ import annotations

import json
import re
from typing import Any

from .errors import InputError
from .respect import CheckOutcome
from .structures import EMBEDDING, MONOMORPHISM, Embedding, HereditaryFamily, Language, Structure
from .weaktypes import NodeData, PlusEmbedding, PlusMap, PlusStructure, WeakType, render, tv

VERSION = 1


class DocumentError(InputError):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


# structures -----------------------------------------------------------------

def language_doc(lang: Language) -> list:
    return [{"name": n, "arity": a} for n, a in lang.relations]


def structure_doc(S: Structure, name: str | None = None, comment: str | None = None, top: bool = True) -> dict:
    doc: dict[str, Any] = {"version": VERSION} if top else {}
    if name is not None:
        doc["name"] = name
    if comment is not None:
        doc["comment"] = comment
    doc["language"] = language_doc(S.language)
    doc["size"] = S.size
    doc["relations"] = {n: [list(t) for t in sorted(S[n])] for n in S.language.names}
    return doc


def _load(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"line {e.lineno} column {e.colno}", e.msg) from None


def _need(doc: dict, key: str, kind, where: str):
    if not isinstance(doc, dict) or key not in doc:
        raise DocumentError(where or "document", f"missing field {key!r}")
    val = doc[key]
    if not isinstance(val, kind) or (kind is int and isinstance(val, bool)):
        raise DocumentError(f"{where}{key}", f"expected {getattr(kind, '__name__', kind)}")
    return val


def _check_version(doc: dict, where: str = ""):
    if "version" in doc and doc["version"] != VERSION:
        raise DocumentError(f"{where}version", f"unsupported version {doc['version']!r}")


def parse_language(items: Any, where: str = "language") -> Language:
    if not isinstance(items, list):
        raise DocumentError(where, "expected a list of {name, arity}")
    rels = []
    for i, item in enumerate(items):
        at = f"{where}[{i}]."
        rels.append((_need(item, "name", str, at), _need(item, "arity", int, at)))
    try:
        return Language(tuple(rels))
    except InputError as e:
        raise DocumentError(where, str(e)) from None


def structure_from_doc(doc: Any, where: str = "") -> Structure:
    if not isinstance(doc, dict):
        raise DocumentError(where or "document", "expected an object")
    _check_version(doc, where)
    lang = parse_language(_need(doc, "language", list, where), f"{where}language")
    size = _need(doc, "size", int, where)
    if size < 0:
        raise DocumentError(f"{where}size", "must be non-negative")
    rels = _need(doc, "relations", dict, where)
    out = {}
    for name, tuples in rels.items():
        at = f"{where}relations.{name}"
        if name not in lang.names:
            raise DocumentError(at, f"unknown relation symbol {name!r}")
        if not isinstance(tuples, list):
            raise DocumentError(at, "expected a list of tuples")
        arity = lang.arity(name)
        parsed = []
        for j, t in enumerate(tuples):
            if not isinstance(t, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in t):
                raise DocumentError(f"{at}[{j}]", f"tuple {t!r} must be a list of integers")
            if len(t) != arity:
                raise DocumentError(f"{at}[{j}]", f"tuple {t} has length {len(t)}, {name} has arity {arity}")
            bad = [x for x in t if not 0 <= x < size]
            if bad:
                raise DocumentError(f"{at}[{j}]", f"tuple {t} has vertex {bad[0]} outside 0..{size - 1}")
            parsed.append(tuple(t))
        out[name] = frozenset(parsed)
    try:
        return Structure(lang, size, out)
    except InputError as e:
        raise DocumentError(where or "document", str(e)) from None


def parse_structure(text: str) -> Structure:
    return structure_from_doc(_load(text))


# weak types and plus data ---------------------------------------------------

def node_doc(data: NodeData, language: Language) -> dict:
    return {n: sorted(([render(x) for x in t] for m, t in data if m == n), key=_entry_key)
            for n in language.names if any(m == n for m, _ in data)}


def _entry_key(items: list) -> list:
    # base vertices before type vertices, each numerically
    return [(1, int(x[1:])) if x.startswith("t") else (0, int(x)) for x in items]


_ENTRY = re.compile(r"^(t?)(\d+)$")


def node_from_doc(doc: Any, language: Language, where: str) -> NodeData:
    if not isinstance(doc, dict):
        raise DocumentError(where, "expected an object of relation tuples")
    out = []
    for name, tuples in doc.items():
        if name not in language.names:
            raise DocumentError(f"{where}.{name}", f"unknown relation symbol {name!r}")
        for j, t in enumerate(tuples):
            conv = []
            for x in t:
                m = _ENTRY.match(str(x))
                if not m:
                    raise DocumentError(f"{where}.{name}[{j}]", f"bad entry {x!r}")
                conv.append(tv(int(m.group(2))) if m.group(1) else int(m.group(2)))
            if len(conv) != language.arity(name):
                raise DocumentError(f"{where}.{name}[{j}]", f"tuple {t} has the wrong arity")
            out.append((name, tuple(conv)))
    return frozenset(out)


def weak_type_doc(T: WeakType) -> dict:
    return {"version": VERSION, "kind": "weak_type", "level": T.level,
            "base": structure_doc(T.base, top=False), "mixed": node_doc(T.mixed, T.base.language)}


def weak_type_from_doc(doc: dict, where: str = "") -> WeakType:
    _check_version(doc, where)
    base = structure_from_doc(_need(doc, "base", dict, where), f"{where}base.")
    try:
        return WeakType(base, node_from_doc(doc.get("mixed", {}), base.language, f"{where}mixed"))
    except InputError as e:
        raise DocumentError(f"{where}mixed", str(e)) from None


def plus_structure_doc(P: PlusStructure, limit: int | None = None) -> dict:
    M = P.materialize(limit)
    vertices = []
    for label in M.labels:
        if isinstance(label, int):
            vertices.append({"base": label})
        else:
            d, node = label
            vertices.append({"depth": d, "node": node_doc(node, P.language)})
    return {"version": VERSION, "kind": "plus_structure", "base": structure_doc(P.base, top=False),
            "vertex_count": M.size, "vertices": vertices,
            "parent": [[c, p] for c, p in sorted(M.parent.items())],
            "relations": {n: [list(t) for t in sorted(M.relations[n])] for n in P.language.names}}


def explicit_overrides(h: PlusMap, limit: int | None = None) -> dict:
    """Layer extras of ``h`` on every source node."""
    P = PlusStructure(h.source)
    return {(k, N): h.layer_extra(k, N) for k in range(1, h.width + 1) for N in P.nodes(k, limit)}


def plus_map_doc(h: PlusMap) -> dict:
    lang = h.source.language
    if isinstance(h, PlusEmbedding):
        default, overrides = h.default, h.overrides
    else:
        default, overrides = (frozenset(),) * h.width, explicit_overrides(h)
    return {"kind": "plus_embedding", "source": structure_doc(h.source, top=False),
            "target": structure_doc(h.target, top=False), "base_map": list(h.base_map),
            "default": [node_doc(x, lang) for x in default],
            "overrides": [{"depth": k, "node": node_doc(N, lang), "extras": node_doc(v, lang)}
                          for (k, N), v in sorted(overrides.items(), key=_override_key)]}


def _override_key(item):
    (k, N), _ = item
    return k, len(N), sorted(N)


def plus_map_from_doc(doc: dict, where: str = "") -> PlusEmbedding:
    src = structure_from_doc(_need(doc, "source", dict, where), f"{where}source.")
    dst = structure_from_doc(_need(doc, "target", dict, where), f"{where}target.")
    lang = src.language
    default = tuple(node_from_doc(x, lang, f"{where}default[{i}]") for i, x in enumerate(doc.get("default", [])))
    overrides = {}
    for i, item in enumerate(doc.get("overrides", [])):
        at = f"{where}overrides[{i}]"
        k = _need(item, "depth", int, at + ".")
        overrides[(k, node_from_doc(item.get("node", {}), lang, at + ".node"))] = \
            node_from_doc(item.get("extras", {}), lang, at + ".extras")
    try:
        return PlusEmbedding(src, dst, tuple(_need(doc, "base_map", list, where)), default, overrides)
    except InputError as e:
        raise DocumentError(where or "plus_embedding", str(e)) from None


# families, instances, outcomes ----------------------------------------------

def family_doc(K: HereditaryFamily) -> dict:
    return {"language": language_doc(K.language), "mode": K.mode,
            "forbidden": [structure_doc(F, top=False) for F in K.forbidden]}


def family_from_doc(doc: dict, where: str = "") -> HereditaryFamily:
    lang = parse_language(_need(doc, "language", list, where), f"{where}language")
    mode = doc.get("mode", EMBEDDING)
    if mode not in (EMBEDDING, MONOMORPHISM):
        raise DocumentError(f"{where}mode", f"unknown mode {mode!r}")
    forb = tuple(structure_from_doc({**F, "language": doc["language"]} if "language" not in F else F,
                                    f"{where}forbidden[{i}].") for i, F in enumerate(doc.get("forbidden", [])))
    return HereditaryFamily(lang, forb, mode)


def instance_doc(inst) -> dict:
    doc = {"version": VERSION, "kind": "amalgamation_instance", "family": family_doc(inst.K),
           "A": structure_doc(inst.A, top=False), "B": structure_doc(inst.B, top=False),
           "B2": structure_doc(inst.B2, top=False),
           "f": plus_map_doc(inst.f), "f2": plus_map_doc(inst.f2), "g": plus_map_doc(inst.g)}
    if inst.weak_types:
        doc["weak_types"] = {k: weak_type_doc(v) for k, v in inst.weak_types.items()}
    return doc


def instance_from_doc(doc: dict):
    from .amalgamation import AmalgamationInstance
    _check_version(doc)
    K = family_from_doc(_need(doc, "family", dict, ""), "family.")
    parts = {k: structure_from_doc(_need(doc, k, dict, ""), f"{k}.") for k in ("A", "B", "B2")}
    maps = {k: plus_map_from_doc(_need(doc, k, dict, ""), f"{k}.") for k in ("f", "f2", "g")}
    types = {k: weak_type_from_doc(v, f"weak_types.{k}.") for k, v in doc.get("weak_types", {}).items()}
    return AmalgamationInstance(K, parts["A"], parts["B"], parts["B2"], maps["f"], maps["f2"], maps["g"], types)


def jsonable(x: Any) -> Any:
    """Convert library values to plain JSON data."""
    from .amalgamation import AmalgamationInstance
    from .ramsey import ArrowResult, Coloring
    if isinstance(x, Structure):
        return structure_doc(x, top=False)
    if isinstance(x, WeakType):
        return weak_type_doc(x)
    if isinstance(x, PlusMap):
        return plus_map_doc(x)
    if isinstance(x, Embedding):
        return list(x.vertex_map)
    if isinstance(x, AmalgamationInstance):
        return instance_doc(x)
    if isinstance(x, HereditaryFamily):
        return family_doc(x)
    if isinstance(x, Coloring):
        return {"k": x.k, "domain": [jsonable(e) for e in x.domain], "assignment": list(x.assignment)}
    if isinstance(x, ArrowResult):
        return {"holds": x.holds, "witness_coloring": jsonable(x.witness_coloring),
                "colorings_checked": x.colorings_checked, "detail": jsonable(x.detail)}
    if isinstance(x, CheckOutcome):
        return outcome_doc(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (frozenset, set)):
        return sorted((jsonable(v) for v in x), key=repr)
    if hasattr(x, "item"):  # numpy scalars
        return x.item()
    return x


def outcome_doc(res: CheckOutcome) -> dict:
    return {"verdict": res.verdict, "depth_used": res.depth_used, "search_bound": res.search_bound,
            "witness": jsonable(res.witness), "detail": jsonable(res.detail)}


# canonical text ---------------------------------------------------------------

_SCALAR_LIST = re.compile(r"\[\s*((?:-?\d+|\"[^\",\[\]{}]*\"|true|false|null)(?:,\s*(?:-?\d+|\"[^\",\[\]{}]*\"|true|false|null))*)\s*\]")

_SCALAR_OBJECT = re.compile(r"\{\s*(\"[^\",]*\": (?:-?\d+|\"[^\",\[\]{}]*\"|true|false|null)"
                            r"(?:,\s*\"[^\",]*\": (?:-?\d+|\"[^\",\[\]{}]*\"|true|false|null))*)\s*\}")


def dumps(doc: Any) -> str:
    """Indented JSON with innermost scalar lists kept on one line."""
    text = json.dumps(doc, indent=2, ensure_ascii=False)
    text = _SCALAR_LIST.sub(lambda m: "[" + ", ".join(p.strip() for p in m.group(1).split(",")) + "]", text)
    text = _SCALAR_OBJECT.sub(lambda m: "{" + ", ".join(p.strip() for p in m.group(1).split(",")) + "}", text)
    return text + "\n"


def serialize(x: Any) -> str:
    if isinstance(x, Structure):
        return dumps(structure_doc(x))
    if isinstance(x, PlusStructure):
        return dumps(plus_structure_doc(x))
    doc = jsonable(x)
    if isinstance(doc, dict) and "version" not in doc:
        doc = {"version": VERSION, **doc}
    return dumps(doc)


def canonical(text: str) -> str:
    """Canonical form of a structure document."""
    doc = _load(text)
    S = structure_from_doc(doc)
    return dumps(structure_doc(S, doc.get("name"), doc.get("comment")))
