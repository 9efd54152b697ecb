"""Command-line interface.

Exit codes: 0 holds / success, 1 fails, 2 inconclusive or refused by a
budget, 64 input error (including bad flags).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
import time
from pathlib import Path
from typing import Any

from . import io, structures
from .amalgamation import check_instance, paper_counterexample
from .errors import BudgetExceeded, InputError
from .ramsey import DEFAULT_BUDGET, arrows, arrows_type_respecting, finite_degree
from .respect import FAILS, HOLDS, INCONCLUSIVE, is_family_type_respecting, type_respecting_witness
from .structures import EMBEDDING, MONOMORPHISM, Embedding, HereditaryFamily, Structure, enumerate_embeddings
from .typetrees import meet_closure_shape, meet_level, type_tree
from .weaktypes import PlusStructure, enumerate_weak_types, tree_of_weak_types, weak_type_of_tuple

EXIT = {HOLDS: 0, "OK": 0, FAILS: 1, INCONCLUSIVE: 2, "REFUSED": 2, "INPUT_ERROR": 64}

log = logging.getLogger("typeramsey")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(64, f"{self.prog}: error: {message}\n")


# helpers --------------------------------------------------------------------

def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None


def load_structure(path: str) -> Structure:
    text = _read(path)
    try:
        return io.parse_structure(text)
    except InputError as e:
        raise InputError(f"{path}: {e}") from None


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip() != "")
    except ValueError:
        raise InputError(f"expected a comma-separated list of integers, got {text!r}") from None


def load_family(args) -> HereditaryFamily:
    if getattr(args, "family", None):
        try:
            return io.family_from_doc(json.loads(_read(args.family)))
        except json.JSONDecodeError as e:
            raise InputError(f"{args.family}: line {e.lineno}: {e.msg}") from None
    forbidden = [load_structure(p) for p in (args.forbid or [])]
    if not forbidden:
        raise InputError("give a family with --family or at least one --forbid structure")
    mode = MONOMORPHISM if args.mono else EMBEDDING
    return HereditaryFamily(forbidden[0].language, tuple(forbidden), mode)


def _add_family(p):
    p.add_argument("--family", help="family document (language, mode, forbidden)")
    p.add_argument("--forbid", action="append", help="forbidden structure file (repeatable)")
    p.add_argument("--mono", action="store_true", help="forbid monomorphic copies instead of embedded ones")


# commands -------------------------------------------------------------------
# each returns (verdict, result payload, text lines)

def cmd_struct_validate(args):
    text = _read(args.file)
    try:
        canon = io.canonical(text)
    except InputError as e:
        raise InputError(f"{args.file}: {e}") from None
    return "OK", json.loads(canon), [canon.rstrip()]


def cmd_emb_list(args):
    A, B = load_structure(args.A), load_structure(args.B)
    maps = [list(e.vertex_map) for e in enumerate_embeddings(A, B)]
    return "OK", {"count": len(maps), "embeddings": maps}, [f"{len(maps)} embeddings"] + [str(m) for m in maps]


def cmd_types_tree(args):
    U = load_structure(args.file)
    T = type_tree(U)
    nodes = [{"level": x.level, "members": list(x.members),
              "parent": (lambda p: None if p is None else [p.level, p.members[0]])(T.parent(x))} for x in T.nodes]
    lines = [f"level {x['level']}: {x['members']}" for x in nodes]
    return "OK", {"nodes": nodes}, lines


def cmd_types_meets(args):
    U = load_structure(args.file)
    if args.copy:
        code = meet_closure_shape(U, _ints(args.copy))
        return "OK", {"copy": list(_ints(args.copy)), "shape": io.jsonable(code)}, [repr(code)]
    pairs = [[u, v, meet_level(U, u, v)] for u in range(U.size) for v in range(u + 1, U.size)]
    return "OK", {"meets": pairs}, [f"{u} {v}: {j}" for u, v, j in pairs]


def cmd_weaktypes_enum(args):
    base = load_structure(args.file)
    types = enumerate_weak_types(base, args.limit)
    return "OK", {"count": len(types), "weak_types": [io.weak_type_doc(T) for T in types]}, \
        [f"{len(types)} weak types"] + [repr(T) for T in types]


def cmd_weaktypes_of_tuple(args):
    U = load_structure(args.file)
    T = weak_type_of_tuple(U, args.level, _ints(args.tuple))
    return "OK", io.weak_type_doc(T), [repr(T)]


def cmd_plus(args):
    P = PlusStructure(load_structure(args.file))
    doc = io.plus_structure_doc(P, args.limit)
    return "OK", doc, [f"{doc['vertex_count']} vertices"]


def cmd_respect_check(args):
    A, B = load_structure(args.A), load_structure(args.B)
    h = Embedding(A, B, _ints(args.map))
    wit = type_respecting_witness(h)
    verdict = HOLDS if wit is not None else FAILS
    payload = {"verdict": verdict, "base_maps": None if wit is None else {str(v): list(m) for v, m in wit.items()}}
    return verdict, payload, [verdict]


def cmd_respect_family_check(args):
    try:
        h = io.plus_map_from_doc(json.loads(_read(args.map)))
    except json.JSONDecodeError as e:
        raise InputError(f"{args.map}: line {e.lineno}: {e.msg}") from None
    res = is_family_type_respecting(h, load_family(args), args.depth)
    return res.verdict, io.outcome_doc(res), [res.verdict] + ([f"witness {res.witness}"] if res.fails else [])


def cmd_amalg_check(args):
    try:
        inst = io.instance_from_doc(json.loads(_read(args.instance)))
    except json.JSONDecodeError as e:
        raise InputError(f"{args.instance}: line {e.lineno}: {e.msg}") from None
    res = check_instance(inst, args.depth)
    return res.verdict, io.outcome_doc(res), [res.verdict]


def cmd_amalg_counterexample(args):
    inst, res = paper_counterexample(args.depth, oriented=not args.literal)
    payload = {"instance": io.instance_doc(inst), "outcome": io.outcome_doc(res)}
    lines = [res.verdict]
    if res.fails:
        lines.append(f"witness {res.witness}")
    return res.verdict, payload, lines


def _parse_named(items: list[str]) -> dict[str, str]:
    out = {}
    for item in items:
        key, sep, val = item.partition("=")
        if not sep or key not in ("A", "B", "C"):
            raise InputError(f"expected A=FILE, B=FILE or C=FILE, got {item!r}")
        out[key] = val
    missing = {"A", "B", "C"} - set(out)
    if missing:
        raise InputError(f"missing {', '.join(sorted(missing))}")
    return out


def cmd_arrows(args):
    files = _parse_named(args.structures)
    C, B, A = (load_structure(files[k]) for k in "CBA")
    if args.type_respecting:
        res = arrows_type_respecting(C, B, A, args.k, args.l, load_family(args), args.depth,
                                     args.budget, args.strict, args.jobs)
        return res.verdict, io.outcome_doc(res), [res.verdict]
    res = arrows(C, B, A, args.k, args.l, args.budget, args.jobs)
    verdict = HOLDS if res.holds else FAILS
    lines = [verdict]
    if not res.holds:
        lines.append(f"bad colouring {list(res.witness_coloring.assignment)}")
    return verdict, io.jsonable(res), lines


def cmd_degree(args):
    C, A = load_structure(args.C), load_structure(args.A)
    d = finite_degree(C, A, args.k, args.budget, args.jobs)
    return "OK", {"finite_degree": d}, [str(d)]


def cmd_export_dot(args):
    U = load_structure(args.file)
    text = to_dot(U, args.what, args.limit)
    if args.output:
        Path(args.output).write_text(text)
    return "OK", {"dot": text}, [text.rstrip()]


def to_dot(U: Structure, what: str, limit: int | None = None) -> str:
    lines = [f"digraph {what.replace('-', '_')} {{", "  node [shape=box];"]
    if what == "types-tree":
        T = type_tree(U)
        for x in T.nodes:
            lines.append(f'  "{x.level}:{x.members[0]}" [label="L{x.level} {list(x.members)}"];')
        for x in T.nodes:
            p = T.parent(x)
            if p is not None:
                lines.append(f'  "{p.level}:{p.members[0]}" -> "{x.level}:{x.members[0]}";')
    elif what == "weak-tree":
        nodes = tree_of_weak_types(U)
        for i, n in enumerate(nodes):
            lines.append(f'  w{i} [label="{n.level}/{n.length} {_escape(repr(n.weak_type))}"];')
        for i, n in enumerate(nodes):
            below = [j for j, m in enumerate(nodes) if j != i and n.contains(m) and not m.contains(n)]
            direct = [j for j in below if not any(k != j and nodes[k].contains(nodes[j])
                                                  and not nodes[j].contains(nodes[k]) for k in below)]
            for j in direct:
                lines.append(f"  w{j} -> w{i};")
    elif what == "plus":
        M = PlusStructure(U).materialize(limit)
        for i, label in enumerate(M.labels):
            text = str(label) if isinstance(label, int) else f"d{label[0]} {sorted(label[1])}"
            lines.append(f'  v{i} [label="{_escape(text)}"];')
        for c, p in sorted(M.parent.items()):
            if c != p:
                lines.append(f'  v{p} -> v{c} [style=dashed];')
        for name in U.language.names:
            for t in sorted(M.relations[name]):
                if len(t) == 2:
                    lines.append(f'  v{t[0]} -> v{t[1]} [label="{name}"];')
                else:
                    hub = f'"{name}{"_".join(map(str, t))}"'
                    lines.append(f'  {hub} [shape=point];')
                    lines.extend(f'  {hub} -> v{x} [label="{k}"];' for k, x in enumerate(t))
    else:
        raise InputError(f"unknown export target {what!r}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _escape(s: str) -> str:
    return s.replace('"', '\\"')


# parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="typeramsey", description="Type-respecting embeddings, amalgamation and arrow checks")
    _add_common(p, top=True)
    common = _Parser(add_help=False)
    _add_common(common, top=False)
    sub = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def group(name, help_):
        g = sub.add_parser(name, help=help_)
        inner = g.add_subparsers(dest="action", required=True, parser_class=_Parser)
        original = inner.add_parser
        inner.add_parser = lambda *a, **kw: original(*a, parents=[common], **kw)
        return inner

    s = group("struct", "structure documents")
    c = s.add_parser("validate")
    c.add_argument("file")
    c.set_defaults(func=cmd_struct_validate)

    s = group("emb", "embeddings")
    c = s.add_parser("list")
    c.add_argument("A")
    c.add_argument("B")
    c.set_defaults(func=cmd_emb_list)

    s = group("types", "1-types")
    c = s.add_parser("tree")
    c.add_argument("file")
    c.set_defaults(func=cmd_types_tree)
    c = s.add_parser("meets")
    c.add_argument("file")
    c.add_argument("--copy", help="comma-separated vertices; print the meet-closure shape code")
    c.set_defaults(func=cmd_types_meets)

    s = group("weaktypes", "weak types")
    c = s.add_parser("enum")
    c.add_argument("file")
    c.add_argument("--limit", type=int)
    c.set_defaults(func=cmd_weaktypes_enum)
    c = s.add_parser("of-tuple")
    c.add_argument("file")
    c.add_argument("--level", type=int, required=True)
    c.add_argument("--tuple", required=True, help="comma-separated increasing vertices")
    c.set_defaults(func=cmd_weaktypes_of_tuple)

    c = sub.add_parser("plus", parents=[common], help="plus-structure of a base structure")
    c.add_argument("file")
    c.add_argument("--limit", type=int)
    c.set_defaults(func=cmd_plus)

    s = group("respect", "type-respecting checks")
    c = s.add_parser("check")
    c.add_argument("A")
    c.add_argument("B")
    c.add_argument("--map", required=True, help="comma-separated vertex map")
    c.set_defaults(func=cmd_respect_check)
    c = s.add_parser("family-check")
    c.add_argument("map", help="plus-embedding document")
    _add_family(c)
    c.add_argument("--depth", type=int, default=3)
    c.set_defaults(func=cmd_respect_family_check)

    s = group("amalg", "type-respecting amalgamation")
    c = s.add_parser("check")
    c.add_argument("instance")
    c.add_argument("--depth", type=int, default=3)
    c.set_defaults(func=cmd_amalg_check)
    c = s.add_parser("counterexample")
    c.add_argument("--depth", type=int, default=3)
    c.add_argument("--literal", action="store_true",
                   help="use the forbidden structure with edge (1,0) as printed (f' is then rejected)")
    c.set_defaults(func=cmd_amalg_counterexample)

    c = sub.add_parser("arrows", parents=[common], help="check C -> (B)^A_{k,l}")
    c.add_argument("structures", nargs=3, metavar="X=FILE", help="C=FILE B=FILE A=FILE")
    c.add_argument("-k", type=int, required=True)
    c.add_argument("-l", type=int, required=True)
    c.add_argument("--type-respecting", action="store_true")
    c.add_argument("--strict", action="store_true", help="require f to be K-type-respecting as well")
    c.add_argument("--depth", type=int, default=3)
    c.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    _add_family(c)
    c.set_defaults(func=cmd_arrows)

    c = sub.add_parser("degree", parents=[common], help="least l with C -> (C)^A_{k,l}")
    c.add_argument("C")
    c.add_argument("A")
    c.add_argument("-k", type=int, required=True)
    c.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    c.set_defaults(func=cmd_degree)

    s = group("export", "exports")
    c = s.add_parser("dot")
    c.add_argument("what", choices=["types-tree", "weak-tree", "plus"])
    c.add_argument("file")
    c.add_argument("-o", "--output")
    c.add_argument("--limit", type=int)
    c.set_defaults(func=cmd_export_dot)
    return p


def _add_common(p, top: bool):
    # on subcommands the defaults are suppressed so top-level values survive
    d = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    p.add_argument("--json", action="store_true", default=d(False), help="print a machine-readable run report")
    p.add_argument("--jobs", type=int, default=d(os.cpu_count() or 1), help="worker processes")
    p.add_argument("--seed", type=int, default=d(0), help="seed for randomized steps")
    p.add_argument("-v", "--verbose", action="store_true", default=d(False))
    p.add_argument("--irreducible-distinct-only", action="store_true", default=d(False),
                   help="irreducibility only asks distinct vertices to share a tuple")


def _config(args) -> dict:
    keys = ("json", "depth", "budget", "jobs", "seed", "k", "l", "type_respecting", "strict")
    return {k: getattr(args, k) for k in keys if hasattr(args, k)}


def run_command(argv: list[str]) -> tuple[int, dict]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # usage errors (64) and --help (0)
        code = int(e.code or 0)
        verdict = "OK" if code == 0 else "INPUT_ERROR"
        return code, {"version": io.VERSION, "command": list(argv), "config": {}, "verdict": verdict,
                      "result": {}, "_text": []}
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    random.seed(args.seed)
    saved = structures.IRREDUCIBLE_DISTINCT_ONLY
    structures.IRREDUCIBLE_DISTINCT_ONLY = args.irreducible_distinct_only or saved
    start = time.perf_counter()
    lines: list[str] = []
    try:
        verdict, result, lines = args.func(args)
    except BudgetExceeded as e:
        verdict, result, lines = "REFUSED", {"reason": str(e)}, [f"refused: {e}"]
    except InputError as e:
        verdict, result, lines = "INPUT_ERROR", {"error": str(e)}, [f"error: {e}"]
    finally:
        structures.IRREDUCIBLE_DISTINCT_ONLY = saved
    report: dict[str, Any] = {"version": io.VERSION, "command": list(argv), "config": _config(args),
                              "verdict": verdict, "result": result,
                              "timing": {"seconds": round(time.perf_counter() - start, 6)}}
    report["_text"] = lines
    return EXIT[verdict], report


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    code, report = run_command(argv)
    lines = report.pop("_text")
    if report["config"].get("json"):
        sys.stdout.write(io.dumps(report))
    else:
        stream = sys.stderr if report["verdict"] == "INPUT_ERROR" else sys.stdout
        print("\n".join(lines), file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
