"""Acceptance suite: one PASS/FAIL line per criterion on the terminal."""

import contextlib
import itertools
import random
import time
from pathlib import Path

import pytest

from typeramsey import io
from typeramsey.amalgamation import check_family_binary, counterexample_instance, paper_counterexample
from typeramsey.cli import EXIT, run_command
from typeramsey.fixtures import EH, GRAPH, ORDER, RH, complete_graph, random_graph, random_structure, triangle_free
from typeramsey.ramsey import arrows, copies_of, replay
from typeramsey.respect import FAILS, HOLDS
from typeramsey.structures import Language, Structure, structure
from typeramsey.typetrees import one_type_classes, type_tree
from typeramsey.weaktypes import PlusStructure, enumerate_weak_types, tv, weak_type_of_tuple

DATA = Path(__file__).resolve().parent.parent / "data"
t0, t1 = tv(0), tv(1)


@pytest.fixture
def criterion(capsys):
    @contextlib.contextmanager
    def run(number, title, limit=None):
        start = time.perf_counter()
        ok = False
        try:
            yield
            elapsed = time.perf_counter() - start
            assert limit is None or elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s"
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            with capsys.disabled():
                print(f"\nACCEPTANCE {number} {'PASS' if ok else 'FAIL'}: {title} ({elapsed:.2f}s)")
    return run


def test_counterexample_reproduction(criterion):
    with criterion(1, "counterexample rebuilt, validated at depth 3, FAILS with A' = ({0,1,2}, H={(0,1,2)})", 60):
        inst, res = paper_counterexample(3)
        assert inst.A == Structure(EH, 0)
        assert inst.B == Structure(EH, 1)
        assert inst.B2 == structure(EH, 2, E=[(0, 1)])
        T = inst.weak_types
        assert T["T_A"].mixed == frozenset() and T["T_A"].level == 0
        assert T["T_B"].mixed == frozenset() and T["T_B"].level == 1
        assert T["T'_B"].mixed == {("H", (0, t0, t1))}
        assert T["T_B'"].mixed == {("E", (1, t0))}
        assert T["T'_B'"].mixed == {("E", (1, t0)), ("H", (0, t0, t1))}
        link = frozenset({("E", (1, t0))})
        assert inst.f.base_map == () and inst.f.default == (frozenset(), frozenset())
        assert inst.f2.base_map == () and inst.f2.default == (link, frozenset())
        assert inst.g.base_map == (0,) and inst.g.default == (link, frozenset())
        assert inst.g.apply_weak_type(T["T_B"]) == T["T_B'"]
        assert inst.g.apply_weak_type(T["T'_B"]) == T["T'_B'"]
        assert res.detail["validation"] == {"f": HOLDS, "f'": HOLDS, "g": HOLDS}
        assert res.verdict == FAILS
        assert res.witness == structure(EH, 3, H=[(0, 1, 2)])
        code, report = run_command(["amalg", "counterexample", "--json", "--depth", "3"])
        assert code == 1 and report["verdict"] == FAILS


def test_transfer_conformance(criterion):
    with criterion(2, "transfer g' passes on every generated {K3}-free instance with |B'| <= 4", 600):
        res = check_family_binary(triangle_free(), 4, depth=3)
        assert res.verdict == HOLDS, res.detail
        assert res.detail["instances"] > 1000


def test_classical_arrows(criterion):
    with criterion(3, "K6 -> (K3)^K2_{2,1} holds, K5 fails with a replayable colouring", 60):
        assert arrows(complete_graph(6), complete_graph(3), complete_graph(2), 2, 1).holds
        r = arrows(complete_graph(5), complete_graph(3), complete_graph(2), 2, 1)
        assert not r.holds
        _, copies = copies_of(complete_graph(5), complete_graph(3), complete_graph(2))
        assert replay(r.witness_coloring, copies, 1)


def test_unique_empty_weak_type(criterion):
    languages = [GRAPH, ORDER, EH, RH, Language.of(U=1), Language.of(U=1, E=2, H=3)]
    with criterion(4, "the empty base has exactly one weak type in every fixture language"):
        for lang in languages:
            types = enumerate_weak_types(Structure(lang, 0))
            assert len(types) == 1 and types[0].mixed == frozenset()


def test_binary_correspondence(criterion):
    rng = random.Random(20240501)
    with criterion(5, "singleton weak types biject with 1-type classes on 50 random graphs", 60):
        for _ in range(50):
            U = random_graph(rng, rng.randint(0, 6))
            for n in range(U.size + 1):
                classes = one_type_classes(U, n)
                realized = {}
                for v in range(n, U.size):
                    realized.setdefault(weak_type_of_tuple(U, n, (v,)), set()).add(v)
                assert sorted(map(sorted, realized.values())) == sorted(sorted(c.members) for c in classes)


def quotient_size(base):
    total = base.size
    types = enumerate_weak_types(base)
    for d in range(1, base.language.width + 1):
        allowed = {tv(i) for i in range(d)}
        total += len({frozenset(e for e in T.mixed if {x for x in e[1] if x < 0} <= allowed) for T in types})
    return total


def test_plus_structure_counts(criterion):
    with criterion(6, "plus-structure sizes 5 and 18 for graph bases of size 1 and 2"):
        for n, expected in ((1, 5), (2, 18)):
            base = Structure(GRAPH, n)
            assert quotient_size(base) == expected
            assert PlusStructure(base).vertex_count == expected
            assert PlusStructure(complete_graph(n)).vertex_count == expected


def test_tree_axioms(criterion):
    rng = random.Random(7)
    pool = [GRAPH, EH, RH, Language.of(U=1, E=2), Language.of(H=3), Language.of(U=1, E=2, H=3)]
    with criterion(7, "down-sets are chains and weak-type truncation is sound on 100 random structures", 300):
        for _ in range(100):
            lang = rng.choice(pool)
            U = random_structure(rng, lang, rng.randint(0, 6), p=rng.choice([0.1, 0.3, 0.5]))
            T = type_tree(U)
            for x in T.nodes:
                down = T.down_set(x)
                assert T.is_chain(down)
                assert sorted(y.level for y in down) == list(range(x.level + 1))
            w = lang.width
            for ell in range(U.size + 1):
                for k in range(1, w + 1):
                    for tup in itertools.combinations(range(ell, U.size), k):
                        W = weak_type_of_tuple(U, ell, tup)
                        assert W.used_depth() <= k
                        for j in range(1, k + 1):
                            assert W.restrict(j) == weak_type_of_tuple(U, ell, tup[:j]).mixed
                        # a type vertex past the tuple never appears
                        assert not any(x < -k for _, t in W.mixed for x in t)


def golden_commands():
    d = lambda name: str(DATA / name)  # noqa: E731
    return [
        ["struct", "validate", d("k3.json")],
        ["emb", "list", d("k1.json"), d("p3.json")],
        ["types", "tree", d("p3.json")],
        ["types", "meets", d("p3.json"), "--copy", "0,2"],
        ["weaktypes", "enum", d("k1.json")],
        ["weaktypes", "of-tuple", d("p3.json"), "--level", "1", "--tuple", "1,2"],
        ["plus", d("k2.json")],
        ["respect", "check", d("k1.json"), d("p3.json"), "--map", "1"],
        ["amalg", "counterexample"],
        ["amalg", "check", d("counterexample_instance.json")],
        ["arrows", "C=" + d("k6.json"), "B=" + d("k3.json"), "A=" + d("k2.json"), "-k", "2", "-l", "1"],
        ["arrows", "C=" + d("k5.json"), "B=" + d("k3.json"), "A=" + d("k2.json"), "-k", "2", "-l", "1"],
        ["degree", d("k3.json"), d("k1.json"), "-k", "3"],
    ]


def test_determinism(criterion):
    with criterion(8, "two runs of every golden command give byte-identical JSON reports"):
        for argv in golden_commands():
            texts = []
            for _ in range(2):
                code, report = run_command(["--json", "--jobs", "1"] + argv)
                assert code in (0, 1), (argv, report)
                assert EXIT[report["verdict"]] == code
                report.pop("timing")
                report.pop("_text")
                texts.append(io.dumps(report))
            assert texts[0] == texts[1], argv
        assert counterexample_instance() == counterexample_instance()
