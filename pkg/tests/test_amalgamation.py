import pytest

from typeramsey.amalgamation import (
    AmalgamationInstance,
    check_family_binary,
    check_instance,
    counterexample_family,
    counterexample_instance,
    paper_counterexample,
    star_structure,
)
from typeramsey.errors import InputError, Unsupported
from typeramsey.fixtures import EH, GRAPH, complete_graph, edgeless, tournament3, triangle_free
from typeramsey.respect import FAILS, HOLDS, forced_extension, is_family_type_respecting
from typeramsey.structures import EMBEDDING, HereditaryFamily, family_member, structure
from typeramsey.weaktypes import PlusEmbedding


def test_counterexample_fails_with_expected_witness():
    inst, res = paper_counterexample()
    assert res.verdict == FAILS
    assert res.witness == structure(EH, 3, H=[(0, 1, 2)])
    assert res.detail["validation"] == {"f": HOLDS, "f'": HOLDS, "g": HOLDS}
    assert res.detail["tried"][0] == ("g", FAILS)
    assert res.detail["new_vertices"] == 2
    assert family_member(inst.K, res.witness)


def test_counterexample_every_completion_leaves_the_family():
    # the depth-1 images are forced by g' ∘ f = f'; only the depth-2 node of the
    # pair is free, so trying every subset of its extras covers every g'
    inst = counterexample_instance()
    A2 = structure(EH, 3, H=[(0, 1, 2)])
    pair_node = frozenset({("H", (0, -1, -2))})
    extras = sorted(inst.g.extra_universe(2))
    assert len(extras) == 6
    for mask in range(1 << len(extras)):
        chosen = frozenset(e for i, e in enumerate(extras) if mask >> i & 1)
        cand = inst.g.with_overrides({(2, pair_node): chosen})
        assert cand.base_map == (0,) and inst.f.then(cand).agrees_with(inst.f2)
        assert not family_member(inst.K, forced_extension(cand, A2))
    assert paper_counterexample()[1].detail["completions"] == 64


def test_counterexample_is_deterministic():
    a = paper_counterexample()[1]
    b = paper_counterexample()[1]
    assert (a.verdict, a.witness, a.detail) == (b.verdict, b.witness, b.detail)


def test_literal_forbidden_structure_is_rejected():
    # with the printed orientation f' is not K-type-respecting
    inst = counterexample_instance(oriented=False)
    res = is_family_type_respecting(inst.f2, inst.K, 3)
    assert res.verdict == FAILS and res.witness == structure(EH, 3, H=[(0, 1, 2)])
    with pytest.raises(InputError, match="clause f' is K-type-respecting violated"):
        paper_counterexample(oriented=False)
    assert star_structure()["E"] == {(1, 0), (1, 2), (1, 3)}


def instance(g_rest, f_node_image=frozenset()):
    K = triangle_free()
    A, B, B2 = edgeless(0), edgeless(1), edgeless(2)
    f = PlusEmbedding(A, B, ())
    g = PlusEmbedding(B, B2, (0,), (g_rest,), {(1, frozenset()): f_node_image})
    return AmalgamationInstance(K, A, B, B2, f, f.then(g), g)


def test_g_itself_is_the_certificate():
    res = check_instance(instance(frozenset()), 3)
    assert res.verdict == HOLDS and res.detail["certificate"] == "g"


def test_transfer_repairs_a_failing_g():
    full = frozenset(PlusEmbedding(edgeless(1), edgeless(2), (0,)).extra_universe(1))
    res = check_instance(instance(full), 3)
    assert res.verdict == HOLDS
    assert res.detail["tried"] == [("g", FAILS), ("prop1_transfer", HOLDS)]


def test_shape_clauses_are_named():
    inst = instance(frozenset())
    looped = structure(GRAPH, 2, E=[(0, 0)])
    bad = AmalgamationInstance(inst.K, inst.A, inst.B, looped, inst.f, inst.f2, inst.g)
    with pytest.raises(InputError, match="restricted to B"):
        check_instance(bad, 3)
    bad = AmalgamationInstance(inst.K, inst.A, inst.B, edgeless(3), inst.f, inst.f2, inst.g)
    with pytest.raises(InputError, match="max B'"):
        check_instance(bad, 3)
    other = PlusEmbedding(inst.A, inst.B2, (), (frozenset({("E", (1, -1))}),))
    bad = AmalgamationInstance(inst.K, inst.A, inst.B, inst.B2, inst.f, other, inst.g)
    with pytest.raises(InputError, match="g ∘ f = f'"):
        check_instance(bad, 3)
    bad = AmalgamationInstance(inst.K, complete_graph(3), inst.B, inst.B2, inst.f, inst.f2, inst.g)
    with pytest.raises(InputError, match="A in K"):
        check_instance(bad, 3)


@pytest.mark.parametrize("name,K,symmetric", [
    ("triangle-free", triangle_free(), True),
    ("all graphs", HereditaryFamily(GRAPH, ()), True),
    ("no cyclic tournament", HereditaryFamily(GRAPH, (tournament3(),), EMBEDDING), False),
])
def test_binary_sweep_small(name, K, symmetric):
    res = check_family_binary(K, 3, symmetric=symmetric)
    assert res.verdict == HOLDS, res.detail
    assert res.detail["instances"] > 0


def test_binary_sweep_is_deterministic():
    a = check_family_binary(triangle_free(), 3)
    b = check_family_binary(triangle_free(), 3)
    assert a.detail == b.detail


def test_binary_sweep_rejects_ternary_languages():
    with pytest.raises(Unsupported):
        check_family_binary(counterexample_family(), 3)
    with pytest.raises(Unsupported):
        check_family_binary(HereditaryFamily(EH, ()), 2)
