import itertools

import pytest

from typeramsey.errors import InputError
from typeramsey.fixtures import RH, complete_graph, path3, pure_order, random_graph, random_structure
from typeramsey.typetrees import (
    STAR,
    meet_closure_shape,
    meet_level,
    one_type_classes,
    same_type,
    type_shape,
    type_tree,
    vertex_node,
)


def naive_classes(U, n):
    """Partition vertices >= n by comparing all tuples over {0..n-1, u} directly."""
    def sig(u):
        out = set()
        for name, arity in U.language.relations:
            for t in itertools.product(list(range(n)) + [u], repeat=arity):
                if u in t and t in U[name]:
                    out.add((name, tuple("*" if x == u else x for x in t)))
        return frozenset(out)
    groups = {}
    for v in range(n, U.size):
        groups.setdefault(sig(v), []).append(v)
    return sorted(groups.values())


def test_path_classes_per_level():
    P = path3()
    assert [len(one_type_classes(P, n)) for n in range(4)] == [1, 2, 1, 0]
    assert [x.members for x in one_type_classes(P, 1)] == [(1,), (2,)]


def test_type_shape_uses_star():
    P = path3()
    assert type_shape(P, 1, 1) == frozenset({("E", (0, STAR)), ("E", (STAR, 0))})


def test_same_type_precondition():
    with pytest.raises(InputError):
        same_type(path3(), 0, 2, 1)
    assert same_type(path3(), 1, 2, 0)
    assert not same_type(path3(), 1, 2, 1)


def test_classes_match_oracle(rng):
    for _ in range(40):
        U = random_structure(rng, RH, rng.randint(1, 5), 0.3)
        for n in range(U.size + 1):
            assert sorted(list(x.members) for x in one_type_classes(U, n)) == naive_classes(U, n)


def test_down_sets_are_chains(rng):
    for _ in range(30):
        U = random_graph(rng, rng.randint(1, 6))
        T = type_tree(U)
        for x in T.nodes:
            down = T.down_set(x)
            assert T.is_chain(down)
            assert sorted(y.level for y in down) == list(range(x.level + 1))


def test_vertex_node_and_meets():
    P = path3()
    assert vertex_node(P, 2).members == (2,)
    assert meet_level(P, 1, 2) == 0
    K = complete_graph(3)
    assert meet_level(K, 1, 2) == 1


def test_pure_order_shape_is_constant():
    U = pure_order(5)
    codes = {meet_closure_shape(U, c) for c in itertools.combinations(range(5), 2)}
    assert len(codes) == 1


def test_shape_distinguishes_branching_levels():
    # copies {0,2} and {1,2}: the first branches at level 0 only, the second also at level 1
    P = path3()
    assert meet_closure_shape(P, [0, 2]) != meet_closure_shape(P, [1, 2])


def test_shape_rejects_bad_copies():
    with pytest.raises(InputError):
        meet_closure_shape(path3(), [2, 1])
    with pytest.raises(InputError):
        meet_closure_shape(path3(), [])
