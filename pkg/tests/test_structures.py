import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from typeramsey import _accel
from typeramsey.errors import InputError
from typeramsey.fixtures import GRAPH, RH, complete_graph, edgeless, path3, random_graph, random_structure, tournament3
from typeramsey.structures import (
    EMBEDDING,
    MONOMORPHISM,
    Embedding,
    HereditaryFamily,
    Language,
    Structure,
    all_structures,
    contains_copy,
    enumerate_embeddings,
    family_member,
    induced_substructure,
    initial_segment,
    is_embedding,
    is_irreducible,
    structure,
)


def naive_embeddings(A, B, monotone=True):
    """Direct transcription of the definition, no pruning."""
    gen = itertools.combinations(range(B.size), A.size) if monotone else itertools.permutations(range(B.size), A.size)
    out = []
    for vm in gen:
        ok = True
        for name, arity in A.language.relations:
            for t in itertools.product(range(A.size), repeat=arity):
                if (t in A[name]) != (tuple(vm[x] for x in t) in B[name]):
                    ok = False
        if ok:
            out.append(tuple(vm))
    return out


def naive_monomorphism(F, A):
    for vm in itertools.permutations(range(A.size), F.size):
        if all(tuple(vm[x] for x in t) in A[n] for n, t in F.tuples()):
            return True
    return False


def test_language_validation():
    with pytest.raises(InputError):
        Language.of(E=0)
    with pytest.raises(InputError):
        Language((("E", 2), ("E", 3)))
    assert Language.of(E=2, H=3).width == 2
    assert Language.of(U=1).width == 0
    assert Language.of().max_arity == 0


def test_structure_validation():
    with pytest.raises(InputError, match="outside"):
        structure(GRAPH, 2, E=[(0, 2)])
    with pytest.raises(InputError, match="length"):
        structure(GRAPH, 2, E=[(0, 1, 1)])
    with pytest.raises(InputError, match="unknown"):
        Structure(GRAPH, 2, {"R": frozenset()})
    with pytest.raises(InputError):
        Structure(GRAPH, 10_000)


def test_structures_hash_and_compare_by_value():
    a = structure(GRAPH, 2, E=[(0, 1)])
    b = structure(GRAPH, 2, E={(0, 1)})
    assert a == b and hash(a) == hash(b)
    assert a != structure(GRAPH, 2, E=[(1, 0)])


def test_embedding_counts():
    assert len(enumerate_embeddings(complete_graph(2), complete_graph(3))) == 3
    assert [e.vertex_map for e in enumerate_embeddings(complete_graph(2), path3())] == [(0, 1), (1, 2)]
    assert len(enumerate_embeddings(Structure(GRAPH, 0), path3())) == 1


def test_embeddings_match_naive_oracle(rng):
    for _ in range(40):
        A = random_graph(rng, rng.randint(0, 3))
        B = random_graph(rng, rng.randint(0, 6))
        assert [e.vertex_map for e in enumerate_embeddings(A, B)] == naive_embeddings(A, B)


def test_embedding_rejects_non_embeddings():
    with pytest.raises(InputError):
        Embedding(complete_graph(2), path3(), (0, 2))
    with pytest.raises(InputError):
        Embedding(complete_graph(2), complete_graph(3), (1, 0))
    assert is_embedding(complete_graph(2), complete_graph(3), (1, 0), monotone=False)


def test_compose():
    e = Embedding(complete_graph(2), complete_graph(3), (0, 2))
    f = Embedding(complete_graph(3), complete_graph(4), (1, 2, 3))
    assert e.compose(f).vertex_map == (1, 3)


def test_irreducible():
    assert is_irreducible(complete_graph(3))
    assert not is_irreducible(path3())
    assert is_irreducible(tournament3())
    loopless_pair = structure(GRAPH, 2, E=[(0, 1)])
    assert is_irreducible(loopless_pair)
    isolated = Structure(GRAPH, 1)
    assert not is_irreducible(isolated)
    assert is_irreducible(isolated, distinct_only=True)


def test_reducible_forbidden_warns():
    with pytest.warns(UserWarning):
        HereditaryFamily(GRAPH, (path3(),))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        HereditaryFamily(GRAPH, (path3(),), MONOMORPHISM)


def test_substructures():
    P = path3()
    assert induced_substructure(P, [0, 2]) == edgeless(2)
    assert initial_segment(P, 2) == complete_graph(2)
    with pytest.raises(InputError):
        induced_substructure(P, [2, 0])


def test_family_membership_matches_oracle(rng, kernel_path):
    K3 = complete_graph(3)
    emb = HereditaryFamily(GRAPH, (K3,))
    for _ in range(60):
        A = random_graph(rng, rng.randint(0, 6), 0.5)
        assert family_member(emb, A) == (not naive_embeddings(K3, A))
    F = structure(RH, 4, R=[(1, 0), (1, 2), (1, 3)], H=[(0, 2, 3)])
    mono = HereditaryFamily(RH, (F,), MONOMORPHISM)
    for _ in range(60):
        A = random_structure(rng, RH, rng.randint(3, 5), 0.35)
        assert family_member(mono, A) == (not naive_monomorphism(F, A))


def test_kernel_paths_agree(rng):
    for _ in range(150):
        F = random_graph(rng, rng.randint(1, 3), 0.6, loops=True)
        G = random_graph(rng, rng.randint(0, 6), 0.5, loops=True)
        fd, fo = F.dense
        td, to = G.dense
        for mono in (True, False):
            args = (F.size, G.size, np.array([2]), fd, fo, td, to, mono, mono)
            expect = bool(naive_embeddings(F, G)) if mono else naive_monomorphism(F, G)
            assert _accel._copy_exists_np(*args) == expect
            assert _accel._copy_exists_py(*args) == expect
            if _accel.USE_NUMBA:
                assert _accel._copy_exists_nb(*args) == expect


def test_contains_copy_modes():
    # a directed 2-path contains the edge as a monomorphism but the order matters for embeddings
    back = structure(GRAPH, 2, E=[(1, 0)])
    assert contains_copy(structure(GRAPH, 2, E=[(0, 1)]), back, MONOMORPHISM)
    assert not contains_copy(structure(GRAPH, 2, E=[(0, 1)]), back, EMBEDDING)


def test_all_structures_counts():
    assert sum(1 for _ in all_structures(GRAPH, 2)) == 16
    assert sum(1 for _ in all_structures(GRAPH, 3, loops=False)) == 64


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**12 - 1))
def test_composition_of_embeddings(mask):
    pairs = [(i, j) for i in range(4) for j in range(4) if i != j]
    G = structure(GRAPH, 4, E=[p for k, p in enumerate(pairs) if mask >> k & 1])
    for e in enumerate_embeddings(initial_segment(G, 2), G):
        for f in enumerate_embeddings(G, G):
            assert is_embedding(e.source, f.target, e.compose(f).vertex_map)
