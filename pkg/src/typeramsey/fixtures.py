"""Small named structures and families used by tests, examples and the CLI."""

from __future__ import annotations

import itertools
import random

from .structures import EMBEDDING, MONOMORPHISM, HereditaryFamily, Language, Structure, structure

GRAPH = Language.of(E=2)
ORDER = Language.of()
EH = Language.of(E=2, H=3)
RH = Language.of(R=2, H=3)


def complete_graph(n: int) -> Structure:
    return structure(GRAPH, n, E=[(i, j) for i in range(n) for j in range(n) if i != j])


def edgeless(n: int) -> Structure:
    return Structure(GRAPH, n)


def path3() -> Structure:
    return structure(GRAPH, 3, E=[(0, 1), (1, 0), (1, 2), (2, 1)])


def pure_order(n: int) -> Structure:
    return Structure(ORDER, n)


def triangle_free() -> HereditaryFamily:
    return HereditaryFamily(GRAPH, (complete_graph(3),), EMBEDDING)


def tournament3() -> Structure:
    """The cyclic 3-tournament; irreducible."""
    return structure(GRAPH, 3, E=[(0, 1), (1, 2), (2, 0)])


def star_rh() -> Structure:
    """F over {R, H} with R = {(1,0),(1,2),(1,3)} and H = {(0,2,3)}."""
    return structure(RH, 4, R=[(1, 0), (1, 2), (1, 3)], H=[(0, 2, 3)])


def star_rh_family() -> HereditaryFamily:
    return HereditaryFamily(RH, (star_rh(),), MONOMORPHISM)


def random_graph(rng: random.Random, n: int, p: float = 0.5, loops: bool = False) -> Structure:
    """Random symmetric graph (loopless unless ``loops``)."""
    edges = set()
    for i, j in itertools.combinations_with_replacement(range(n), 2):
        if (i != j or loops) and rng.random() < p:
            edges |= {(i, j), (j, i)}
    return structure(GRAPH, n, E=edges)


def random_structure(rng: random.Random, language: Language, n: int, p: float = 0.3) -> Structure:
    rels = {}
    for name, arity in language.relations:
        rels[name] = [t for t in itertools.product(range(n), repeat=arity) if rng.random() < p]
    return structure(language, n, **rels)
