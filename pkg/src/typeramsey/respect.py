"""Type-respecting embeddings and bounded family-type-respecting checks.

Finite approximation semantics used throughout: a plus-embedding
``h: A+ -> B+`` approximates ``g: A' -> B'`` when ``g`` agrees with the base
map on ``A`` and every increasing tuple of ``A' \\ A`` is sent to a tuple of
``B' \\ B`` whose weak type over ``B`` is the ``h``-image of its weak type
over ``A``.  For a given ``A'`` this pins down ``B = B' restricted to
B ∪ g[A']`` completely (mixed tuples come from ``h``, tuples among new
vertices come from ``A'``), and a hereditary class may always shrink ``B'``
to that part.  The check therefore only has to decide whether the forced
structure lies in the class, which makes every negative verdict certified.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Any, Iterator, Sequence

from .errors import InputError, Unsupported
from .structures import (
    EMBEDDING,
    Embedding,
    HereditaryFamily,
    Structure,
    enumerate_embeddings,
    family_member,
    initial_segment,
    is_irreducible,
)
from .weaktypes import (
    NodeData,
    PlusEmbedding,
    PlusMap,
    PlusStructure,
    layer,
    layer_universe,
    restrict,
    tv_index,
    weak_type_of_tuple,
)

HOLDS = "HOLDS"
FAILS = "FAILS"
INCONCLUSIVE = "INCONCLUSIVE"

LEAF_BUDGET = int(os.environ.get("TYPERAMSEY_LEAF_BUDGET", "200000"))


@dataclass
class CheckOutcome:
    verdict: str
    witness: Any = None
    depth_used: int = 0
    search_bound: int | None = None
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in (HOLDS, FAILS, INCONCLUSIVE):
            raise ValueError(f"bad verdict {self.verdict}")
        if self.verdict == FAILS and self.witness is None:
            raise ValueError("FAILS must carry a witness")

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    @property
    def fails(self) -> bool:
        return self.verdict == FAILS


# type-respecting embeddings of structures -----------------------------------

def required_nodes(B: Structure, image: Sequence[int], level: int, width: int) -> dict[int, set]:
    """Depth -> nodes (over ``B(<level)``) of weak types of increasing tuples of
    image vertices strictly above ``level``."""
    above = [x for x in image if x > level]
    need: dict[int, set] = {d: set() for d in range(1, width + 1)}
    for k in range(1, width + 1):
        for tup in itertools.combinations(above, k):
            T = weak_type_of_tuple(B, level, tup)
            for d in range(1, k + 1):
                need[d].add(T.restrict(d))
    return need


def type_respecting_witness(h: Embedding) -> dict[int, tuple[int, ...]] | None:
    """For every source vertex ``v`` a base map of a plus-embedding
    ``A(<v)+ -> B(<h(v))+`` covering the required weak types, or None."""
    A, B = h.source, h.target
    w = A.language.width
    out = {}
    for v in range(A.size):
        hv = h.vertex_map[v]
        need = required_nodes(B, h.vertex_map, hv, w)
        src, dst = initial_segment(A, v), initial_segment(B, hv)
        found = None
        for e in enumerate_embeddings(src, dst):
            probe = PlusEmbedding(src, dst, e.vertex_map)
            if all(len({probe.pullback(M) for M in need[d]}) == len(need[d]) for d in need):
                found = e.vertex_map
                break
        if found is None:
            return None
        out[v] = found
    return out


def is_type_respecting(h: Embedding) -> bool:
    return type_respecting_witness(h) is not None


def covering_plus_embedding(h: Embedding, v: int, base_map: Sequence[int]) -> PlusEmbedding:
    """A concrete ``h^v`` with the given base map realising the coverage."""
    A, B = h.source, h.target
    hv = h.vertex_map[v]
    src, dst = initial_segment(A, v), initial_segment(B, hv)
    probe = PlusEmbedding(src, dst, base_map)
    overrides = {}
    for d, nodes in required_nodes(B, h.vertex_map, hv, A.language.width).items():
        for M in nodes:
            N = probe.pullback(M)
            overrides[(d, restrict(N, d))] = frozenset(e for e in layer(M, d) if e not in probe.transport(N))
    return probe.with_overrides(overrides)


# bounded family-type-respecting check ---------------------------------------

def sound_cutoff(h: PlusMap, K: HereditaryFamily) -> int:
    """Extensions with this many new vertices already decide the check.

    A forbidden copy in the forced structure must meet a base vertex outside
    the image (otherwise it is a copy inside ``A'``), so it uses at most
    ``|F| - 1`` new vertices; restricting ``A'`` to those keeps the copy."""
    if not K.forbidden or set(h.base_map) == set(range(h.target.size)):
        return 0
    return max(K.max_forbidden_size - 1, 0)


def forced_extension(h: PlusMap, A2: Structure, nodes: dict | None = None) -> Structure:
    """The structure ``B ∪ g[A2 \\ A]`` forced by ``h`` for the extension ``A2``."""
    A, B = h.source, h.target
    a, b = A.size, B.size
    if initial_segment(A2, a) != A:
        raise InputError("extension does not have the source structure as initial segment")
    m = A2.size - a
    w = A.language.width
    rels: dict[str, set] = {n: set(B[n]) for n in B.language.names}
    for name in A.language.names:
        for t in A2[name]:
            if all(x >= a for x in t):
                rels[name].add(tuple(x - a + b for x in t))
    for k in range(1, min(w, m) + 1):
        for tup in itertools.combinations(range(a, a + m), k):
            N = nodes[tup] if nodes is not None else weak_type_of_tuple(A2, a, tup).mixed
            img = layer(h.image(N, k), k)
            for name, t in img:
                rels[name].add(tuple(x if x >= 0 else tup[tv_index(x)] - a + b for x in t))
    return Structure(B.language, b + m, {k2: frozenset(v) for k2, v in rels.items()})


def _placements(F: Structure, K: HereditaryFamily, b: int, m: int, outside: set) -> Iterator[dict]:
    """Maps of F's vertices into ``0..b-1`` (base) and ``b..b+m-1`` (new) using
    all new vertices and at least one base vertex outside the image."""
    j = F.size - m
    if K.mode == EMBEDDING:
        for X in itertools.combinations(range(b), j):
            if outside.intersection(X):
                yield {**{i: X[i] for i in range(j)}, **{j + i: b + i for i in range(m)}}
        return
    for base_part in itertools.combinations(range(F.size), j):
        rest = [x for x in range(F.size) if x not in base_part]
        for X in itertools.permutations(range(b), j):
            if not outside.intersection(X):
                continue
            for order in itertools.permutations(rest):
                phi = dict(zip(base_part, X))
                phi.update({x: b + i for i, x in enumerate(order)})
                yield phi


class _Budget(Exception):
    pass


def _search_extension(h: PlusMap, K: HereditaryFamily, m: int, budget: list) -> Structure | None:
    """First extension by ``m`` vertices that lies in K while its forced image
    does not, or None."""
    A, B = h.source, h.target
    b = B.size
    w = A.language.width
    lang = A.language
    outside = set(range(b)) - set(h.base_map)
    positions = [tup for k in range(1, min(w, m) + 1) for tup in itertools.combinations(range(m), k)]
    for F in K.forbidden:
        if F.size - m < 1:
            continue
        for phi in _placements(F, K, b, m, outside):
            img_vertices = set(phi.values())
            inv = {y: x for x, y in phi.items()}
            required: dict[tuple, set] = {}
            forbidden_: dict[tuple, set] = {}
            new_only: dict[str, set] = {n: set() for n in lang.names}
            ok = True
            for name, arity in lang.relations:
                Fr = F[name]
                for t in itertools.product(sorted(img_vertices), repeat=arity):
                    present = tuple(inv[x] for x in t) in Fr
                    if not present and K.mode != EMBEDDING:
                        continue
                    news = sorted({x for x in t if x >= b})
                    if not news:
                        if (t in B[name]) != present:
                            ok = False
                            break
                    elif len(news) == len(set(t)):
                        if present:
                            new_only[name].add(tuple(x - b for x in t))
                    else:
                        pos = tuple(x - b for x in news)
                        pattern = (name, tuple(x if x < b else -1 - news.index(x) for x in t))
                        (required if present else forbidden_).setdefault(pos, set()).add(pattern)
                if not ok:
                    break
            if not ok:
                continue
            found = _choose_nodes(h, K, m, positions, required, forbidden_, new_only, budget)
            if found is not None:
                return found
    return None


def _choose_nodes(h, K, m, positions, required, forbidden_, new_only, budget):
    A = h.source
    a = A.size
    lang = A.language
    cand_cache = {}

    def candidates(k: int, parent: NodeData, pos) -> list[NodeData]:
        key = (k, parent, pos)
        if key not in cand_cache:
            req = required.get(pos, set())
            bad = forbidden_.get(pos, set())
            out = []
            for r in range(len(layer_universe(lang, a, k)) + 1):
                for extra in itertools.combinations(layer_universe(lang, a, k), r):
                    N = parent | frozenset(extra)
                    img = layer(h.image(N, k), k)
                    if req <= img and not (bad & img):
                        out.append(N)
            cand_cache[key] = out
        return cand_cache[key]

    chosen: dict[tuple, NodeData] = {}

    def build() -> Structure:
        rels = {n: set(A[n]) for n in lang.names}
        for name, ts in new_only.items():
            for t in ts:
                rels[name].add(tuple(x + a for x in t))
        for pos, N in chosen.items():
            k = len(pos)
            for name, t in layer(N, k):
                rels[name].add(tuple(x if x >= 0 else a + pos[tv_index(x)] for x in t))
        return Structure(lang, a + m, {k2: frozenset(v) for k2, v in rels.items()})

    def rec(i: int):
        if i == len(positions):
            budget[0] -= 1
            if budget[0] < 0:
                raise _Budget
            A2 = build()
            if family_member(K, A2):
                nodes = {tuple(a + x for x in pos): N for pos, N in chosen.items()}
                if not family_member(K, forced_extension(h, A2, nodes)):
                    return A2
            return None
        pos = positions[i]
        k = len(pos)
        parent = chosen[pos[:-1]] if k > 1 else frozenset()
        for N in candidates(k, parent, pos):
            chosen[pos] = N
            res = rec(i + 1)
            if res is not None:
                return res
        chosen.pop(pos, None)
        return None

    return rec(0)


def is_family_type_respecting(h: PlusMap, K: HereditaryFamily, depth: int,
                              leaf_budget: int | None = None) -> CheckOutcome:
    """Bounded check that ``h`` is K-type-respecting.

    FAILS carries the first extension ``A'`` (fewest new vertices first) whose
    forced image leaves K; HOLDS once ``depth`` reaches the sound cutoff."""
    if depth < 0:
        raise InputError("depth must be non-negative")
    if not family_member(K, h.source) or not family_member(K, h.target):
        raise InputError("source and target of the plus-embedding must lie in the family")
    cutoff = sound_cutoff(h, K)
    bound = h.target.size + min(depth, cutoff)
    budget = [LEAF_BUDGET if leaf_budget is None else leaf_budget]
    try:
        for m in range(1, min(depth, cutoff) + 1):
            A2 = _search_extension(h, K, m, budget)
            if A2 is not None:
                return CheckOutcome(FAILS, A2, depth, bound,
                                    {"forced_extension": forced_extension(h, A2), "new_vertices": m})
    except _Budget:
        return CheckOutcome(INCONCLUSIVE, None, depth, bound, {"reason": "leaf budget exhausted", "cutoff": cutoff})
    if depth >= cutoff:
        return CheckOutcome(HOLDS, None, depth, bound, {"cutoff": cutoff})
    return CheckOutcome(INCONCLUSIVE, None, depth, bound, {"reason": "depth below sound cutoff", "cutoff": cutoff})


def all_structures_family(language) -> HereditaryFamily:
    return HereditaryFamily(language, (), EMBEDDING)


# transfer for binary languages ---------------------------------------------

def _check_binary_family(K: HereditaryFamily):
    if K.language.max_arity > 2:
        raise Unsupported("the transfer is only defined for unary and binary languages")
    if K.mode != EMBEDDING or not all(is_irreducible(F) for F in K.forbidden):
        raise InputError("the transfer needs an embedding-mode family of irreducible structures")


def f_image_nodes(f: PlusMap, depth: int = 1) -> set:
    return {f.image(N, depth) for N in PlusStructure(f.source).nodes(depth)}


def prop1_transfer(f: PlusMap, f2: PlusMap, g: PlusMap, K: HereditaryFamily) -> PlusEmbedding:
    """Build ``g'`` from ``g``: keep ``g`` on the image of ``f``, send every
    other type to its extension with no tuple through the new vertex."""
    _check_binary_family(K)
    B, B2 = f.target, f2.target
    if g.source != B or g.target != B2 or f.source != f2.source:
        raise InputError("maps do not form an amalgamation configuration")
    if B2.size != B.size + 1 or initial_segment(B2, B.size) != B:
        raise InputError("the second target must be the first plus one maximal vertex")
    if tuple(g.base_map) != tuple(range(B.size)):
        raise InputError("g must be the identity on base vertices")
    if not f.then(g).agrees_with(f2):
        raise InputError("g ∘ f differs from f'")
    overrides = {}
    if B.language.width >= 1:
        for t in f_image_nodes(f, 1):
            overrides[(1, t)] = g.layer_extra(1, t)
    return PlusEmbedding(B, B2, tuple(range(B.size)), (), overrides)


def one_point_extension(A2: Structure, insert_after: int, plus_data: dict | None = None,
                        segment: Structure | None = None) -> Structure:
    """Insert a vertex ``v = insert_after + 1``.

    ``segment`` (optional) is the new initial segment on ``0..v``; it must
    restrict to ``A2`` below ``v``.  ``plus_data`` maps ``(name, u, "out")`` to
    membership of ``(v, u)`` and ``(name, u, "in")`` to membership of
    ``(u, v)`` for later vertices ``u`` (numbered as in ``A2``)."""
    plus_data = plus_data or {}
    v = insert_after + 1
    if not 0 <= v <= A2.size:
        raise InputError(f"cannot insert after position {insert_after}")
    for key, val in plus_data.items():
        if (not isinstance(key, tuple) or len(key) != 3 or key[2] not in ("in", "out")
                or key[0] not in A2.language.names or A2.language.arity(key[0]) != 2
                or not v <= key[1] < A2.size or not isinstance(val, bool)):
            raise InputError(f"malformed plus_data entry {key!r}: {val!r}")
    shift = lambda x: x if x < v else x + 1  # noqa: E731
    rels = {n: {tuple(map(shift, t)) for t in A2[n]} for n in A2.language.names}
    if segment is not None:
        if segment.size != v + 1 or initial_segment(segment, v) != initial_segment(A2, v):
            raise InputError("segment must extend the initial segment of A2 by one vertex")
        for n in A2.language.names:
            rels[n] |= {t for t in segment[n] if v in t}
    for (name, u, direction), present in sorted(plus_data.items()):
        if present:
            rels[name].add((v, u + 1) if direction == "out" else (u + 1, v))
    return Structure(A2.language, A2.size + 1, {k: frozenset(t) for k, t in rels.items()})


def transfer_extension(A2: Structure, g2: PlusMap) -> Structure:
    """The structure built in the correctness argument of the transfer: the
    new vertex follows ``B`` and links to later vertices as ``g2`` prescribes."""
    B, B2 = g2.source, g2.target
    b = B.size
    if initial_segment(A2, b) != B:
        raise InputError("A2 must have the source of g2 as initial segment")
    data = {}
    for u in range(b, A2.size):
        T = weak_type_of_tuple(A2, b, (u,))
        img = layer(g2.image(T.restrict(1), 1), 1)
        for name, t in img:
            if b in t and len(t) == 2:
                data[(name, u, "out" if t[0] == b else "in")] = True
    return one_point_extension(A2, b - 1, data, B2)
