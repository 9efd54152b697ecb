"""Weak types, weak types of tuples, plus-structures and their embeddings.

Type vertex ``t_i`` is encoded as the integer ``-1 - i`` inside tuples, so a
mixed tuple such as ``H(0, t0, t1)`` is stored as ``("H", (0, -1, -2))``.

A plus-structure is kept implicit.  Its depth-``d`` nodes are the subsets of
the admissible tuples whose type vertices lie in ``t0..t_{d-1}``; the parent
of a node is its restriction to depth ``d - 1``.  Every subset of that
universe extends to a full weak type, so this is exactly the quotient that
identifies type vertices of weak types agreeing as ``d``-types.

A plus-embedding ``h: A+ -> B+`` is stored as a base embedding plus, for
every layer ``k``, the *extra* tuples of ``h(N)`` that mention a base vertex
of ``B`` outside the image.  Any map of this form preserves the parent
function and preserves/reflects all relations, and every plus-embedding
arises this way, so the representation is faithful.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Mapping, Sequence

from .errors import BudgetExceeded, InputError
from .structures import Language, Structure, enumerate_embeddings, initial_segment, is_embedding

STRICT_TYPE_VERTICES = os.environ.get("TYPERAMSEY_STRICT_TYPE_VERTICES", "0") == "1"
ENUMERATION_LIMIT = int(os.environ.get("TYPERAMSEY_ENUMERATION_LIMIT", str(1 << 20)))

Entry = tuple  # (relation name, tuple of ints; negatives are type vertices)
NodeData = frozenset


def tv(i: int) -> int:
    return -1 - i


def tv_index(x: int) -> int:
    return -1 - x


def render(x: int) -> str:
    return f"t{tv_index(x)}" if x < 0 else str(x)


def entry_depth(entry: Entry) -> int:
    """Number of type vertices an admissible entry uses (its layer)."""
    return max((tv_index(x) + 1 for x in entry[1] if x < 0), default=0)


@lru_cache(maxsize=None)
def layer_universe(language: Language, ell: int, k: int, strict: bool | None = None) -> tuple[Entry, ...]:
    """Admissible tuples over ``{0..ell-1} ∪ {t0..t_{k-1}}`` whose type vertices
    are exactly ``t0..t_{k-1}`` and that contain at least one base vertex."""
    if strict is None:
        strict = STRICT_TYPE_VERTICES
    if k < 1 or ell < 1:
        return ()
    symbols = list(range(ell)) + [tv(i) for i in range(k)]
    want = set(tv(i) for i in range(k))
    out = []
    for name, arity in language.relations:
        for t in itertools.product(symbols, repeat=arity):
            types = [x for x in t if x < 0]
            if set(types) != want or len(types) == arity:
                continue
            if strict and len(types) != len(want):
                continue
            out.append((name, t))
    return tuple(sorted(out))


def universe(language: Language, ell: int, depth: int) -> tuple[Entry, ...]:
    return tuple(e for k in range(1, depth + 1) for e in layer_universe(language, ell, k))


def restrict(data: NodeData, depth: int) -> NodeData:
    return frozenset(e for e in data if entry_depth(e) <= depth)


def layer(data: NodeData, k: int) -> NodeData:
    return frozenset(e for e in data if entry_depth(e) == k)


def _subsets(items: Sequence) -> Iterator[frozenset]:
    for r in range(len(items) + 1):
        for combo in itertools.combinations(items, r):
            yield frozenset(combo)


@dataclass(frozen=True)
class WeakType:
    base: Structure
    mixed: NodeData = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "mixed", frozenset(self.mixed))
        allowed = set(universe(self.base.language, self.base.size, self.width))
        bad = [e for e in self.mixed if e not in allowed]
        if bad:
            raise InputError(f"inadmissible mixed tuples {sorted(bad)}")

    @property
    def level(self) -> int:
        return self.base.size

    @property
    def width(self) -> int:
        return self.base.language.width

    def restrict(self, depth: int) -> NodeData:
        return restrict(self.mixed, depth)

    def node(self, depth: int) -> tuple[int, NodeData]:
        return depth, self.restrict(depth)

    def relation(self, name: str) -> list[tuple]:
        return sorted(t for n, t in self.mixed if n == name)

    def used_depth(self) -> int:
        return max((entry_depth(e) for e in self.mixed), default=0)

    def __repr__(self):
        body = ", ".join(f"{n}={[tuple(map(render, t)) for t in self.relation(n)]}" for n in self.base.language.names)
        return f"WeakType(level={self.level}, {body})"


def enumerate_weak_types(base: Structure, limit: int | None = None) -> list[WeakType]:
    """All weak types extending ``base``: every subset of the admissible tuples.

    Order: by number of mixed tuples, then lexicographically."""
    U = universe(base.language, base.size, base.language.width)
    limit = ENUMERATION_LIMIT if limit is None else limit
    if 2 ** len(U) > limit:
        raise BudgetExceeded(f"{2 ** len(U)} weak types exceed the limit {limit}")
    return [WeakType(base, s) for s in _subsets(U)]


def weak_type_of_tuple(A: Structure, level: int, tup: Sequence[int]) -> WeakType:
    tup = tuple(tup)
    if not 0 <= level <= A.size:
        raise InputError(f"level {level} outside 0..{A.size}")
    if any(not level <= x < A.size for x in tup) or any(tup[i] >= tup[i + 1] for i in range(len(tup) - 1)):
        raise InputError(f"tuple {tup} must be increasing with entries in {level}..{A.size - 1}")
    base = initial_segment(A, level)
    mixed = []
    for k in range(1, min(len(tup), A.language.width) + 1):
        for name, t in layer_universe(A.language, level, k):
            if tuple(tup[tv_index(x)] if x < 0 else x for x in t) in A[name]:
                mixed.append((name, t))
    return WeakType(base, frozenset(mixed))


def agree_as_n_types(T: WeakType, T2: WeakType, n: int) -> bool:
    if T.base != T2.base:
        raise InputError("weak types extend different structures")
    return T.restrict(n) == T2.restrict(n)


# tree of weak types ---------------------------------------------------------

@dataclass(frozen=True)
class WeakTypeTreeNode:
    weak_type: WeakType
    length: int

    @property
    def level(self) -> int:
        return self.weak_type.level

    def contains(self, other: "WeakTypeTreeNode") -> bool:
        """``other ⊆ self`` as structures with types."""
        a, b = other.weak_type, self.weak_type
        return (other.level <= self.level and other.length <= self.length
                and initial_segment(b.base, a.level) == a.base and a.mixed <= b.mixed)


def tree_of_weak_types(U: Structure) -> list[WeakTypeTreeNode]:
    seen = {}
    w = U.language.width
    for ell in range(U.size + 1):
        for k in range(0, w + 1):
            for tup in itertools.combinations(range(ell, U.size), k):
                T = weak_type_of_tuple(U, ell, tup)
                seen.setdefault((T.base, T.mixed, k), WeakTypeTreeNode(T, k))
    return list(seen.values())


# plus-structures --------------------------------------------------------------

@dataclass(frozen=True)
class PlusStructure:
    base: Structure

    @property
    def language(self) -> Language:
        return self.base.language

    @property
    def width(self) -> int:
        return self.base.language.width

    def layer(self, k: int) -> tuple[Entry, ...]:
        return layer_universe(self.language, self.base.size, k)

    def node_count(self, depth: int) -> int:
        return 2 ** len(universe(self.language, self.base.size, depth))

    @property
    def vertex_count(self) -> int:
        return self.base.size + sum(self.node_count(d) for d in range(1, self.width + 1))

    def nodes(self, depth: int, limit: int | None = None) -> Iterator[NodeData]:
        limit = ENUMERATION_LIMIT if limit is None else limit
        if self.node_count(depth) > limit:
            raise BudgetExceeded(f"{self.node_count(depth)} depth-{depth} nodes exceed the limit {limit}")
        yield from _subsets(universe(self.language, self.base.size, depth))

    def children(self, node: NodeData, depth: int) -> Iterator[NodeData]:
        """Depth-``depth`` nodes whose parent is ``node``."""
        for extra in _subsets(self.layer(depth)):
            yield node | extra

    @staticmethod
    def parent(node: NodeData, depth: int) -> NodeData:
        return restrict(node, depth - 1)

    def node_of(self, T: WeakType, depth: int) -> NodeData:
        if T.base != self.base:
            raise InputError("weak type extends a different structure")
        return T.restrict(depth)

    def materialize(self, limit: int | None = None) -> "MaterializedPlus":
        labels: list = list(range(self.base.size))
        index: dict = {}
        parent_of: dict[int, int] = {}
        for d in range(1, self.width + 1):
            for node in sorted(self.nodes(d, limit), key=_node_sort_key):
                index[(d, node)] = len(labels)
                labels.append((d, node))
                parent_of[index[(d, node)]] = index[(d - 1, restrict(node, d - 1))] if d > 1 else index[(d, node)]
        rels: dict[str, set] = {n: set(self.base[n]) for n in self.language.names}
        for (d, node), i in index.items():
            for name, t in layer(node, d):
                rels[name].add(tuple(x if x >= 0 else index[(tv_index(x) + 1, restrict(node, tv_index(x) + 1))]
                                     for x in t))
        return MaterializedPlus(self, tuple(labels), {k: frozenset(v) for k, v in rels.items()}, parent_of)


def _node_sort_key(node: NodeData):
    return len(node), sorted(node)


@dataclass(frozen=True)
class MaterializedPlus:
    plus: PlusStructure
    labels: tuple
    relations: Mapping[str, frozenset]
    parent: Mapping[int, int]

    @property
    def size(self) -> int:
        return len(self.labels)


def plus_structure(base: Structure) -> PlusStructure:
    return PlusStructure(base)


# plus-embeddings ------------------------------------------------------------

class PlusMap:
    """Common interface of plus-embeddings ``A+ -> B+``."""

    source: Structure
    target: Structure
    base_map: tuple[int, ...]

    def layer_extra(self, k: int, node_k: NodeData) -> NodeData:
        raise NotImplementedError

    @property
    def width(self) -> int:
        return self.source.language.width

    def transport(self, data: NodeData) -> NodeData:
        bm = self.base_map
        return frozenset((n, tuple(x if x < 0 else bm[x] for x in t)) for n, t in data)

    def image(self, data: NodeData, depth: int) -> NodeData:
        out = set(self.transport(data))
        for k in range(1, depth + 1):
            out |= self.layer_extra(k, restrict(data, k))
        return frozenset(out)

    def pullback(self, data: NodeData) -> NodeData:
        inv = {y: x for x, y in enumerate(self.base_map)}
        return frozenset((n, tuple(x if x < 0 else inv[x] for x in t)) for n, t in data
                         if all(x < 0 or x in inv for x in t))

    def in_image(self, data: NodeData, depth: int) -> bool:
        return self.image(self.pullback(data), depth) == data

    def apply_weak_type(self, T: WeakType) -> WeakType:
        return WeakType(self.target, self.image(T.mixed, self.width))

    def extra_universe(self, k: int) -> tuple[Entry, ...]:
        image = set(self.base_map)
        return tuple(e for e in layer_universe(self.target.language, self.target.size, k)
                     if any(x >= 0 and x not in image for x in e[1]))

    def then(self, after: "PlusMap") -> "ComposedPlusMap":
        """``after ∘ self``."""
        return ComposedPlusMap(self, after)

    def agrees_with(self, other: "PlusMap", limit: int | None = None) -> bool:
        """Equal as maps on every node of the source plus-structure."""
        if self.base_map != other.base_map or self.source != other.source or self.target != other.target:
            return False
        P = PlusStructure(self.source)
        return all(self.image(N, d) == other.image(N, d)
                   for d in range(1, self.width + 1) for N in P.nodes(d, limit))


@dataclass(frozen=True, eq=False)
class PlusEmbedding(PlusMap):
    source: Structure
    target: Structure
    base_map: tuple[int, ...]
    default: tuple[NodeData, ...] = ()
    overrides: Mapping[tuple[int, NodeData], NodeData] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "base_map", tuple(self.base_map))
        w = self.source.language.width
        default = tuple(frozenset(x) for x in self.default) + (frozenset(),) * (w - len(self.default))
        object.__setattr__(self, "default", default[:w] if w else ())
        object.__setattr__(self, "overrides", {(k, frozenset(n)): frozenset(v) for (k, n), v in self.overrides.items()})
        if self.source.language != self.target.language:
            raise InputError("plus-embedding between different languages")
        if not is_embedding(self.source, self.target, self.base_map):
            raise InputError(f"base map {self.base_map} is not an embedding")
        for k in range(1, w + 1):
            allowed = set(self.extra_universe(k))
            if not self.default[k - 1] <= allowed:
                raise InputError(f"default extras of layer {k} are not admissible extras")
        src_universe = {k: set(universe(self.source.language, self.source.size, k)) for k in range(1, w + 1)}
        for (k, node), extra in self.overrides.items():
            if not 1 <= k <= w or not node <= src_universe[k]:
                raise InputError(f"override key {(k, sorted(node))} is not a depth-{k} node")
            if not extra <= set(self.extra_universe(k)):
                raise InputError(f"override extras for {(k, sorted(node))} are not admissible")

    def layer_extra(self, k: int, node_k: NodeData) -> NodeData:
        return self.overrides.get((k, node_k), self.default[k - 1])

    def with_overrides(self, more: Mapping[tuple[int, NodeData], NodeData]) -> "PlusEmbedding":
        merged = dict(self.overrides)
        merged.update(more)
        return PlusEmbedding(self.source, self.target, self.base_map, self.default, merged)

    def __eq__(self, other):
        if not isinstance(other, PlusMap):
            return NotImplemented
        return self.agrees_with(other)

    __hash__ = object.__hash__


@dataclass(frozen=True, eq=False)
class ComposedPlusMap(PlusMap):
    first: PlusMap
    second: PlusMap

    def __post_init__(self):
        if self.first.target != self.second.source:
            raise InputError("cannot compose: target and source differ")

    @property
    def source(self):
        return self.first.source

    @property
    def target(self):
        return self.second.target

    @property
    def base_map(self):
        return tuple(self.second.base_map[x] for x in self.first.base_map)

    def layer_extra(self, k: int, node_k: NodeData) -> NodeData:
        img = self.second.image(self.first.image(node_k, k), k)
        own = self.transport(node_k)
        return frozenset(e for e in img if entry_depth(e) == k and e not in own)


def plus_embedding_count(A: Structure, B: Structure) -> int:
    total = 0
    w = A.language.width
    for e in enumerate_embeddings(A, B):
        probe = PlusEmbedding(A, B, e.vertex_map)
        count = 1
        for k in range(1, w + 1):
            count *= 2 ** (len(probe.extra_universe(k)) * 2 ** len(universe(A.language, A.size, k)))
        total += count
    return total


def plus_embeddings(Aplus: PlusStructure | Structure, Bplus: PlusStructure | Structure,
                    limit: int | None = None) -> Iterator[PlusEmbedding]:
    """Every plus-embedding, each with explicit extras on every node."""
    A = Aplus.base if isinstance(Aplus, PlusStructure) else Aplus
    B = Bplus.base if isinstance(Bplus, PlusStructure) else Bplus
    if A.language != B.language:
        raise InputError("plus-structures over different languages")
    limit = ENUMERATION_LIMIT if limit is None else limit
    if plus_embedding_count(A, B) > limit:
        raise BudgetExceeded(f"more than {limit} plus-embeddings")
    w = A.language.width
    for e in enumerate_embeddings(A, B):
        probe = PlusEmbedding(A, B, e.vertex_map)
        slots = [(k, N) for k in range(1, w + 1) for N in _subsets(universe(A.language, A.size, k))]
        choices = [list(_subsets(probe.extra_universe(k))) for k, _ in slots]
        for pick in itertools.product(*choices):
            yield PlusEmbedding(A, B, e.vertex_map, overrides=dict(zip(slots, pick)))


def identity_plus(A: Structure) -> PlusEmbedding:
    return PlusEmbedding(A, A, tuple(range(A.size)))


def is_plus_embedding_map(source: Structure, target: Structure, base_map: Sequence[int],
                          node_map: Mapping[tuple[int, NodeData], NodeData]) -> bool:
    """Check an explicit node table against the definition directly.

    Used as an independent check of the normal form: parent preservation,
    injectivity per depth and preservation/reflection of every relation
    tuple among base vertices and image nodes."""
    if not is_embedding(source, target, base_map):
        return False
    inv = {y: x for x, y in enumerate(base_map)}
    for (d, N), M in node_map.items():
        if d > 1 and node_map.get((d - 1, restrict(N, d - 1))) != restrict(M, d - 1):
            return False
        for k in range(1, d + 1):
            src = layer(N, k)
            img = {e for e in layer(M, k) if all(x < 0 or x in inv for x in e[1])}
            back = {(n, tuple(x if x < 0 else inv[x] for x in t)) for n, t in img}
            if src != back:
                return False
    for d in range(1, source.language.width + 1):
        images = [M for (dd, _), M in node_map.items() if dd == d]
        if len(set(images)) != len(images):
            return False
    return True
