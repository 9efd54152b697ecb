"""Finite enumerated relational structures and monotone embeddings.

Vertices are ``0..n-1`` and the linear order is the natural order of the
integers, so it is never stored as tuples.  Embeddings are strictly
increasing maps that preserve and reflect every relation.
"""

from __future__ import annotations

import itertools
import os
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import _accel
from .errors import InputError

MAX_VERTICES = int(os.environ.get("TYPERAMSEY_MAX_VERTICES", "64"))
# read pairs in the irreducibility condition as distinct vertices only
IRREDUCIBLE_DISTINCT_ONLY = os.environ.get("TYPERAMSEY_IRREDUCIBLE_DISTINCT_ONLY", "0") == "1"

EMBEDDING = "embedding"
MONOMORPHISM = "monomorphism"


@dataclass(frozen=True)
class Language:
    relations: tuple[tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple((str(n), int(a)) for n, a in self.relations))
        names = [n for n, _ in self.relations]
        if len(set(names)) != len(names):
            raise InputError(f"duplicate relation names in {names}")
        for name, arity in self.relations:
            if arity < 1:
                raise InputError(f"relation {name!r} has arity {arity} < 1")
            if name in ("<=", "≤"):
                raise InputError("the order symbol is implicit and must not be listed")

    @classmethod
    def of(cls, **arities: int) -> "Language":
        return cls(tuple(arities.items()))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.relations)

    @property
    def max_arity(self) -> int:
        return max((a for _, a in self.relations), default=0)

    @property
    def width(self) -> int:
        """Number of type vertices that can carry structure in a weak type."""
        return max(self.max_arity - 1, 0)

    def arity(self, name: str) -> int:
        for n, a in self.relations:
            if n == name:
                return a
        raise InputError(f"unknown relation symbol {name!r}")


@dataclass(frozen=True)
class Structure:
    """An enumerated structure on ``{0..size-1}``.

    ``relations`` maps each symbol of the language to a frozenset of tuples;
    tuples may repeat vertices.
    """

    language: Language
    size: int
    relations: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        if self.size < 0:
            raise InputError("size must be non-negative")
        if self.size > MAX_VERTICES:
            raise InputError(f"size {self.size} exceeds the vertex cap {MAX_VERTICES}")
        rels = {}
        for name, arity in self.language.relations:
            tuples = frozenset(tuple(int(x) for x in t) for t in self.relations.get(name, ()))
            for t in tuples:
                if len(t) != arity:
                    raise InputError(f"tuple {t} of {name} has length {len(t)}, expected {arity}")
                if any(x < 0 or x >= self.size for x in t):
                    raise InputError(f"tuple {t} of {name} has an entry outside 0..{self.size - 1}")
            rels[name] = tuples
        unknown = set(self.relations) - set(rels)
        if unknown:
            raise InputError(f"unknown relation symbols {sorted(unknown)}")
        object.__setattr__(self, "relations", _FrozenDict(rels))

    def __getitem__(self, name: str) -> frozenset:
        return self.relations[name]

    def __hash__(self):
        return hash((self.language, self.size, tuple(self.relations[n] for n in self.language.names)))

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return (self.language == other.language and self.size == other.size
                and all(self.relations[n] == other.relations[n] for n in self.language.names))

    def __repr__(self):
        rels = ", ".join(f"{n}={sorted(self.relations[n])}" for n in self.language.names)
        return f"Structure(size={self.size}, {rels})"

    @property
    def vertices(self) -> range:
        return range(self.size)

    def tuples(self) -> Iterator[tuple[str, tuple[int, ...]]]:
        for name in self.language.names:
            for t in sorted(self.relations[name]):
                yield name, t

    @cached_property
    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        """Flattened 0/1 relation tables and their offsets, for the kernels."""
        return dense_tables(self.language, self.size, self.relations)


class _FrozenDict(dict):
    def __setitem__(self, key, value):
        raise TypeError("structure relations are immutable")

    def __hash__(self):
        return hash(tuple(sorted(self.items())))


def dense_tables(language: Language, n: int, relations: Mapping[str, Iterable]) -> tuple[np.ndarray, np.ndarray]:
    offsets = [0]
    for _, arity in language.relations:
        offsets.append(offsets[-1] + n ** arity)
    data = np.zeros(offsets[-1], dtype=np.uint8)
    for k, (name, arity) in enumerate(language.relations):
        for t in relations.get(name, ()):
            idx = 0
            for x in t:
                idx = idx * n + x
            data[offsets[k] + idx] = 1
    return data, np.asarray(offsets, dtype=np.int64)


def structure(language: Language, size: int, **relations: Iterable[Sequence[int]]) -> Structure:
    return Structure(language, size, {k: frozenset(map(tuple, v)) for k, v in relations.items()})


def empty_structure(language: Language) -> Structure:
    return Structure(language, 0)


@dataclass(frozen=True)
class Embedding:
    source: Structure
    target: Structure
    vertex_map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertex_map", tuple(self.vertex_map))
        if not is_embedding(self.source, self.target, self.vertex_map):
            raise InputError(f"{self.vertex_map} is not an embedding")

    def __call__(self, v: int) -> int:
        return self.vertex_map[v]

    @property
    def image(self) -> tuple[int, ...]:
        return self.vertex_map

    def compose(self, after: "Embedding") -> "Embedding":
        """``after ∘ self``."""
        return Embedding(self.source, after.target, tuple(after.vertex_map[v] for v in self.vertex_map))


@dataclass(frozen=True)
class HereditaryFamily:
    language: Language
    forbidden: tuple[Structure, ...] = ()
    mode: str = EMBEDDING

    def __post_init__(self):
        object.__setattr__(self, "forbidden", tuple(self.forbidden))
        if self.mode not in (EMBEDDING, MONOMORPHISM):
            raise InputError(f"unknown family mode {self.mode!r}")
        for F in self.forbidden:
            if F.language != self.language:
                raise InputError("forbidden structure over a different language")
            if self.mode == EMBEDDING and not is_irreducible(F):
                warnings.warn(f"forbidden structure {F} is not irreducible", stacklevel=2)

    @property
    def max_forbidden_size(self) -> int:
        return max((F.size for F in self.forbidden), default=0)

    def __contains__(self, A: Structure) -> bool:
        return family_member(self, A)


def _check_same_language(A: Structure, B: Structure):
    if A.language != B.language:
        raise InputError("structures are over different languages")


def _check_vertex_list(S: Structure, vertices: Sequence[int]):
    for i, v in enumerate(vertices):
        if not 0 <= v < S.size:
            raise InputError(f"vertex {v} out of range 0..{S.size - 1}")
        if i and vertices[i - 1] >= v:
            raise InputError(f"vertex list {list(vertices)} is not strictly increasing")


def induced_substructure(S: Structure, vertices: Sequence[int]) -> Structure:
    vertices = tuple(vertices)
    _check_vertex_list(S, vertices)
    index = {v: i for i, v in enumerate(vertices)}
    rels = {}
    for name in S.language.names:
        rels[name] = frozenset(tuple(index[x] for x in t) for t in S[name] if all(x in index for x in t))
    return Structure(S.language, len(vertices), rels)


def initial_segment(A: Structure, v: int) -> Structure:
    """The substructure induced on ``{0..v-1}``."""
    if not 0 <= v <= A.size:
        raise InputError(f"initial segment bound {v} outside 0..{A.size}")
    return induced_substructure(A, range(v))


def is_embedding(A: Structure, B: Structure, vertex_map: Sequence[int], monotone: bool = True) -> bool:
    _check_same_language(A, B)
    if len(vertex_map) != A.size or any(not 0 <= x < B.size for x in vertex_map):
        return False
    if monotone and any(vertex_map[i] >= vertex_map[i + 1] for i in range(len(vertex_map) - 1)):
        return False
    if len(set(vertex_map)) != len(vertex_map):
        return False
    for name in A.language.names:
        image = {tuple(vertex_map[x] for x in t) for t in A[name]}
        if not image <= B[name]:
            return False
        inside = set(vertex_map)
        if sum(1 for t in B[name] if all(x in inside for x in t)) != len(image):
            return False
    return True


def enumerate_embeddings(A: Structure, B: Structure) -> list[Embedding]:
    """All monotone embeddings, in lexicographic order of the vertex map."""
    _check_same_language(A, B)
    out = []
    for vm in _embedding_maps(A, B):
        out.append(Embedding.__new__(Embedding))
        object.__setattr__(out[-1], "source", A)
        object.__setattr__(out[-1], "target", B)
        object.__setattr__(out[-1], "vertex_map", vm)
    return out


def _embedding_maps(A: Structure, B: Structure) -> Iterator[tuple[int, ...]]:
    # Backtracking with per-prefix checks of tuples whose entries are all assigned.
    names = A.language.names
    by_last: list[list[tuple[str, tuple[int, ...], bool]]] = [[] for _ in range(A.size)]
    for name in names:
        arity = A.language.arity(name)
        for t in itertools.product(range(A.size), repeat=arity):
            by_last[max(t)].append((name, t, t in A[name]))
    vm = [0] * A.size

    def extend(i: int, lo: int):
        if i == A.size:
            yield tuple(vm)
            return
        for x in range(lo, B.size - (A.size - i - 1)):
            vm[i] = x
            if all((tuple(vm[y] for y in t) in B[name]) == present for name, t, present in by_last[i]):
                yield from extend(i + 1, x + 1)

    yield from extend(0, 0)


def is_irreducible(A: Structure, distinct_only: bool | None = None) -> bool:
    """Every pair of vertices (including ``u == v`` unless ``distinct_only``)
    occurs together in some tuple."""
    if distinct_only is None:
        distinct_only = IRREDUCIBLE_DISTINCT_ONLY
    covered = set()
    for _, t in A.tuples():
        s = set(t)
        for u in s:
            for v in s:
                covered.add((u, v))
    return all((u, v) in covered for u in A.vertices for v in A.vertices if not (distinct_only and u == v))


def monomorphisms(F: Structure, A: Structure) -> Iterator[tuple[int, ...]]:
    """Injective maps sending every tuple of F to a tuple of A (order ignored)."""
    _check_same_language(F, A)
    for vm in itertools.permutations(range(A.size), F.size):
        if all(tuple(vm[x] for x in t) in A[name] for name, t in F.tuples()):
            yield vm


def contains_copy(F: Structure, A: Structure, mode: str) -> bool:
    _check_same_language(F, A)
    fd, fo = F.dense
    td, to = A.dense
    arities = [a for _, a in F.language.relations]
    monotone = reflect = mode == EMBEDDING
    return _accel.copy_exists(F.size, A.size, arities, fd, fo, td, to, monotone, reflect)


def family_member(K: HereditaryFamily, A: Structure) -> bool:
    if A.language != K.language:
        raise InputError("structure and family are over different languages")
    return not any(contains_copy(F, A, K.mode) for F in K.forbidden)


def all_structures(language: Language, n: int, loops: bool = True) -> Iterator[Structure]:
    """Every structure on ``n`` vertices; exponential, meant for tiny n."""
    universe = [(name, t) for name, arity in language.relations
                for t in itertools.product(range(n), repeat=arity)
                if loops or len(set(t)) == arity]
    for mask in range(1 << len(universe)):
        rels: dict[str, set] = {name: set() for name in language.names}
        for i, (name, t) in enumerate(universe):
            if mask >> i & 1:
                rels[name].add(t)
        yield Structure(language, n, {k: frozenset(v) for k, v in rels.items()})
