"""Quantifier-free 1-types over initial segments and the tree they form."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .errors import InputError
from .structures import Structure

STAR = -1  # the distinguished vertex of a 1-type shape


@dataclass(frozen=True)
class OneType:
    level: int
    shape: frozenset
    members: tuple[int, ...]

    @property
    def key(self) -> tuple[int, int]:
        return self.level, self.members[0]


def type_shape(U: Structure, u: int, n: int) -> frozenset:
    """Tuples over ``{0..n-1, u}`` that mention ``u``, with ``u`` renamed to STAR."""
    allowed = set(range(n))
    allowed.add(u)
    out = []
    for name, t in U.tuples():
        if u in t and all(x in allowed for x in t):
            out.append((name, tuple(STAR if x == u else x for x in t)))
    return frozenset(out)


def same_type(U: Structure, u: int, v: int, n: int) -> bool:
    if n < 0 or min(u, v) < n or max(u, v) >= U.size:
        raise InputError(f"same_type needs min(u, v) >= n >= 0 with vertices in range, got u={u}, v={v}, n={n}")
    return type_shape(U, u, n) == type_shape(U, v, n)


def one_type_classes(U: Structure, n: int) -> list[OneType]:
    if not 0 <= n <= U.size:
        raise InputError(f"level {n} outside 0..{U.size}")
    groups: dict[frozenset, list[int]] = {}
    for v in range(n, U.size):
        groups.setdefault(type_shape(U, v, n), []).append(v)
    return sorted((OneType(n, s, tuple(m)) for s, m in groups.items()), key=lambda x: x.members[0])


@dataclass(frozen=True)
class TypeTree:
    structure: Structure
    nodes: tuple[OneType, ...]

    def leq(self, x: OneType, y: OneType) -> bool:
        return x.level <= y.level and set(x.members) >= set(y.members)

    def down_set(self, x: OneType) -> list[OneType]:
        return [y for y in self.nodes if self.leq(y, x)]

    def parent(self, x: OneType) -> OneType | None:
        below = [y for y in self.down_set(x) if y != x]
        return max(below, key=lambda y: y.level) if below else None

    def levels(self) -> dict[int, list[OneType]]:
        out: dict[int, list[OneType]] = {}
        for x in self.nodes:
            out.setdefault(x.level, []).append(x)
        return out

    def is_chain(self, xs: Sequence[OneType]) -> bool:
        return all(self.leq(a, b) or self.leq(b, a) for a, b in itertools.combinations(xs, 2))


def type_tree(U: Structure) -> TypeTree:
    nodes = [x for n in range(U.size + 1) for x in one_type_classes(U, n)]
    return TypeTree(U, tuple(nodes))


def vertex_node(U: Structure, v: int) -> OneType:
    """The node of ``v``: its class over its own predecessors."""
    for x in one_type_classes(U, v):
        if v in x.members:
            return x
    raise AssertionError("unreachable")


def meet_level(U: Structure, u: int, v: int) -> int:
    """Largest ``j <= min(u, v)`` with ``u ~_j v``; -1 if the two nodes have no
    common lower bound."""
    for j in range(min(u, v), -1, -1):
        if type_shape(U, u, j) == type_shape(U, v, j):
            return j
    return -1


def meet_closure_shape(U: Structure, copy: Sequence[int]) -> tuple:
    """Isomorphism-invariant code of the meet closure of the nodes of ``copy``.

    One entry per closure node, ordered by (level rank, least copy position
    above the node): ``(level_rank, parent_entry, copy_position, context)``
    where ``copy_position`` is -1 for pure meet nodes and ``context`` is the
    node's 1-type restricted to copy vertices below its level, written with
    copy positions.
    """
    copy = tuple(copy)
    if not copy or any(not 0 <= v < U.size for v in copy) or list(copy) != sorted(set(copy)):
        raise InputError(f"copy {copy} must be a nonempty increasing vertex list")
    # node key: (level, least member of the class)
    classes: dict[tuple[int, int], OneType] = {}

    def node_at(v: int, j: int) -> tuple[int, int]:
        for x in one_type_classes(U, j):
            if v in x.members:
                classes[x.key] = x
                return x.key
        raise AssertionError("unreachable")

    closure = {node_at(v, v) for v in copy}
    for u, v in itertools.combinations(copy, 2):
        j = meet_level(U, u, v)
        if j >= 0:
            closure.add(node_at(u, j))

    def above(key) -> list[int]:
        return [i for i, v in enumerate(copy) if v in classes[key].members]

    level_rank = {lv: r for r, lv in enumerate(sorted({k[0] for k in closure}))}
    order = sorted(closure, key=lambda k: (k[0], min(above(k))))
    index = {k: i for i, k in enumerate(order)}
    pos = {v: i for i, v in enumerate(copy)}
    code = []
    for k in order:
        x = classes[k]
        below = [b for b in order if b != k and b[0] < k[0] and set(classes[b].members) >= set(x.members)]
        parent = index[max(below)] if below else -1
        own = [i for i, v in enumerate(copy) if k == (v, v)]
        context = sorted((name, tuple(STAR if e == STAR else pos[e] for e in t))
                         for name, t in x.shape if all(e == STAR or e in pos for e in t))
        code.append((level_rank[k[0]], parent, own[0] if own else -1, tuple(context)))
    return tuple(code)
