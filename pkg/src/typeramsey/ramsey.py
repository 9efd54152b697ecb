"""Arrow relations by exhaustive colouring search, finite degrees, shape colourings.

Only finite structures are handled; ``finite_degree`` is the finite analogue
of a big Ramsey degree with ``B = C`` and says nothing about infinite ones.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Sequence

import numpy as np

from . import _accel
from .errors import BudgetExceeded, InputError
from .respect import FAILS, HOLDS, INCONCLUSIVE, CheckOutcome, is_family_type_respecting, is_type_respecting
from .structures import Embedding, HereditaryFamily, Structure, enumerate_embeddings, family_member, initial_segment
from .typetrees import meet_closure_shape
from .weaktypes import plus_embedding_count, plus_embeddings

DEFAULT_BUDGET = int(os.environ.get("TYPERAMSEY_BUDGET", str(1 << 26)))


@dataclass
class Coloring:
    domain: list
    k: int
    assignment: tuple[int, ...]

    def __post_init__(self):
        self.assignment = tuple(int(c) for c in self.assignment)
        if len(self.assignment) != len(self.domain):
            raise InputError("a colouring must colour every domain element")
        if any(not 0 <= c < self.k for c in self.assignment):
            raise InputError(f"colours must lie in 0..{self.k - 1}")

    def __call__(self, i: int) -> int:
        return self.assignment[i]


@dataclass
class ArrowResult:
    holds: bool
    witness_coloring: Coloring | None = None
    colorings_checked: int = 0
    detail: dict = field(default_factory=dict)


@lru_cache(maxsize=None)
def canonical_count(n: int, k: int) -> int:
    """Colourings of ``n`` items with at most ``k`` colours up to renaming colours."""
    return sum(_stirling2(n, j) for j in range(min(n, k) + 1))


@lru_cache(maxsize=None)
def _stirling2(n: int, j: int) -> int:
    if n == j:
        return 1
    if j == 0 or j > n:
        return 0
    return j * _stirling2(n - 1, j) + _stirling2(n - 1, j - 1)


def decode(index: int, ndom: int, k: int) -> tuple[int, ...]:
    """Base-``k`` digits of ``index``, domain element 0 most significant."""
    out = []
    for _ in range(ndom):
        out.append(index % k)
        index //= k
    return tuple(reversed(out))


def _pad(rows: Sequence[Sequence[int]]) -> np.ndarray:
    width = max((len(r) for r in rows), default=0)
    arr = np.full((len(rows), width), -1, dtype=np.int64)
    for i, r in enumerate(rows):
        arr[i, :len(r)] = r
    return arr


def _scan(copies: np.ndarray, ndom: int, k: int, l: int, jobs: int) -> tuple[int, int]:
    total = k ** ndom
    if jobs <= 1 or total < 1 << 16:
        return _accel.first_bad_coloring(copies, ndom, k, l)
    step = -(-total // jobs)
    bounds = [(s, min(total, s + step)) for s in range(0, total, step)]
    with ProcessPoolExecutor(jobs) as pool:
        parts = list(pool.map(_accel.first_bad_coloring, [copies] * len(bounds), [ndom] * len(bounds),
                              [k] * len(bounds), [l] * len(bounds), [a for a, _ in bounds], [b for _, b in bounds]))
    # lowest bad index wins; count only what a sequential scan would have seen
    checked = 0
    for bad, c in parts:
        checked += c
        if bad >= 0:
            return bad, checked
    return -1, checked


def search_colorings(domain: list, copies: Sequence[Sequence[int]], k: int, l: int,
                     budget: int | None = None, jobs: int = 1) -> ArrowResult:
    """Does every ``k``-colouring of ``domain`` leave some copy (a list of
    domain indices) with at most ``l`` colours?"""
    if k < 1 or l < 0:
        raise InputError("need k >= 1 and l >= 0")
    budget = DEFAULT_BUDGET if budget is None else budget
    ndom = len(domain)
    leaves = canonical_count(ndom, k)
    if leaves > budget:
        raise BudgetExceeded(f"{leaves} colourings up to symmetry exceed the budget {budget}")
    bad, checked = _scan(_pad(copies), ndom, k, l, jobs)
    if bad < 0:
        return ArrowResult(True, None, checked)
    return ArrowResult(False, Coloring(domain, k, decode(bad, ndom, k)), checked, {"index": bad})


def replay(coloring: Coloring, copies: Sequence[Sequence[int]], l: int) -> bool:
    """True if the colouring defeats every copy (each sees more than ``l`` colours)."""
    return all(len({coloring(i) for i in c}) > l for c in copies)


def copies_of(C: Structure, B: Structure, A: Structure) -> tuple[list[Embedding], list[list[int]]]:
    domain = enumerate_embeddings(A, C)
    index = {e.vertex_map: i for i, e in enumerate(domain)}
    inner = enumerate_embeddings(A, B)
    copies = []
    for f in enumerate_embeddings(B, C):
        copies.append(sorted(index[tuple(f.vertex_map[x] for x in e.vertex_map)] for e in inner))
    return domain, copies


def arrows(C: Structure, B: Structure, A: Structure, k: int, l: int, budget: int | None = None,
           jobs: int = 1) -> ArrowResult:
    domain, copies = copies_of(C, B, A)
    res = search_colorings(domain, copies, k, l, budget, jobs)
    res.detail.update(domain=len(domain), copies=len(copies))
    return res


def finite_degree(C: Structure, A: Structure, k: int, budget: int | None = None, jobs: int = 1) -> int:
    domain, copies = copies_of(C, C, A)
    for l in range(len(domain) + 1):
        if search_colorings(domain, copies, k, l, budget, jobs).holds:
            return l
    return len(domain)


# type-respecting arrows -----------------------------------------------------

def type_respecting_domain(C: Structure, A: Structure, K: HereditaryFamily, depth: int,
                           limit: int | None = None) -> tuple[list, bool]:
    """Pairs ``(c, h)`` with ``h: A+ -> (C restricted to 0..c-1)+`` K-type-respecting.

    The flag reports whether some membership test was inconclusive."""
    limit = DEFAULT_BUDGET if limit is None else limit
    out, unsure = [], False
    for c in range(C.size + 1):
        seg = initial_segment(C, c)
        if plus_embedding_count(A, seg) > limit:
            raise BudgetExceeded(f"too many plus-embeddings into the segment of length {c}")
        for h in plus_embeddings(A, seg, limit):
            res = is_family_type_respecting(h, K, depth)
            if res.holds:
                out.append((c, h))
            elif not res.fails:
                unsure = True
    return out, unsure


def _contained(c: int, h, image: Sequence[int]) -> bool:
    top = max(image) + 1 if image else 0
    return set(h.base_map) <= set(image) and (c in image or c == top)


def arrows_type_respecting(C: Structure, B: Structure, A: Structure, k: int, l: int, K: HereditaryFamily,
                           depth: int, budget: int | None = None, strict: bool = False,
                           jobs: int = 1) -> CheckOutcome:
    """Arrow relation with the K-type-respecting colour domain.

    A domain element ``(c, h)`` lies in the copy ``f(B)`` when the base image
    of ``h`` is inside ``f[B]`` and the cut ``c`` is a vertex of ``f[B]`` or
    sits right above it.  With ``strict`` the copy ``f`` must also be
    K-type-respecting on every initial segment (all covering maps pass)."""
    for name, S in (("C", C), ("B", B), ("A", A)):
        if not family_member(K, S):
            raise InputError(f"{name} is not in the family")
    domain, unsure = type_respecting_domain(C, A, K, depth, budget)
    fs = [f for f in enumerate_embeddings(B, C) if is_type_respecting(f)]
    if strict:
        fs = [f for f in fs if _strictly_respecting(f, K, depth)]
    copies = [[i for i, (c, h) in enumerate(domain) if _contained(c, h, f.vertex_map)] for f in fs]
    res = search_colorings(domain, copies, k, l, budget, jobs)
    detail: dict[str, Any] = {"domain": len(domain), "copies": len(copies), "colorings_checked": res.colorings_checked}
    if res.holds:
        return CheckOutcome(INCONCLUSIVE if unsure else HOLDS, None, depth, None, detail)
    if unsure:
        detail["candidate_coloring"] = res.witness_coloring
        return CheckOutcome(INCONCLUSIVE, None, depth, None, detail)
    return CheckOutcome(FAILS, res.witness_coloring, depth, None, detail)


def _strictly_respecting(f: Embedding, K: HereditaryFamily, depth: int) -> bool:
    from .respect import covering_plus_embedding, type_respecting_witness
    wit = type_respecting_witness(f)
    if wit is None:
        return False
    return all(is_family_type_respecting(covering_plus_embedding(f, v, bm), K, depth).holds
               for v, bm in wit.items())


# shape colourings -----------------------------------------------------------

def sierpinski_coloring(U: Structure, A: Structure) -> Coloring:
    """Colour each copy of ``A`` by the shape of the meet closure of its
    nodes; colours are numbered by first appearance."""
    domain = enumerate_embeddings(A, U)
    palette: dict = {}
    assignment = []
    for e in domain:
        code = meet_closure_shape(U, e.vertex_map) if A.size else ()
        assignment.append(palette.setdefault(code, len(palette)))
    return Coloring(domain, max(len(palette), 1), tuple(assignment))
