"""Type-respecting amalgamation: instance checks, binary sweeps, counterexample."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator

from .errors import BudgetExceeded, InputError
from .respect import (
    FAILS,
    HOLDS,
    INCONCLUSIVE,
    CheckOutcome,
    all_structures_family,
    forced_extension,
    is_family_type_respecting,
    prop1_transfer,
)
from .structures import (
    MONOMORPHISM,
    HereditaryFamily,
    Language,
    Structure,
    all_structures,
    family_member,
    induced_substructure,
    initial_segment,
    structure,
)
from .weaktypes import (
    PlusEmbedding,
    PlusMap,
    PlusStructure,
    WeakType,
    layer,
    tv,
    weak_type_of_tuple,
)

CANDIDATE_LIMIT = 4096
COMPLETION_LIMIT = 4096


@dataclass
class AmalgamationInstance:
    K: HereditaryFamily
    A: Structure
    B: Structure
    B2: Structure
    f: PlusMap
    f2: PlusMap
    g: PlusMap
    weak_types: dict = field(default_factory=dict)

    def validate_shape(self):
        """Structural clauses; raises InputError naming the violated one."""
        A, B, B2 = self.A, self.B, self.B2
        if B2.size != B.size + 1:
            raise InputError("clause B' \\ B = {max B'} violated")
        if initial_segment(B2, B.size) != B:
            raise InputError("clause B' restricted to B equals B violated")
        for name, s in (("A", A), ("B", B), ("B'", B2)):
            if not family_member(self.K, s):
                raise InputError(f"clause {name} in K violated")
        if (self.f.source, self.f.target) != (A, B) or (self.f2.source, self.f2.target) != (A, B2):
            raise InputError("clause f: A+ -> B+, f': A+ -> B'+ violated")
        if (self.g.source, self.g.target) != (B, B2):
            raise InputError("clause g: B+ -> B'+ violated")
        if tuple(self.g.base_map) != tuple(range(B.size)):
            raise InputError("clause g restricted to B is the identity violated")
        if not self.f.then(self.g).agrees_with(self.f2):
            raise InputError("clause g ∘ f = f' violated")


def validate_instance(inst: AmalgamationInstance, depth: int) -> dict[str, CheckOutcome]:
    inst.validate_shape()
    out = {
        "f": is_family_type_respecting(inst.f, inst.K, depth),
        "f'": is_family_type_respecting(inst.f2, inst.K, depth),
        "g": is_family_type_respecting(inst.g, all_structures_family(inst.K.language), depth),
    }
    for name, res in out.items():
        if res.fails:
            clause = "type-respecting" if name == "g" else "K-type-respecting"
            raise InputError(f"clause {name} is {clause} violated (witness {res.witness})")
    return out


def forced_layer_extras(inst: AmalgamationInstance) -> dict:
    """Layer extras every admissible g' must use on nodes in the image of f."""
    f, f2 = inst.f, inst.f2
    forced = {}
    w = inst.K.language.width
    for d in range(1, w + 1):
        for N in PlusStructure(inst.A).nodes(d):
            M = f.image(N, d)
            target = f2.image(N, d)
            forced[(d, M)] = frozenset(e for e in layer(target, d) if e not in M)
    return forced


def candidate_count(inst: AmalgamationInstance) -> int:
    forced = forced_layer_extras(inst)
    probe = PlusEmbedding(inst.B, inst.B2, tuple(range(inst.B.size)))
    total = 1
    for d in range(1, inst.K.language.width + 1):
        free = PlusStructure(inst.B).node_count(d) - sum(1 for (k, _) in forced if k == d)
        total *= 2 ** (len(probe.extra_universe(d)) * free)
    return total


def enumerate_candidates(inst: AmalgamationInstance, limit: int = CANDIDATE_LIMIT) -> Iterator[PlusEmbedding]:
    """Every g' with g' ∘ f = f' and identity base map."""
    if candidate_count(inst) > limit:
        raise BudgetExceeded("too many candidate transfers")
    forced = forced_layer_extras(inst)
    probe = PlusEmbedding(inst.B, inst.B2, tuple(range(inst.B.size)))
    slots = [(d, M) for d in range(1, inst.K.language.width + 1)
             for M in PlusStructure(inst.B).nodes(d) if (d, M) not in forced]
    choices = [[frozenset(c) for r in range(len(probe.extra_universe(d)) + 1)
                for c in itertools.combinations(probe.extra_universe(d), r)] for d, _ in slots]
    for pick in itertools.product(*choices):
        ov = dict(forced)
        ov.update(zip(slots, pick))
        yield probe.with_overrides(ov)


def certify_failure(inst: AmalgamationInstance, depth: int, max_tuples: int = 3,
                    max_extensions: int = 200000) -> CheckOutcome | None:
    """Search an extension A' of B on which every admissible g' fails.

    Realised depth-1 types must lie in the image of f (their g'-image is then
    forced); deeper unforced types are completed in every possible way."""
    K, B, B2 = inst.K, inst.B, inst.B2
    lang = K.language
    b = B.size
    w = lang.width
    forced = forced_layer_extras(inst)
    probe = PlusEmbedding(B, B2, tuple(range(b)))
    probe_forced = probe.with_overrides(forced)
    depth1_forced = {M for (d, M) in forced if d == 1}
    cutoff = max(K.max_forbidden_size - 1, 0)
    seen = 0
    for m in range(1, min(depth, cutoff) + 1):
        verts = range(b + m)
        uni = sorted((n, t) for n, ar in lang.relations for t in itertools.product(verts, repeat=ar)
                     if any(x >= b for x in t))
        for r in range(0, max_tuples + 1):
            for combo in itertools.combinations(uni, r):
                seen += 1
                if seen > max_extensions:
                    return None
                rels = {n: set(B[n]) for n in lang.names}
                for n, t in combo:
                    rels[n].add(t)
                A2 = Structure(lang, b + m, {k: frozenset(v) for k, v in rels.items()})
                if w >= 1 and any(weak_type_of_tuple(A2, b, (u,)).restrict(1) not in depth1_forced
                                  for u in range(b, b + m)):
                    continue
                if not family_member(K, A2):
                    continue
                res = _all_completions_fail(probe_forced, forced, K, A2, b, m, w)
                if res is not None:
                    return CheckOutcome(FAILS, A2, depth, b + 1 + m,
                                        {"completions": res, "new_vertices": m, "certified": True})
    return None


def _all_completions_fail(probe_forced, forced, K, A2, b, m, w):
    free = []
    for k in range(2, min(w, m) + 1):
        for tup in itertools.combinations(range(b, b + m), k):
            M = weak_type_of_tuple(A2, b, tup).restrict(k)
            if (k, M) not in forced and (k, M) not in free:
                free.append((k, M))
    options = [[frozenset(c) for r in range(len(probe_forced.extra_universe(k)) + 1)
                for c in itertools.combinations(probe_forced.extra_universe(k), r)] for k, _ in free]
    total = 1
    for o in options:
        total *= len(o)
    if total > COMPLETION_LIMIT:
        return None
    for pick in itertools.product(*options):
        g2 = probe_forced.with_overrides(dict(zip(free, pick)))
        if family_member(K, forced_extension(g2, A2)):
            return None
    return total


def check_instance(inst: AmalgamationInstance, depth: int, candidate_limit: int = CANDIDATE_LIMIT) -> CheckOutcome:
    validation = validate_instance(inst, depth)
    downgraded = any(r.verdict == INCONCLUSIVE for r in validation.values())
    detail = {"validation": {k: v.verdict for k, v in validation.items()}}
    candidates: list[tuple[str, PlusMap]] = [("g", inst.g)]
    if K_is_binary(inst.K):
        candidates.append(("prop1_transfer", prop1_transfer(inst.f, inst.f2, inst.g, inst.K)))
    tried = []
    for label, cand in candidates:
        res = is_family_type_respecting(cand, inst.K, depth)
        tried.append((label, res.verdict))
        if res.holds:
            verdict = INCONCLUSIVE if downgraded else HOLDS
            return CheckOutcome(verdict, cand, depth, res.search_bound, {**detail, "certificate": label, "tried": tried})
    try:
        failures = []
        for i, cand in enumerate(enumerate_candidates(inst, candidate_limit)):
            res = is_family_type_respecting(cand, inst.K, depth)
            if res.holds:
                verdict = INCONCLUSIVE if downgraded else HOLDS
                return CheckOutcome(verdict, cand, depth, res.search_bound,
                                    {**detail, "certificate": f"candidate {i}", "tried": tried})
            if not res.fails:
                failures = None
                break
            failures.append(res.witness)
        if failures is not None:
            detail.update(tried=tried, candidates=len(failures))
            return CheckOutcome(INCONCLUSIVE if downgraded else FAILS, failures, depth, None, detail)
    except BudgetExceeded:
        pass
    cert = certify_failure(inst, depth)
    if cert is not None:
        cert.detail.update(detail, tried=tried)
        if downgraded:
            return CheckOutcome(INCONCLUSIVE, cert.witness, depth, cert.search_bound, cert.detail)
        return cert
    return CheckOutcome(INCONCLUSIVE, None, depth, None, {**detail, "tried": tried})


def K_is_binary(K: HereditaryFamily) -> bool:
    from .structures import EMBEDDING, is_irreducible
    return K.language.max_arity <= 2 and K.mode == EMBEDDING and all(is_irreducible(F) for F in K.forbidden)


# binary sweep ---------------------------------------------------------------

def _node_maps(probe: PlusEmbedding, nodes: list, cap: int, rng: random.Random) -> Iterator[PlusEmbedding]:
    """Depth-1 extra assignments on ``nodes``: all of them if there are at
    most ``cap``, otherwise the two uniform extremes plus seeded samples."""
    X = probe.extra_universe(1)
    subsets = [frozenset(c) for r in range(len(X) + 1) for c in itertools.combinations(X, r)]
    if len(subsets) ** len(nodes) <= cap:
        for pick in itertools.product(subsets, repeat=len(nodes)):
            yield probe.with_overrides({(1, N): p for N, p in zip(nodes, pick)})
        return
    for p in (subsets[0], subsets[-1]):
        yield probe.with_overrides({(1, N): p for N in nodes})
    for _ in range(max(cap - 2, 0)):
        yield probe.with_overrides({(1, N): rng.choice(subsets) for N in nodes})


def binary_instances(K: HereditaryFamily, max_size: int, depth: int = 3, symmetric: bool = True,
                     loops: bool = False, cap: int = 8, seed: int = 0) -> Iterator[AmalgamationInstance]:
    """Amalgamation instances over K with ``|B'| <= max_size``.

    Structures range over every labelled member of K (optionally only
    symmetric / loopless ones); ``A`` ranges over induced substructures of
    ``B`` with the inclusion as base map.  The depth-1 node maps of ``f`` and
    of ``g`` on the image of ``f`` are enumerated in full when there are at
    most ``cap`` of them and sampled otherwise; ``g`` sends all remaining
    nodes either to their extension with no tuple through the new vertex or
    to the one with every such tuple."""
    lang = K.language
    rng = random.Random(seed)
    for n2 in range(1, max_size + 1):
        for B2 in all_structures(lang, n2, loops=loops):
            if symmetric and any(tuple(reversed(t)) not in B2[name] for name, t in B2.tuples()):
                continue
            if not family_member(K, B2):
                continue
            B = initial_segment(B2, n2 - 1)
            for r in range(B.size + 1):
                for sub in itertools.combinations(range(B.size), r):
                    A = induced_substructure(B, sub)
                    A_nodes = list(PlusStructure(A).nodes(1)) if lang.width else []
                    g_probe = PlusEmbedding(B, B2, tuple(range(B.size)))
                    X = g_probe.extra_universe(1) if lang.width else ()
                    rests = [()] + ([(frozenset(X),)] if X else [])
                    for f in _node_maps(PlusEmbedding(A, B, sub), A_nodes, cap, rng):
                        if not is_family_type_respecting(f, K, depth).holds:
                            continue
                        image = sorted({f.image(N, 1) for N in A_nodes}, key=sorted)
                        for g_img in _node_maps(g_probe, image, cap, rng):
                            f2 = f.then(g_img)
                            if not is_family_type_respecting(f2, K, depth).holds:
                                continue
                            for rest in rests:
                                g = PlusEmbedding(B, B2, g_img.base_map, rest, g_img.overrides)
                                yield AmalgamationInstance(K, A, B, B2, f, f2, g)


def check_family_binary(K: HereditaryFamily, size_bound: int, depth: int = 3, **kwargs) -> CheckOutcome:
    """Verify the transfer on every generated instance; any failure would
    contradict the binary amalgamation theorem and is reported as FAILS."""
    if K.language.max_arity > 2:
        from .errors import Unsupported
        raise Unsupported("binary sweep needs a language of arity at most 2")
    count = 0
    for inst in binary_instances(K, size_bound, depth, **kwargs):
        count += 1
        g2 = prop1_transfer(inst.f, inst.f2, inst.g, K)
        problems = []
        if not inst.f.then(g2).agrees_with(inst.f2):
            problems.append("g' ∘ f != f'")
        if tuple(g2.base_map) != tuple(range(inst.B.size)):
            problems.append("g' not identity on B")
        res = is_family_type_respecting(g2, K, depth)
        if not res.holds:
            problems.append(f"bounded check {res.verdict}")
        if problems:
            return CheckOutcome(FAILS if res.fails else INCONCLUSIVE, inst, depth, None,
                                {"instances": count, "problems": problems, "transfer": g2, "check": res})
    return CheckOutcome(HOLDS, None, depth, size_bound, {"instances": count})


# the explicit counterexample -------------------------------------------------

COUNTEREXAMPLE_LANGUAGE = Language.of(E=2, H=3)


def star_structure() -> Structure:
    """The four-vertex structure F exactly as listed (E = {(1,0),(1,2),(1,3)})."""
    return structure(COUNTEREXAMPLE_LANGUAGE, 4, E=[(1, 0), (1, 2), (1, 3)], H=[(0, 2, 3)])


def star_structure_oriented() -> Structure:
    """F with its first edge oriented as (0,1), matching the edge (0,1) of B'
    and the edges (1,t0) of the two-vertex weak types."""
    return structure(COUNTEREXAMPLE_LANGUAGE, 4, E=[(0, 1), (1, 2), (1, 3)], H=[(0, 2, 3)])


def counterexample_family(oriented: bool = True) -> HereditaryFamily:
    F = star_structure_oriented() if oriented else star_structure()
    return HereditaryFamily(COUNTEREXAMPLE_LANGUAGE, (F,), MONOMORPHISM)


def counterexample_instance(oriented: bool = True) -> AmalgamationInstance:
    L = COUNTEREXAMPLE_LANGUAGE
    A = Structure(L, 0)
    B = Structure(L, 1)
    B2 = structure(L, 2, E=[(0, 1)])
    t0, t1 = tv(0), tv(1)
    T_A = WeakType(A)
    T_B = WeakType(B)
    T_B_prime = WeakType(B, {("H", (0, t0, t1))})
    T_B2 = WeakType(B2, {("E", (1, t0))})
    T_B2_prime = WeakType(B2, {("E", (1, t0)), ("H", (0, t0, t1))})
    link = frozenset({("E", (1, t0))})
    f = PlusEmbedding(A, B, ())
    f2 = PlusEmbedding(A, B2, (), (link, frozenset()))
    g = PlusEmbedding(B, B2, (0,), (link, frozenset()))
    types = {"T_A": T_A, "T_B": T_B, "T'_B": T_B_prime, "T_B'": T_B2, "T'_B'": T_B2_prime}
    return AmalgamationInstance(counterexample_family(oriented), A, B, B2, f, f2, g, types)


def paper_counterexample(depth: int = 3, oriented: bool = True) -> tuple[AmalgamationInstance, CheckOutcome]:
    inst = counterexample_instance(oriented)
    return inst, check_instance(inst, depth)
