#!/usr/bin/env python3
"""Time the numba kernels against the numpy fallbacks.

Numba functions are called once before timing so compilation is excluded.
Both paths must agree on every workload; a mismatch aborts the run.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]
"""

import argparse
import json
import random
import time

import numpy as np

from typeramsey import _accel
from typeramsey.fixtures import complete_graph, random_graph
from typeramsey.ramsey import _pad, copies_of


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return out, min(times)


def copy_workloads(rng):
    # (label, F, target, monotone/reflect)
    out = []
    for n in (8, 10, 12):
        G = random_graph(rng, n, 0.5)
        out.append((f"K3 in G({n}, 1/2), embedding", complete_graph(3), G, True))
        out.append((f"K4 in G({n}, 1/2), monomorphism", complete_graph(4), G, False))
    return out


def coloring_workloads():
    out = []
    for c, b, a, k, l in ((5, 3, 2, 2, 1), (6, 3, 2, 2, 1), (5, 4, 2, 2, 1), (4, 3, 1, 3, 2)):
        domain, copies = copies_of(complete_graph(c), complete_graph(b), complete_graph(a))
        out.append((f"K{c} -> (K{b})^K{a}_{{{k},{l}}}", _pad(copies), len(domain), k, l))
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", help="write the results to this file")
    args = p.parse_args()
    if not _accel.USE_NUMBA:
        raise SystemExit("numba is disabled (TYPERAMSEY_DISABLE_NUMBA); nothing to compare")

    rows = []
    for label, F, G, mono in copy_workloads(random.Random(args.seed)):
        fd, fo = F.dense
        td, to = G.dense
        ar = np.array([a for _, a in F.language.relations], dtype=np.int64)
        call = (F.size, G.size, ar, fd, fo, td, to, mono, mono)
        _accel._copy_exists_nb(*call)
        r_nb, t_nb = best_of(lambda: _accel._copy_exists_nb(*call), args.repeat)
        r_np, t_np = best_of(lambda: _accel._copy_exists_np(*call), args.repeat)
        if bool(r_nb) != bool(r_np):
            raise SystemExit(f"kernels disagree on {label}")
        rows.append(("copy_exists", label, t_np, t_nb))

    for label, copies, ndom, k, l in coloring_workloads():
        call = (copies, ndom, k, l, 0, k ** ndom)
        _accel._first_bad_nb(*call)
        r_nb, t_nb = best_of(lambda: _accel._first_bad_nb(*call), args.repeat)
        r_np, t_np = best_of(lambda: _accel._first_bad_np(*call), args.repeat)
        if tuple(r_nb) != tuple(r_np):
            raise SystemExit(f"kernels disagree on {label}: {r_nb} vs {r_np}")
        rows.append(("first_bad_coloring", label, t_np, t_nb))

    print(f"{'kernel':<20} {'workload':<36} {'numpy s':>10} {'numba s':>10} {'speedup':>8}")
    for kernel, label, t_np, t_nb in rows:
        print(f"{kernel:<20} {label:<36} {t_np:>10.5f} {t_nb:>10.5f} {t_np / max(t_nb, 1e-9):>8.1f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump([dict(zip(("kernel", "workload", "numpy_s", "numba_s"), r)) for r in rows], fh, indent=2)


if __name__ == "__main__":
    main()
