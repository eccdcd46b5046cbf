"""Compare the compiled and pure-Python search kernels.

    python benchmarks/bench_kernels.py [--sizes 50,100,200] [--repeat 5]

Times each kernel on random DAGs (converted to CPDAGs, so undirected edges
are present) and then an end-to-end validity check that runs on top of the
kernels. Prints one row per (size, workload) with the speed-up.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from adjopt import _kernels_py, kernels
from adjopt.adjustment import is_valid_adjustment, optimal_set
from adjopt.estimation import Rng
from adjopt.graph import Pdag, cpdag_of, de
from adjopt.simbench import random_dag

try:
    from adjopt import _kernels as _compiled
except ImportError:  # pragma: no cover
    _compiled = None

NAMES = ("forward_states", "backward_states", "directed_reach", "open_walk")


def _use(impl) -> None:
    for name in NAMES:
        setattr(kernels, name, getattr(impl, name))


def _workloads(g: Pdag, gen: np.random.Generator):
    p = len(g.nodes)
    src = (gen.random(p) < 0.05).astype(np.uint8)
    src[0] = 1
    tgt = (gen.random(p) < 0.05).astype(np.uint8)
    tgt[-1] = 1
    tgt &= 1 - src
    z = ((gen.random(p) < 0.2) & (src == 0) & (tgt == 0)).astype(np.uint8)
    adj = g.adj
    return {
        "forward_states": lambda k: k.forward_states(adj, src, src, True),
        "backward_states": lambda k: k.backward_states(adj, tgt, src, True),
        "directed_reach": lambda k: k.directed_reach(adj, src, False),
        "open_walk": lambda k: k.open_walk(adj, src, tgt, z, k.directed_reach(adj, z, True), src, True),
    }


def _pick_xy(dag: Pdag, gen: np.random.Generator):
    for _ in range(200):
        x = dag.nodes[int(gen.integers(len(dag.nodes)))]
        below = [v for v in de(dag, x) if v != x]
        if below:
            return x, below[int(gen.integers(len(below)))]
    return None


def _time(fn, repeat: int) -> float:
    number = max(1, int(0.2 / max(timeit.timeit(fn, number=1), 1e-6)))
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="50,100,200")
    ap.add_argument("--nbr", type=float, default=4.0)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)
    if _compiled is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")

    print(f"{'p':>5}  {'workload':<18}{'python (ms)':>13}{'cython (ms)':>13}{'speed-up':>10}")
    for p in (int(s) for s in args.sizes.split(",")):
        gen = Rng(args.seed, p).generator()
        dag = random_dag(p, args.nbr, "erdos_renyi", gen)
        g = cpdag_of(dag)
        rows = []
        for name, call in _workloads(g, gen).items():
            rows.append((name, _time(lambda: call(_kernels_py), args.repeat), _time(lambda: call(_compiled), args.repeat)))
        xy = _pick_xy(dag, gen)
        if xy is not None:
            x, y = xy

            def end_to_end():
                fresh = Pdag(dag.nodes, dag.directed)  # empty memo each call
                is_valid_adjustment(fresh, x, y, optimal_set(fresh, x, y), witness=False)

            timed = []
            for impl in (_kernels_py, _compiled):
                _use(impl)
                timed.append(_time(end_to_end, args.repeat))
            rows.append(("optimal+validity", *timed))
        for name, t_py, t_c in rows:
            print(f"{p:>5}  {name:<18}{t_py * 1e3:>13.3f}{t_c * 1e3:>13.3f}{t_py / t_c:>9.1f}x")
    _use(_compiled)


if __name__ == "__main__":
    main()
