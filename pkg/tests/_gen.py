"""Random instance generators shared by the test modules."""

from __future__ import annotations

import random

from adjopt.graph import Pdag, cpdag_of, orient_closure
from adjopt.sem import LinearSem


def random_dag(r: random.Random, p: int, density: float = 0.45) -> Pdag:
    nodes = [f"N{i}" for i in range(p)]
    perm = nodes[:]
    r.shuffle(perm)
    edges = [(perm[i], perm[j]) for i in range(p) for j in range(i + 1, p) if r.random() < density]
    return Pdag(tuple(nodes), frozenset(edges))


def random_mpdag(r: random.Random, p: int, density: float = 0.45, bk: float = 0.3) -> Pdag:
    """CPDAG of a random DAG, plus background knowledge taken from that DAG."""
    dag = random_dag(r, p, density)
    g = cpdag_of(dag)
    for a, b in sorted(g.undirected):
        if (a, b) not in g.undirected or r.random() >= bk:
            continue
        t, h = (a, b) if (a, b) in dag.directed else (b, a)
        g = orient_closure(g.orient(t, h))
    return g


def random_sem(r: random.Random, dag: Pdag) -> LinearSem:
    coeff = {e: r.choice((-1, 1)) * r.uniform(0.2, 2.0) for e in sorted(dag.directed)}
    var = {v: r.uniform(0.5, 1.5) for v in dag.nodes}
    return LinearSem(dag, coeff, var)


def split_xyz(r: random.Random, g: Pdag, max_x: int = 2, max_y: int = 2, pz: float = 0.4):
    nodes = list(g.nodes)
    r.shuffle(nodes)
    kx = r.randint(1, min(max_x, len(nodes) - 1))
    x, rest = nodes[:kx], nodes[kx:]
    ky = r.randint(1, min(max_y, len(rest)))
    y, free = rest[:ky], rest[ky:]
    z = [v for v in free if r.random() < pz]
    return x, y, z
