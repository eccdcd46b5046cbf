"""Brute-force reference implementations.

Everything here enumerates paths, subsets or DAG extensions directly from
the definitions and shares no search code with the fast path. Only suitable
for small graphs; used by the test-suite and the ``oracle`` CLI command.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import chain, combinations
from typing import Iterator

import numpy as np

from adjopt.errors import UsageError
from adjopt.graph import NodeSet, Pdag, list_dag_extensions, node_set, require_disjoint

MAX_FREE_NODES = 16


class _G:
    """Plain adjacency view of a Pdag."""

    def __init__(self, g: Pdag):
        self.g = g
        self.order = g.index
        self.out = {v: set() for v in g.nodes}
        self.inn = {v: set() for v in g.nodes}
        self.und = {v: set() for v in g.nodes}
        for a, b in g.directed:
            self.out[a].add(b)
            self.inn[b].add(a)
        for a, b in g.undirected:
            self.und[a].add(b)
            self.und[b].add(a)

    def nbrs(self, v):
        return sorted(self.out[v] | self.inn[v] | self.und[v], key=self.order.__getitem__)

    def adjacent(self, a, b):
        return b in self.out[a] or b in self.inn[a] or b in self.und[a]

    def points(self, a, b):
        """Is there an edge ``a -> b``?"""
        return b in self.out[a]

    def descendants(self, s):
        seen, stack = set(s), list(s)
        while stack:
            v = stack.pop()
            for w in self.out[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen


def simple_paths(g: Pdag, sources, targets, proper=False) -> Iterator[tuple[str, ...]]:
    """All simple paths from a source to a target. ``proper`` keeps other sources off the path."""
    w = _G(g)
    src, tgt = set(sources), set(targets)

    def extend(path):
        last = path[-1]
        if len(path) > 1 and last in tgt:
            yield path
        for n in w.nbrs(last):
            if n in path or (proper and n in src):
                continue
            yield from extend(path + (n,))

    for s in sorted(src, key=w.order.__getitem__):
        yield from extend((s,))


def possibly_directed(w: _G, path) -> bool:
    return not any(w.points(path[j], path[i]) for j in range(len(path)) for i in range(j))


def directed(w: _G, path) -> bool:
    return all(w.points(a, b) for a, b in zip(path, path[1:]))


def brute_possde(g: Pdag, s) -> set[str]:
    w = _G(g)
    s = set(node_set(g, s))
    out = set(s)
    for p in simple_paths(g, s, set(g.nodes)):
        if possibly_directed(w, p):
            out.add(p[-1])
    return out


def brute_possan(g: Pdag, s) -> set[str]:
    w = _G(g)
    s = set(node_set(g, s))
    out = set(s)
    for p in simple_paths(g, set(g.nodes) - s, s):
        if possibly_directed(w, p):
            out.add(p[0])
    return out


def brute_causal_nodes(g: Pdag, x, y, possible: bool) -> set[str]:
    w = _G(g)
    x, y = set(x), set(y)
    test = possibly_directed if possible else directed
    out = set()
    for p in simple_paths(g, x, y, proper=True):
        if test(w, p):
            out.update(p[1:])
    return out


def brute_forbidden(g: Pdag, x, y) -> set[str]:
    return brute_possde(g, brute_causal_nodes(g, x, y, True)) | set(x)


def brute_amenable(g: Pdag, x, y) -> bool:
    w = _G(g)
    for p in simple_paths(g, x, y, proper=True):
        if possibly_directed(w, p) and not w.points(p[0], p[1]):
            return False
    return True


def definite_status(w: _G, path) -> bool:
    for u, v, x in zip(path, path[1:], path[2:]):
        if w.points(u, v) and w.points(x, v):
            continue
        if w.points(v, u) or w.points(v, x):
            continue
        if u in w.und[v] and x in w.und[v] and not w.adjacent(u, x):
            continue
        return False
    return True


def blocked(w: _G, path, z) -> bool:
    z = set(z)
    for u, v, x in zip(path, path[1:], path[2:]):
        if w.points(u, v) and w.points(x, v):
            if not (w.descendants({v}) & z):
                return True
        elif v in z:
            return True
    return False


def brute_valid(g: Pdag, x, y, z) -> bool:
    """Adjustment criterion evaluated path by path."""
    w = _G(g)
    if not brute_amenable(g, x, y):
        return False
    if set(z) & brute_forbidden(g, x, y):
        return False
    for p in simple_paths(g, x, y, proper=True):
        if not possibly_directed(w, p) and definite_status(w, p) and not blocked(w, p, z):
            return False
    return True


def _subsets(items):
    return chain.from_iterable(combinations(items, k) for k in range(len(items) + 1))


def all_valid_adjustment_sets(g: Pdag, x, y) -> list[NodeSet]:
    """Every valid adjustment set, by exhaustive subset search."""
    x, y = node_set(g, x), node_set(g, y)
    require_disjoint(x=x, y=y)
    free = [v for v in g.nodes if v not in x and v not in y]
    if len(free) > MAX_FREE_NODES:
        raise UsageError(f"{len(free)} candidate nodes exceed the cap of {MAX_FREE_NODES}")
    return [tuple(z) for z in _subsets(free) if brute_valid(g, x, y, z)]


def bayes_ball(dag: Pdag, x, y, z) -> bool:
    """d-separation in a DAG by the reachable-set algorithm."""
    w = _G(dag)
    z = set(z)
    anz = set()
    stack = list(z)
    while stack:
        v = stack.pop()
        if v not in anz:
            anz.add(v)
            stack.extend(w.inn[v])
    # states: (node, arrived_from_child)
    todo = [(v, True) for v in x]
    seen = set()
    y = set(y)
    while todo:
        v, up = todo.pop()
        if (v, up) in seen:
            continue
        seen.add((v, up))
        if v in y and v not in z:
            return False
        if up and v not in z:
            todo.extend((p, True) for p in w.inn[v])
            todo.extend((c, False) for c in w.out[v])
        elif not up:
            if v not in z:
                todo.extend((c, False) for c in w.out[v])
            if v in anz:
                todo.extend((p, True) for p in w.inn[v])
    return True


def dsep_by_extension(g: Pdag, x, y, z=(), limit: int = 12) -> bool:
    x, y, z = node_set(g, x), node_set(g, y), node_set(g, z)
    require_disjoint(x=x, y=y, z=z)
    if not x or not y:
        return True
    return all(bayes_ball(d, x, y, z) for d in list_dag_extensions(g, limit=limit))


def valid_in_every_extension(g: Pdag, x, y, z, limit: int = 12) -> bool:
    """Z satisfies the DAG criterion (no forbidden node, back-door paths blocked) in each DAG of the class."""
    for d in list_dag_extensions(g, limit=limit):
        if not brute_valid(d, x, y, z):
            return False
    return True


@dataclass
class OptimalityReport:
    optimal: NodeSet
    table: list[tuple[NodeSet, np.ndarray]] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def brute_optimality(sem, x, y, rtol: float = 1e-9, strict: bool = True) -> OptimalityReport:
    """Asymptotic variance of every valid set; checks that the optimal set attains the minimum.

    ``strict`` turns a violation into an ``AssertionError`` that carries the SEM.
    """
    from adjopt.adjustment import optimal_set
    from adjopt.sem import avar_from_cov, covariance, serialize_sem

    g = sem.graph
    x, y = node_set(g, x), node_set(g, y)
    o = optimal_set(g, x, y)
    sets = all_valid_adjustment_sets(g, x, y)
    cov = covariance(sem)
    rep = OptimalityReport(o)
    for z in sets:
        rep.table.append((z, avar_from_cov(cov, x, y, z).values))
    if not sets:
        return rep
    if o not in sets:
        rep.violations.append(f"optimal set {o} is not valid although valid sets exist")
    else:
        ao = avar_from_cov(cov, x, y, o).values
        for z, az in rep.table:
            if np.any(ao > az * (1 + rtol)):
                rep.violations.append(f"avar({z}) < avar({o})")
    if strict and rep.violations:
        raise AssertionError("; ".join(rep.violations) + "\n" + serialize_sem(sem))
    return rep

