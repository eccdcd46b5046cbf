"""Partially directed acyclic graphs: parsing, maximality, ancestry and d-separation.

One immutable type, :class:`Pdag`, covers DAGs, CPDAGs and maximal PDAGs.
All queries are pure functions of the graph; derived tables (the edge-code
matrix, ancestry results, the maximality report) are memoised on the
instance.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

from adjopt import kernels
from adjopt.errors import (
    ExtensionLimitError,
    GraphStructureError,
    GraphSyntaxError,
    NotMaximalError,
    OrientationConflictError,
    OverlapError,
    UnknownNodeError,
    UsageError,
)

NodeSet = tuple[str, ...]

NODE_RE = re.compile(r"^[A-Za-z0-9_.]+$")
_EDGE_RE = re.compile(
    r"^(?P<a>[A-Za-z0-9_.]+)\s*(?P<op>->|--)\s*(?P<b>[A-Za-z0-9_.]+)\s*(?::\s*(?P<w>\S+))?$"
)

NONE, OUT, IN, UND = 0, 1, 2, 3

RELATIONS = (
    "parents",
    "children",
    "ancestors",
    "descendants",
    "possible_ancestors",
    "possible_descendants",
)


def _und(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class Pdag:
    """Node-labelled partially directed acyclic graph.

    ``directed`` holds ``(tail, head)`` pairs, ``undirected`` holds pairs with
    lexicographically sorted endpoints.
    """

    nodes: tuple[str, ...]
    directed: frozenset[tuple[str, str]] = frozenset()
    undirected: frozenset[tuple[str, str]] = frozenset()
    _memo: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "directed", frozenset(tuple(e) for e in self.directed))
        object.__setattr__(self, "undirected", frozenset(_und(*e) for e in self.undirected))
        seen = set()
        for v in self.nodes:
            if not isinstance(v, str) or not NODE_RE.match(v):
                raise GraphSyntaxError(f"invalid node label {v!r}")
            if v in seen:
                raise GraphStructureError(f"duplicate node {v}")
            seen.add(v)
        pairs = set()
        for a, b in list(self.directed) + list(self.undirected):
            for v in (a, b):
                if v not in seen:
                    raise UnknownNodeError([v])
            if a == b:
                raise GraphStructureError(f"self-loop on {a}")
            key = _und(a, b)
            if key in pairs:
                raise GraphStructureError(f"more than one edge between {key[0]} and {key[1]}")
            pairs.add(key)
        cycle = _find_cycle(self.nodes, self.directed)
        if cycle:
            raise GraphStructureError("directed cycle: " + " -> ".join(cycle))

    @classmethod
    def from_edges(cls, directed=(), undirected=(), nodes: Iterable[str] = ()) -> "Pdag":
        """Build a graph; node order is ``nodes`` followed by first mention in the edges."""
        order = list(dict.fromkeys(nodes))
        known = set(order)
        for a, b in list(directed) + list(undirected):
            for v in (a, b):
                if v not in known:
                    known.add(v)
                    order.append(v)
        return cls(tuple(order), frozenset(directed), frozenset(undirected))

    # -- structure -----------------------------------------------------------------

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.nodes)}

    @cached_property
    def adj(self) -> np.ndarray:
        """Edge-code matrix: 1 ``i -> j``, 2 ``i <- j``, 3 ``i -- j``, 0 none."""
        p = len(self.nodes)
        m = np.zeros((p, p), dtype=np.int8)
        ix = self.index
        for a, b in self.directed:
            m[ix[a], ix[b]] = OUT
            m[ix[b], ix[a]] = IN
        for a, b in self.undirected:
            m[ix[a], ix[b]] = UND
            m[ix[b], ix[a]] = UND
        m.setflags(write=False)
        return m

    @cached_property
    def _pa(self) -> dict[str, set[str]]:
        out = {v: set() for v in self.nodes}
        for a, b in self.directed:
            out[b].add(a)
        return out

    @cached_property
    def _ch(self) -> dict[str, set[str]]:
        out = {v: set() for v in self.nodes}
        for a, b in self.directed:
            out[a].add(b)
        return out

    @cached_property
    def _nb(self) -> dict[str, set[str]]:
        out = {v: set() for v in self.nodes}
        for a, b in self.undirected:
            out[a].add(b)
            out[b].add(a)
        return out

    @property
    def is_dag(self) -> bool:
        return not self.undirected

    def parents(self, v: str) -> set[str]:
        return set(self._pa[v])

    def children(self, v: str) -> set[str]:
        return set(self._ch[v])

    def undirected_neighbours(self, v: str) -> set[str]:
        return set(self._nb[v])

    def adjacent(self, a: str, b: str) -> bool:
        return self.adj[self.index[a], self.index[b]] != NONE

    def edge(self, a: str, b: str) -> str | None:
        """``'->'``, ``'<-'``, ``'--'`` or ``None`` as seen from ``a``."""
        return {NONE: None, OUT: "->", IN: "<-", UND: "--"}[int(self.adj[self.index[a], self.index[b]])]

    def neighbours(self, v: str) -> list[str]:
        row = self.adj[self.index[v]]
        return [self.nodes[j] for j in np.flatnonzero(row)]

    def orient(self, tail: str, head: str) -> "Pdag":
        """Return a copy with the undirected edge ``tail -- head`` oriented."""
        key = _und(tail, head)
        if key not in self.undirected:
            raise UsageError(f"{tail} -- {head} is not an undirected edge")
        return Pdag(self.nodes, self.directed | {(tail, head)}, self.undirected - {key})

    def sort_nodes(self, s: Iterable[str]) -> NodeSet:
        ix = self.index
        return tuple(sorted(set(s), key=ix.__getitem__))

    def mask(self, s: Iterable[str]) -> np.ndarray:
        m = np.zeros(len(self.nodes), dtype=np.uint8)
        ix = self.index
        for v in s:
            m[ix[v]] = 1
        return m

    def from_mask(self, m) -> NodeSet:
        return tuple(self.nodes[i] for i in np.flatnonzero(m))

    @cached_property
    def has_pd_cycle(self) -> bool:
        """Is some directed edge ``a -> b`` closed into a cycle by a path of ``->``/``--`` edges from ``b`` to ``a``?"""
        if not self.undirected:
            return False
        for a, b in self.directed:
            stack, seen = [b], {b}
            while stack:
                v = stack.pop()
                if v == a:
                    return True
                for w in self._ch[v] | self._nb[v]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
        return False

    @cached_property
    def maximality(self) -> "MaximalityReport":
        return is_maximal(self)

    def __str__(self) -> str:
        return serialize_graph(self)


@dataclass(frozen=True)
class MaximalityReport:
    """Occurrences of the four forbidden induced subgraphs.

    Node tuples use the labels of the patterns: ``a`` is ``(k, i, j)`` for
    ``k -> i -- j``; ``b`` is ``(i, k, j)`` for ``i -> k -> j`` with ``i -- j``;
    ``c`` and ``d`` are ``(i, j, k, l)``.
    """

    is_maximal: bool
    violations: tuple[tuple[str, tuple[str, ...]], ...] = ()


@dataclass(frozen=True)
class PathQueryResult:
    separated: bool
    witness: tuple[str, ...] | None = None


def _find_cycle(nodes, directed) -> list[str] | None:
    ch: dict[str, list[str]] = {v: [] for v in nodes}
    for a, b in directed:
        ch[a].append(b)
    for v in ch:
        ch[v].sort()
    colour = dict.fromkeys(nodes, 0)
    parent: dict[str, str] = {}
    for root in nodes:
        if colour[root]:
            continue
        stack = [(root, iter(ch[root]))]
        colour[root] = 1
        while stack:
            v, it = stack[-1]
            for w in it:
                if colour[w] == 0:
                    colour[w] = 1
                    parent[w] = v
                    stack.append((w, iter(ch[w])))
                    break
                if colour[w] == 1:
                    cyc = [w]
                    u = v
                    while u != w:
                        cyc.append(u)
                        u = parent[u]
                    cyc.append(w)
                    return cyc[::-1]
            else:
                colour[v] = 2
                stack.pop()
    return None


# -- file format ----------------------------------------------------------------------


@dataclass
class GraphSource:
    """Parsed content of a graph or SEM file, before validation."""

    nodes: list[str] = field(default_factory=list)
    directed: dict[tuple[str, str], float | None] = field(default_factory=dict)
    undirected: list[tuple[str, str]] = field(default_factory=list)
    variances: dict[str, float] = field(default_factory=dict)
    families: dict[str, str] = field(default_factory=dict)
    lines: dict[tuple[str, str], int] = field(default_factory=dict)


def _parse_float(tok: str, lineno: int) -> float:
    try:
        val = float(tok)
    except ValueError:
        raise GraphSyntaxError(f"expected a number, got {tok!r}", lineno) from None
    if not np.isfinite(val):
        raise GraphSyntaxError(f"non-finite number {tok!r}", lineno)
    return val


def parse_source(text: str) -> GraphSource:
    """Tokenise a graph/SEM file. Structural checks happen in :func:`parse_graph`."""
    src = GraphSource()
    known: set[str] = set()

    def mention(v: str):
        if v not in known:
            known.add(v)
            src.nodes.append(v)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "node" and len(toks) == 2 and NODE_RE.match(toks[1]):
            mention(toks[1])
            continue
        if toks[0] == "var" and len(toks) == 3 and NODE_RE.match(toks[1]):
            mention(toks[1])
            src.variances[toks[1]] = _parse_float(toks[2], lineno)
            continue
        if toks[0] == "dist" and len(toks) == 3 and NODE_RE.match(toks[1]):
            mention(toks[1])
            src.families[toks[1]] = toks[2]
            continue
        m = _EDGE_RE.match(line)
        if not m:
            raise GraphSyntaxError(f"cannot parse {line!r}", lineno)
        a, op, b, w = m.group("a"), m.group("op"), m.group("b"), m.group("w")
        if a == b:
            raise GraphStructureError(f"line {lineno}: self-loop on {a}")
        mention(a)
        mention(b)
        key = _und(a, b)
        if key in src.lines:
            prev = src.lines[key]
            same = (op == "->" and (a, b) in src.directed) or (op == "--" and key in src.undirected)
            if same:
                raise GraphStructureError(f"line {lineno}: duplicate edge {a} {op} {b} (first on line {prev})")
            if op == "->" and (b, a) in src.directed:
                raise GraphStructureError(f"line {lineno}: directed cycle {a} -> {b} -> {a}")
            raise GraphStructureError(
                f"line {lineno}: conflicting declarations for {key[0]}, {key[1]} (first on line {prev})"
            )
        src.lines[key] = lineno
        if op == "->":
            src.directed[(a, b)] = _parse_float(w, lineno) if w is not None else None
        else:
            if w is not None:
                raise GraphSyntaxError("weights are only allowed on directed edges", lineno)
            src.undirected.append(key)
    return src


def parse_graph(text: str) -> Pdag:
    """Parse the line-oriented graph format.

    Edge weights and SEM-only lines (``var``, ``dist``) are accepted and
    ignored here.
    """
    src = parse_source(text)
    return Pdag(tuple(src.nodes), frozenset(src.directed), frozenset(src.undirected))


def serialize_graph(g: Pdag, weights: dict[tuple[str, str], float] | None = None) -> str:
    out = [f"node {v}" for v in g.nodes]
    for a, b in sorted(g.directed):
        if weights is not None:
            out.append(f"{a} -> {b} : {weights[(a, b)]!r}")
        else:
            out.append(f"{a} -> {b}")
    out.extend(f"{a} -- {b}" for a, b in sorted(g.undirected))
    return "\n".join(out) + "\n"


# -- node-set helpers ---------------------------------------------------------------


def node_set(g: Pdag, s: str | Iterable[str] | None) -> NodeSet:
    """Normalise to an ordered, duplicate-free tuple of known nodes."""
    if s is None:
        return ()
    if isinstance(s, str):
        s = (s,)
    out = tuple(dict.fromkeys(s))
    missing = [v for v in out if v not in g.index]
    if missing:
        raise UnknownNodeError(missing)
    return out


def require_disjoint(**sets: Sequence[str]) -> None:
    names = list(sets)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            common = set(sets[a]) & set(sets[b])
            if common:
                raise OverlapError(f"{a} and {b} overlap in {', '.join(sorted(common))}")


# -- maximality and closure -------------------------------------------------------------


class _Work:
    """Mutable adjacency used while orienting edges."""

    def __init__(self, g: Pdag):
        self.nodes = g.nodes
        self.order = g.index
        self.pa = {v: set(g._pa[v]) for v in g.nodes}
        self.ch = {v: set(g._ch[v]) for v in g.nodes}
        self.nb = {v: set(g._nb[v]) for v in g.nodes}

    def copy(self) -> "_Work":
        w = object.__new__(_Work)
        w.nodes, w.order = self.nodes, self.order
        w.pa = {v: set(s) for v, s in self.pa.items()}
        w.ch = {v: set(s) for v, s in self.ch.items()}
        w.nb = {v: set(s) for v, s in self.nb.items()}
        return w

    def adjacent(self, a, b) -> bool:
        return b in self.pa[a] or b in self.ch[a] or b in self.nb[a]

    def reaches(self, src, dst) -> bool:
        stack, seen = [src], {src}
        while stack:
            v = stack.pop()
            if v == dst:
                return True
            for w in self.ch[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return False

    def orient(self, a, b):
        if b in self.ch[a]:
            return
        if a in self.ch[b]:
            raise OrientationConflictError(f"{a} -- {b} is required in both directions", (a, b))
        if self.reaches(b, a):
            raise OrientationConflictError(f"orienting {a} -> {b} creates a directed cycle", (a, b))
        self.nb[a].discard(b)
        self.nb[b].discard(a)
        self.ch[a].add(b)
        self.pa[b].add(a)

    def undirected_pairs(self):
        key = self.order.__getitem__
        for a in self.nodes:
            for b in sorted(self.nb[a], key=key):
                yield a, b

    def to_pdag(self) -> Pdag:
        d = {(a, b) for a in self.nodes for b in self.ch[a]}
        u = {_und(a, b) for a in self.nodes for b in self.nb[a]}
        return Pdag(self.nodes, frozenset(d), frozenset(u))


def _violations(w: _Work):
    """Yield ``(pattern, nodes, (tail, head))`` for every forbidden induced subgraph."""
    key = w.order.__getitem__
    for i, j in w.undirected_pairs():
        # (a) k -> i -- j, k and j non-adjacent
        for k in sorted(w.pa[i], key=key):
            if not w.adjacent(k, j):
                yield "a", (k, i, j), (i, j)
        # (b) i -> k -> j with i -- j
        for k in sorted(w.ch[i] & w.pa[j], key=key):
            yield "b", (i, k, j), (i, j)
        # (c) i -- j, k -> j, l -> j, i -- k, i -- l, k and l non-adjacent
        cand = sorted(w.pa[j] & w.nb[i], key=key)
        for k, l in combinations(cand, 2):
            if not w.adjacent(k, l):
                yield "c", (i, j, k, l), (i, j)
    for i, k in w.undirected_pairs():
        # (d) j -> l -> k, i -- k, i -- j, i -- l, j and k non-adjacent
        for l in sorted(w.pa[k] & w.nb[i], key=key):
            for j in sorted(w.pa[l] & w.nb[i], key=key):
                if j != k and not w.adjacent(j, k):
                    yield "d", (i, j, k, l), (i, k)


def is_maximal(g: Pdag) -> MaximalityReport:
    if not g.undirected:
        return MaximalityReport(True, ())
    found = tuple((pat, nodes) for pat, nodes, _ in _violations(_Work(g)))
    return MaximalityReport(not found, found)


def _close(w: _Work) -> None:
    while True:
        pending = [edge for _, _, edge in _violations(w)]
        if not pending:
            return
        for a, b in pending:
            if b in w.nb[a] or b in w.pa[a]:
                w.orient(a, b)


def orient_closure(g: Pdag) -> Pdag:
    """Orient undirected edges until no forbidden induced subgraph remains."""
    if not g.undirected:
        return g
    w = _Work(g)
    _close(w)
    out = w.to_pdag()
    return g if out == g else out


def v_structures(g: Pdag) -> set[tuple[str, str, str]]:
    """Triples ``(a, b, c)`` with ``a -> b <- c``, ``a`` and ``c`` non-adjacent, ``a < c``."""
    out = set()
    for b in g.nodes:
        for a, c in combinations(sorted(g._pa[b]), 2):
            if not g.adjacent(a, c):
                out.add((a, b, c))
    return out


def skeleton_pattern(g: Pdag) -> Pdag:
    """Skeleton with only the v-structure edges kept directed."""
    keep = set()
    for a, b, c in v_structures(g):
        keep.add((a, b))
        keep.add((c, b))
    und = {_und(a, b) for a, b in g.directed if (a, b) not in keep} | set(g.undirected)
    return Pdag(g.nodes, frozenset(keep), frozenset(und))


def cpdag_of(g: Pdag) -> Pdag:
    """CPDAG of a DAG: skeleton plus v-structures, closed under the orientation rules."""
    return orient_closure(skeleton_pattern(g))


def list_dag_extensions(g: Pdag, limit: int = 16) -> Iterator[Pdag]:
    """Yield every DAG represented by the maximal PDAG ``g``."""
    if not g.maximality.is_maximal:
        raise NotMaximalError("graph is not a maximal PDAG; run orient_closure first")
    if len(g.undirected) > limit:
        raise ExtensionLimitError(f"{len(g.undirected)} undirected edges exceed the limit of {limit}")
    if not g.undirected:
        yield g
        return
    target = v_structures(g)

    def rec(w: _Work):
        pairs = list(w.undirected_pairs())
        if not pairs:
            dag = w.to_pdag()
            if v_structures(dag) == target:
                yield dag
            return
        a, b = pairs[0]
        for tail, head in ((a, b), (b, a)):
            branch = w.copy()
            try:
                branch.orient(tail, head)
                _close(branch)
            except OrientationConflictError:
                continue
            yield from rec(branch)

    yield from rec(_Work(g))


# -- ancestry -------------------------------------------------------------------------


def ancestry(g: Pdag, s: str | Iterable[str], relation: str) -> NodeSet:
    """Family relations of a node set.

    Ancestors, descendants and their possible variants are reflexive.
    Descendants follow directed edges only; the possible variants follow
    possibly directed paths, i.e. paths with no edge pointing from a later
    node back to an earlier one. Chords count, which is why graphs with a
    partially directed cycle take the exact (exponential) route.
    """
    s = node_set(g, s)
    if relation not in RELATIONS:
        raise UsageError(f"unknown relation {relation!r}; expected one of {', '.join(RELATIONS)}")
    key = (relation, frozenset(s))
    memo = g._memo
    if key in memo:
        return memo[key]
    if relation == "parents":
        res = g.sort_nodes(set().union(*(g._pa[v] for v in s)) if s else ())
    elif relation == "children":
        res = g.sort_nodes(set().union(*(g._ch[v] for v in s)) if s else ())
    elif relation in ("ancestors", "descendants"):
        res = g.from_mask(kernels.directed_reach(g.adj, g.mask(s), relation == "ancestors"))
    elif g.has_pd_cycle:
        from adjopt._exact import possible_reach

        res = g.sort_nodes(possible_reach(g, s, reverse=relation == "possible_ancestors"))
    else:
        m = g.mask(s)
        none = np.zeros_like(m)
        if relation == "possible_descendants":
            st = kernels.forward_states(g.adj, m, none, True)
            reach = st.any(axis=0)
        else:
            st = kernels.backward_states(g.adj, m, none, True)
            reach = st.any(axis=1)
        res = g.from_mask(reach | m.astype(bool))
    memo[key] = res
    return res


def pa(g, s):
    return ancestry(g, s, "parents")


def ch(g, s):
    return ancestry(g, s, "children")


def an(g, s):
    return ancestry(g, s, "ancestors")


def de(g, s):
    return ancestry(g, s, "descendants")


def possan(g, s):
    return ancestry(g, s, "possible_ancestors")


def possde(g, s):
    return ancestry(g, s, "possible_descendants")


# -- paths and d-separation ----------------------------------------------------------------


def _check_path(g: Pdag, path: Sequence[str]) -> None:
    node_set(g, path)
    if len(set(path)) != len(path):
        raise UsageError("path repeats a node")
    for a, b in zip(path, path[1:]):
        if not g.adjacent(a, b):
            raise UsageError(f"{a} and {b} are not adjacent")


def triple_status(g: Pdag, u: str, v: str, w: str) -> str | None:
    """``'collider'``, ``'non-collider'`` or ``None`` for a triple that is not of definite status."""
    a = g.edge(v, u)
    b = g.edge(v, w)
    if a == "<-" and b == "<-":
        return "collider"
    if a == "->" or b == "->":
        return "non-collider"
    if a == "--" and b == "--" and not g.adjacent(u, w):
        return "non-collider"
    return None


def is_definite_status(g: Pdag, path: Sequence[str]) -> bool:
    path = tuple(path)
    _check_path(g, path)
    return all(triple_status(g, *path[i:i + 3]) is not None for i in range(len(path) - 2))


def is_open_path(g: Pdag, path: Sequence[str], z: Iterable[str]) -> bool:
    """Definite status and not blocked by ``z``. Collider activation uses descendants."""
    path = tuple(path)
    if not is_definite_status(g, path):
        return False
    z = set(z)
    for i in range(1, len(path) - 1):
        v = path[i]
        if triple_status(g, path[i - 1], v, path[i + 1]) == "collider":
            if not z.intersection(de(g, v)):
                return False
        elif v in z:
            return False
    return True


def is_possibly_directed(g: Pdag, path: Sequence[str]) -> bool:
    """No pair ``i < j`` on the path with an edge ``path[j] -> path[i]``."""
    for j in range(1, len(path)):
        for i in range(j):
            if g.edge(path[i], path[j]) == "<-":
                return False
    return True


def is_directed(g: Pdag, path: Sequence[str]) -> bool:
    return all(g.edge(a, b) == "->" for a, b in zip(path, path[1:]))


def active_colliders(g: Pdag, z: Sequence[str]) -> np.ndarray:
    return kernels.directed_reach(g.adj, g.mask(z), True)


def shortest_open_path(g: Pdag, x, y, z, *, proper=True, noncausal=False, max_expansions=200_000):
    """Breadth-first search over simple paths; ties broken by node order.

    Returns the first open definite-status path from ``x`` to ``y`` given
    ``z``. With ``noncausal`` the path must not be possibly directed. Returns
    ``None`` if none exists or the expansion budget runs out.
    """
    xs, ys, zs = set(x), set(y), set(z)
    act = set(g.from_mask(active_colliders(g, z)))
    key = g.index.__getitem__
    queue = deque((s,) for s in sorted(xs, key=key))
    budget = max_expansions
    while queue:
        path = queue.popleft()
        budget -= 1
        if budget < 0:
            return None
        last = path[-1]
        for w in g.neighbours(last):
            if w in path or (proper and w in xs):
                continue
            if len(path) >= 2:
                st = triple_status(g, path[-2], last, w)
                if st is None:
                    continue
                if st == "collider" and last not in act:
                    continue
                if st == "non-collider" and last in zs:
                    continue
            new = path + (w,)
            if w in ys:
                if not noncausal or not is_possibly_directed(g, new):
                    return new
            if w in ys and not noncausal:
                continue
            queue.append(new)
    return None


def separated(g: Pdag, x, y, z) -> bool:
    """Fast boolean d-separation without input validation or witness."""
    if not x or not y:
        return True
    zm = g.mask(z)
    return not kernels.open_walk(g.adj, g.mask(x), g.mask(y), zm, active_colliders(g, z), g.mask(x), False)


def d_separated(g: Pdag, x, y, z=(), *, witness: bool = True) -> PathQueryResult:
    """Does ``z`` block every definite-status path between ``x`` and ``y``?

    Colliders are unblocked only by a descendant in ``z`` along directed
    edges; possible descendants do not count. The empty set is separated
    from everything. Requires a maximal PDAG.
    """
    x, y, z = node_set(g, x), node_set(g, y), node_set(g, z)
    require_disjoint(x=x, y=y, z=z)
    if not g.maximality.is_maximal:
        raise NotMaximalError("d-separation is only defined here for maximal PDAGs")
    if separated(g, x, y, z):
        return PathQueryResult(True, None)
    path = shortest_open_path(g, x, y, z) if witness else None
    return PathQueryResult(False, path)
