"""Exact path searches for maximal PDAGs that contain a partially directed cycle.

A path is possibly directed when no later node has a directed edge into an
earlier one, chords included. Without partially directed cycles such a chord
cannot exist and the state-space kernels are exact. With them, a path can
look fine triple by triple and still be ruled out by a long chord, so these
searches extend simple paths one node at a time and check every chord. They
are exponential in the worst case and only used when needed.
"""

from __future__ import annotations

from typing import Iterator

from adjopt.graph import Pdag, triple_status

_FWD = ("->", "--")


def _into(g: Pdag, w: str, path: tuple[str, ...]) -> bool:
    """Does ``w`` have a directed edge into some node of ``path``?"""
    ch = g._ch[w]
    return any(v in ch for v in path)


def _from(g: Pdag, u: str, path: tuple[str, ...]) -> bool:
    pa = g._pa[u]
    return any(v in pa for v in path)


def possible_reach(g: Pdag, sources, reverse: bool = False) -> set[str]:
    """Reflexive possible descendants (or ancestors with ``reverse``)."""
    out = set(sources)

    def grow(path):
        end = path[0] if reverse else path[-1]
        for w in g.neighbours(end):
            if w in path:
                continue
            step = g.edge(w, end) if reverse else g.edge(end, w)
            if step not in _FWD:
                continue
            if reverse:
                if _from(g, w, path):
                    continue
                new = (w,) + path
            else:
                if _into(g, w, path):
                    continue
                new = path + (w,)
            out.add(w)
            grow(new)

    for s in sources:
        grow((s,))
    return out


def possibly_causal_paths(g: Pdag, x, y) -> Iterator[tuple[str, ...]]:
    """Proper possibly causal paths from ``x`` to ``y`` (they may pass through ``y``)."""
    xs, ys = set(x), set(y)

    def grow(path):
        last = path[-1]
        for w in g.neighbours(last):
            if w in path or w in xs or g.edge(last, w) not in _FWD or _into(g, w, path):
                continue
            new = path + (w,)
            if w in ys:
                yield new
            yield from grow(new)

    for s in x:
        yield from grow((s,))


def possible_causal_nodes(g: Pdag, x, y) -> set[str]:
    out: set[str] = set()
    for p in possibly_causal_paths(g, x, y):
        out.update(p[1:])
    return out


def amenability_violation(g: Pdag, x, y) -> tuple[str, str] | None:
    for p in possibly_causal_paths(g, x, y):
        if g.edge(p[0], p[1]) == "--":
            return p[0], p[1]
    return None


def open_noncausal_path(g: Pdag, x, y, z, active) -> tuple[str, ...] | None:
    """First proper non-causal definite-status path from ``x`` to ``y`` open given ``z``."""
    xs, ys, zs = set(x), set(y), set(z)

    def grow(path, causal):
        last = path[-1]
        for w in g.neighbours(last):
            if w in path or w in xs:
                continue
            if len(path) >= 2:
                st = triple_status(g, path[-2], last, w)
                if st is None or (st == "collider" and last not in active) or (st == "non-collider" and last in zs):
                    continue
            still = causal and not _into(g, w, path)
            new = path + (w,)
            if w in ys and not still:
                return new
            found = grow(new, still)
            if found:
                return found
        return None

    for s in x:
        found = grow((s,), True)
        if found:
            return found
    return None
