"""Pure-Python state-space search kernels.

Graphs arrive as a dense ``int8`` code matrix ``adj`` where ``adj[i, j]`` is

* ``0`` no edge,
* ``1`` ``i -> j``,
* ``2`` ``i <- j``,
* ``3`` ``i -- j``.

Node sets are ``uint8`` masks of length ``p``. Every search runs over states
``(previous, current)`` so that rules which depend on a consecutive triple
can be checked locally. ``_kernels.pyx`` implements the same functions and is
preferred when compiled; both must return identical results.
"""

from collections import deque

import numpy as np

NONE, OUT, IN, UND = 0, 1, 2, 3


def _neighbours(rows):
    return [[j for j, c in enumerate(row) if c] for row in rows]


def _step_ok(code, possible):
    return code == OUT or (possible and code == UND)


def forward_states(adj, sources, blocked, possible):
    """States ``(u, v)`` reachable by a (possibly) directed walk from ``sources``.

    The walk never enters a ``blocked`` node after its first node. With
    ``possible`` set, undirected edges may be traversed and a triple
    ``(u, v, w)`` is admissible only if there is no edge ``w -> u``.
    """
    rows = adj.tolist()
    nbrs = _neighbours(rows)
    p = len(rows)
    src = sources.tolist()
    blk = blocked.tolist()
    seen = np.zeros((p, p), dtype=np.uint8)
    queue = deque()
    for s in range(p):
        if not src[s]:
            continue
        for v in nbrs[s]:
            if not blk[v] and _step_ok(rows[s][v], possible) and not seen[s, v]:
                seen[s, v] = 1
                queue.append((s, v))
    while queue:
        u, v = queue.popleft()
        for w in nbrs[v]:
            if w == u or blk[w] or seen[v, w]:
                continue
            if not _step_ok(rows[v][w], possible):
                continue
            if possible and rows[w][u] == OUT:
                continue
            seen[v, w] = 1
            queue.append((v, w))
    return seen


def backward_states(adj, targets, blocked, possible):
    """States ``(u, v)`` from which an admissible walk continues into ``targets``.

    ``v`` itself being a target counts. ``v`` is never blocked; ``u`` may be
    (it is then the first node of the walk).
    """
    rows = adj.tolist()
    nbrs = _neighbours(rows)
    p = len(rows)
    tgt = targets.tolist()
    blk = blocked.tolist()
    seen = np.zeros((p, p), dtype=np.uint8)
    queue = deque()
    for v in range(p):
        if not tgt[v] or blk[v]:
            continue
        for u in nbrs[v]:
            if _step_ok(rows[u][v], possible) and not seen[u, v]:
                seen[u, v] = 1
                queue.append((u, v))
    while queue:
        v, w = queue.popleft()
        if blk[v]:
            continue
        for u in nbrs[v]:
            if u == w or seen[u, v]:
                continue
            if not _step_ok(rows[u][v], possible):
                continue
            if possible and rows[w][u] == OUT:
                continue
            seen[u, v] = 1
            queue.append((u, v))
    return seen


def directed_reach(adj, sources, reverse):
    """Reflexive descendants (or ancestors with ``reverse``) of ``sources``."""
    rows = adj.tolist()
    p = len(rows)
    want = IN if reverse else OUT
    out = np.array(sources, dtype=np.uint8, copy=True)
    stack = [i for i in range(p) if out[i]]
    while stack:
        v = stack.pop()
        row = rows[v]
        for w in range(p):
            if row[w] == want and not out[w]:
                out[w] = 1
                stack.append(w)
    return out


def open_walk(adj, sources, targets, z, active, blocked, noncausal):
    """Is there a walk of definite-status triples from ``sources`` to ``targets`` open given ``z``?

    ``active[v]`` marks colliders that are unblocked (``v`` has a descendant in
    ``z``). ``blocked`` nodes are never visited after the first node. With
    ``noncausal`` the walk must additionally use at least one edge pointing
    back towards its start, and may pass through target nodes.
    """
    rows = adj.tolist()
    nbrs = _neighbours(rows)
    p = len(rows)
    src = sources.tolist()
    tgt = targets.tolist()
    zz = z.tolist()
    act = active.tolist()
    blk = blocked.tolist()
    seen = np.zeros((2, p, p), dtype=np.uint8)
    queue = deque()
    for s in range(p):
        if not src[s]:
            continue
        for w in nbrs[s]:
            if blk[w]:
                continue
            f = 1 if rows[s][w] == IN else 0
            if tgt[w] and (f or not noncausal):
                return True
            if not seen[f, s, w]:
                seen[f, s, w] = 1
                queue.append((f, s, w))
    while queue:
        f, u, v = queue.popleft()
        a = rows[v][u]
        for w in nbrs[v]:
            if w == u or blk[w]:
                continue
            b = rows[v][w]
            if a == IN and b == IN:
                if not act[v]:
                    continue
            elif a == OUT or b == OUT or (a == UND and b == UND and rows[u][w] == NONE):
                if zz[v]:
                    continue
            else:
                continue
            g = 1 if (f or b == IN) else 0
            if tgt[w] and (g or not noncausal):
                return True
            if not seen[g, v, w]:
                seen[g, v, w] = 1
                queue.append((g, v, w))
    return False
