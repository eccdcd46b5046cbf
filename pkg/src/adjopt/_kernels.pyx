# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled state-space search kernels.

Same contract as ``_kernels_py``; see that module for the edge codes and the
meaning of every argument.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

DEF NONE = 0
DEF OUT = 1
DEF IN = 2
DEF UND = 3


cdef inline bint _step_ok(cnp.int8_t code, bint possible) nogil:
    return code == OUT or (possible and code == UND)


def forward_states(const cnp.int8_t[:, ::1] adj, const cnp.uint8_t[::1] sources,
                   const cnp.uint8_t[::1] blocked, bint possible):
    cdef Py_ssize_t p = adj.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] seen_arr = np.zeros((p, p), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] seen = seen_arr
    cdef cnp.ndarray[cnp.intp_t, ndim=1] qarr = np.empty(2 * p * p + 2, dtype=np.intp)
    cdef cnp.intp_t[::1] q = qarr
    cdef Py_ssize_t head = 0, tail = 0, s, u, v, w
    with nogil:
        for s in range(p):
            if not sources[s]:
                continue
            for v in range(p):
                if adj[s, v] == NONE or blocked[v] or seen[s, v]:
                    continue
                if _step_ok(adj[s, v], possible):
                    seen[s, v] = 1
                    q[tail] = s
                    q[tail + 1] = v
                    tail += 2
        while head < tail:
            u = q[head]
            v = q[head + 1]
            head += 2
            for w in range(p):
                if adj[v, w] == NONE or w == u or blocked[w] or seen[v, w]:
                    continue
                if not _step_ok(adj[v, w], possible):
                    continue
                if possible and adj[w, u] == OUT:
                    continue
                seen[v, w] = 1
                q[tail] = v
                q[tail + 1] = w
                tail += 2
    return seen_arr


def backward_states(const cnp.int8_t[:, ::1] adj, const cnp.uint8_t[::1] targets,
                    const cnp.uint8_t[::1] blocked, bint possible):
    cdef Py_ssize_t p = adj.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] seen_arr = np.zeros((p, p), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] seen = seen_arr
    cdef cnp.ndarray[cnp.intp_t, ndim=1] qarr = np.empty(2 * p * p + 2, dtype=np.intp)
    cdef cnp.intp_t[::1] q = qarr
    cdef Py_ssize_t head = 0, tail = 0, u, v, w
    with nogil:
        for v in range(p):
            if not targets[v] or blocked[v]:
                continue
            for u in range(p):
                if adj[u, v] == NONE or seen[u, v]:
                    continue
                if _step_ok(adj[u, v], possible):
                    seen[u, v] = 1
                    q[tail] = u
                    q[tail + 1] = v
                    tail += 2
        while head < tail:
            v = q[head]
            w = q[head + 1]
            head += 2
            if blocked[v]:
                continue
            for u in range(p):
                if adj[u, v] == NONE or u == w or seen[u, v]:
                    continue
                if not _step_ok(adj[u, v], possible):
                    continue
                if possible and adj[w, u] == OUT:
                    continue
                seen[u, v] = 1
                q[tail] = u
                q[tail + 1] = v
                tail += 2
    return seen_arr


def directed_reach(const cnp.int8_t[:, ::1] adj, sources, bint reverse):
    cdef Py_ssize_t p = adj.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] out_arr = np.array(sources, dtype=np.uint8, copy=True)
    cdef cnp.uint8_t[::1] out = out_arr
    cdef cnp.ndarray[cnp.intp_t, ndim=1] sarr = np.empty(p + 1, dtype=np.intp)
    cdef cnp.intp_t[::1] stack = sarr
    cdef Py_ssize_t top = 0, v, w
    cdef cnp.int8_t want = IN if reverse else OUT
    with nogil:
        for v in range(p):
            if out[v]:
                stack[top] = v
                top += 1
        while top > 0:
            top -= 1
            v = stack[top]
            for w in range(p):
                if adj[v, w] == want and not out[w]:
                    out[w] = 1
                    stack[top] = w
                    top += 1
    return out_arr


def open_walk(const cnp.int8_t[:, ::1] adj, const cnp.uint8_t[::1] sources,
              const cnp.uint8_t[::1] targets, const cnp.uint8_t[::1] z,
              const cnp.uint8_t[::1] active, const cnp.uint8_t[::1] blocked,
              bint noncausal):
    cdef Py_ssize_t p = adj.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=3] seen_arr = np.zeros((2, p, p), dtype=np.uint8)
    cdef cnp.uint8_t[:, :, ::1] seen = seen_arr
    cdef cnp.ndarray[cnp.intp_t, ndim=1] qarr = np.empty(6 * p * p + 3, dtype=np.intp)
    cdef cnp.intp_t[::1] q = qarr
    cdef Py_ssize_t head = 0, tail = 0, s, u, v, w
    cdef cnp.intp_t f, g
    cdef cnp.int8_t a, b
    cdef bint found = False
    with nogil:
        for s in range(p):
            if not sources[s] or found:
                continue
            for w in range(p):
                if adj[s, w] == NONE or blocked[w]:
                    continue
                f = 1 if adj[s, w] == IN else 0
                if targets[w] and (f or not noncausal):
                    found = True
                    break
                if not seen[f, s, w]:
                    seen[f, s, w] = 1
                    q[tail] = f
                    q[tail + 1] = s
                    q[tail + 2] = w
                    tail += 3
        while head < tail and not found:
            f = q[head]
            u = q[head + 1]
            v = q[head + 2]
            head += 3
            a = adj[v, u]
            for w in range(p):
                b = adj[v, w]
                if b == NONE or w == u or blocked[w]:
                    continue
                if a == IN and b == IN:
                    if not active[v]:
                        continue
                elif a == OUT or b == OUT or (a == UND and b == UND and adj[u, w] == NONE):
                    if z[v]:
                        continue
                else:
                    continue
                g = 1 if (f or b == IN) else 0
                if targets[w] and (g or not noncausal):
                    found = True
                    break
                if not seen[g, v, w]:
                    seen[g, v, w] = 1
                    q[tail] = g
                    q[tail + 1] = v
                    q[tail + 2] = w
                    tail += 3
    return found
