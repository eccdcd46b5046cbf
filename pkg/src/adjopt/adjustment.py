"""Adjustment-set combinatorics on DAGs, CPDAGs and maximal PDAGs.

Every function takes the graph first and node sets as labels (a single
label or an iterable). Results are tuples in graph node order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from adjopt import _exact, kernels
from adjopt.errors import (
    InvalidAdjustmentSetError,
    NotAmenableError,
    NotMaximalError,
    NotPossibleDescendantError,
    NoValidAdjustmentSetError,
    UsageError,
)
from adjopt.graph import (
    NodeSet,
    Pdag,
    active_colliders,
    node_set,
    pa,
    possan,
    possde,
    require_disjoint,
    separated,
    shortest_open_path,
)

log = logging.getLogger(__name__)

AMENABILITY = "amenability"
FORBIDDEN_OVERLAP = "forbidden_overlap"
OPEN_PATH = "open_path"


def _require_maximal(g: Pdag) -> None:
    if not g.maximality.is_maximal:
        raise NotMaximalError("graph is not a maximal PDAG; run orient_closure first")


def _prep(g: Pdag, x, y) -> tuple[NodeSet, NodeSet]:
    x, y = node_set(g, x), node_set(g, y)
    require_disjoint(x=x, y=y)
    return x, y


def _causal_states(g: Pdag, x: NodeSet, y: NodeSet, possible: bool) -> np.ndarray:
    """Edge states ``(u, v)`` lying on a proper (possibly) causal walk from ``x`` to ``y``."""
    xm, ym = g.mask(x), g.mask(y)
    fwd = kernels.forward_states(g.adj, xm, xm, possible)
    bwd = kernels.backward_states(g.adj, ym, xm, possible)
    return fwd & bwd


def causal_nodes(g: Pdag, x, y, mode: str = "definite") -> NodeSet:
    """Non-``x`` nodes on proper causal paths (``definite``) or proper possibly causal paths (``possible``)."""
    if mode not in ("definite", "possible"):
        raise UsageError(f"mode must be 'definite' or 'possible', got {mode!r}")
    x, y = _prep(g, x, y)
    if not x or not y:
        return ()
    if mode == "definite":
        return g.from_mask(_causal_states(g, x, y, False).any(axis=0))
    if g.has_pd_cycle:
        return g.sort_nodes(_exact.possible_causal_nodes(g, x, y))
    return _possible_causal_nodes(g, x, y)


def _walk_causal_nodes(g: Pdag, x: NodeSet, y: NodeSet) -> NodeSet:
    """Nodes on proper possibly causal walks.

    A superset of the possible causal nodes (a walk may loop inside an
    undirected component), but every extra node is a possible descendant of
    a genuine one, so it yields the same forbidden set.
    """
    if g.has_pd_cycle:
        return g.sort_nodes(_exact.possible_causal_nodes(g, x, y))
    return g.from_mask(_causal_states(g, x, y, True).any(axis=0))


def _possible_causal_nodes(g: Pdag, x: NodeSet, y: NodeSet) -> NodeSet:
    """Exact possible causal nodes for graphs without partially directed cycles.

    Such a path runs through a sequence of undirected components joined by
    directed edges. Inside the component of ``v`` it enters at some node
    ``a`` and leaves at some node ``b``; ``v`` qualifies iff there are paths
    ``v .. a`` and ``v .. b`` sharing only ``v``, which a unit-capacity flow
    of value two decides.
    """
    xs = set(x)
    xm, ym = g.mask(x), g.mask(y)
    fwd = kernels.forward_states(g.adj, xm, xm, True)
    bwd = kernels.backward_states(g.adj, ym, xm, True)
    reached = set(g.from_mask(fwd.any(axis=0)))
    coreach = set(g.from_mask(bwd.any(axis=1))) - xs | set(y)
    cands = g.from_mask((fwd & bwd).any(axis=0))
    comp: dict[str, frozenset[str]] = {}
    out = []
    for v in cands:
        if v not in comp:
            seen, stack = {v}, [v]
            while stack:
                u = stack.pop()
                for w in g._nb[u]:
                    if w not in seen and w not in xs:
                        seen.add(w)
                        stack.append(w)
            members = frozenset(seen)
            for u in members:
                comp[u] = members
        c = comp[v]
        entries = {a for a in c if g._pa[a] & (reached | xs) or g._nb[a] & xs}
        exits = {b for b in c if b in coreach and (b in y or g._ch[b] & coreach)}
        if _two_disjoint(g, c, v, entries, exits):
            out.append(v)
    return g.sort_nodes(out)


def _two_disjoint(g: Pdag, comp, v, entries, exits) -> bool:
    """Paths from ``v`` to ``entries`` and to ``exits`` inside ``comp``, disjoint except at ``v``."""
    if not entries or not exits:
        return False
    if v in entries or v in exits:
        return True
    # vertex-split residual graph; ("i", n) -> ("o", n) carries the node capacity
    cap: dict = {}

    def add(a, b):
        cap.setdefault(a, {})
        cap.setdefault(b, {})
        cap[a][b] = cap[a].get(b, 0) + 1
        cap[b].setdefault(a, 0)

    for n in comp:
        if n != v:
            add(("i", n), ("o", n))
        src = ("o", v) if n == v else ("o", n)
        for w in g._nb[n]:
            if w in comp and w != v:
                add(src, ("i", w))
        if n in entries:
            add(("o", n), "ENT")
        if n in exits:
            add(("o", n), "EXIT")
    add("ENT", "T")
    add("EXIT", "T")
    flow = 0
    for _ in range(2):
        prev = {("o", v): None}
        queue = [("o", v)]
        while queue and "T" not in prev:
            a = queue.pop(0)
            for b, c in cap.get(a, {}).items():
                if c > 0 and b not in prev:
                    prev[b] = a
                    queue.append(b)
        if "T" not in prev:
            break
        b = "T"
        while prev[b] is not None:
            a = prev[b]
            cap[a][b] -= 1
            cap[b][a] += 1
            b = a
        flow += 1
    return flow == 2


def forbidden(g: Pdag, x, y) -> NodeSet:
    """``possde(posscn(x, y)) ∪ x``; on a DAG this is ``de(cn(x, y)) ∪ x``."""
    x, y = _prep(g, x, y)
    return g.sort_nodes(set(possde(g, _walk_causal_nodes(g, x, y))) | set(x))


def _amenability_violation(g: Pdag, x: NodeSet, y: NodeSet) -> tuple[str, str] | None:
    """First undirected edge ``x -- w`` that starts a proper possibly causal path to ``y``."""
    if not g.undirected or not x or not y:
        return None
    if g.has_pd_cycle:
        return _exact.amenability_violation(g, x, y)
    xm = g.mask(x)
    bwd = kernels.backward_states(g.adj, g.mask(y), xm, True)
    und = g.adj == 3
    for i in np.flatnonzero(xm):
        for j in np.flatnonzero(und[i] & (bwd[i] != 0)):
            if not xm[j]:
                return g.nodes[i], g.nodes[j]
    return None


def amenable(g: Pdag, x, y) -> bool:
    """Do all proper possibly causal paths from ``x`` to ``y`` leave ``x`` by a directed edge?"""
    x, y = _prep(g, x, y)
    return _amenability_violation(g, x, y) is None


@dataclass(frozen=True)
class AdjustmentDecision:
    """Outcome of the adjustment criterion.

    ``detail`` is the offending ``x -- w`` edge for ``amenability``, the
    forbidden members of ``z`` for ``forbidden_overlap`` and an open proper
    non-causal path for ``open_path`` (``None`` if the path search ran out of
    budget or was not requested).
    """

    valid: bool
    failed_condition: str | None = None
    detail: tuple[str, ...] | None = None

    def __bool__(self) -> bool:
        return self.valid

    def describe(self) -> str:
        if self.valid:
            return "valid"
        det = " ".join(self.detail) if self.detail else ""
        if self.failed_condition == AMENABILITY:
            return f"invalid: not amenable, possibly causal path leaves X via {det.replace(' ', ' -- ')}"
        if self.failed_condition == FORBIDDEN_OVERLAP:
            return f"invalid: Z contains forbidden node(s) {det}"
        return f"invalid: proper non-causal path is open given Z{': ' + det if det else ''}"


def _check(g: Pdag, x: NodeSet, y: NodeSet, z: NodeSet, witness: bool) -> AdjustmentDecision:
    bad = _amenability_violation(g, x, y)
    if bad:
        return AdjustmentDecision(False, AMENABILITY, bad)
    forb = set(forbidden(g, x, y))
    hit = tuple(v for v in z if v in forb)
    if hit:
        return AdjustmentDecision(False, FORBIDDEN_OVERLAP, g.sort_nodes(hit))
    if not x or not y:
        return AdjustmentDecision(True)
    act = active_colliders(g, z)
    if g.has_pd_cycle:
        path = _exact.open_noncausal_path(g, x, y, z, set(g.from_mask(act)))
        return AdjustmentDecision(True) if path is None else AdjustmentDecision(False, OPEN_PATH, path)
    xm = g.mask(x)
    is_open = kernels.open_walk(g.adj, xm, g.mask(y), g.mask(z), act, xm, True)
    if not is_open:
        return AdjustmentDecision(True)
    path = shortest_open_path(g, x, y, z, proper=True, noncausal=True) if witness else None
    return AdjustmentDecision(False, OPEN_PATH, path)


def is_valid_adjustment(g: Pdag, x, y, z, *, witness: bool = True) -> AdjustmentDecision:
    """Check amenability, ``z ∩ forb = ∅`` and blocking of proper non-causal paths, in that order."""
    x, y, z = node_set(g, x), node_set(g, y), node_set(g, z)
    require_disjoint(x=x, y=y, z=z)
    _require_maximal(g)
    return _check(g, x, y, z, witness)


def _require_valid(g: Pdag, x, y, z, name: str = "z") -> None:
    dec = _check(g, x, y, z, witness=False)
    if not dec.valid:
        raise InvalidAdjustmentSetError(f"{name} = {{{', '.join(z)}}} is not a valid adjustment set: {dec.describe()}", dec)


def adjust_set(g: Pdag, x, y) -> NodeSet:
    """``possan(x ∪ y) \\ forb \\ (x ∪ y)``; raises if no valid set exists."""
    x, y = _prep(g, x, y)
    _require_maximal(g)
    bad = _amenability_violation(g, x, y)
    if bad:
        raise NotAmenableError(f"not amenable: possibly causal path leaves X via {bad[0]} -- {bad[1]}")
    excl = set(forbidden(g, x, y)) | set(x) | set(y)
    z = tuple(v for v in possan(g, x + y) if v not in excl)
    dec = _check(g, x, y, z, witness=False)
    if not dec.valid:
        raise NoValidAdjustmentSetError(f"no valid adjustment set exists ({dec.describe()})")
    return z


def _optimal(g: Pdag, x: NodeSet, y: NodeSet) -> NodeSet:
    cn = causal_nodes(g, x, y, "definite")
    forb = set(forbidden(g, x, y))
    return tuple(v for v in pa(g, cn) if v not in forb)


def optimal_set(g: Pdag, x, y) -> NodeSet:
    """``pa(cn(x, y)) \\ forb(x, y)``.

    Requires ``y ⊆ possde(x)`` and amenability; each violation raises its
    own error. The result is valid iff any valid adjustment set exists,
    which this function does not check (see :func:`exists_vas`).
    """
    x, y = _prep(g, x, y)
    _require_maximal(g)
    outside = set(y) - set(possde(g, x))
    if outside:
        raise NotPossibleDescendantError(
            f"Y member(s) {', '.join(g.sort_nodes(outside))} are not possible descendants of X; "
            "their effect is zero, drop them from Y"
        )
    bad = _amenability_violation(g, x, y)
    if bad:
        raise NotAmenableError(f"not amenable: possibly causal path leaves X via {bad[0]} -- {bad[1]}")
    return _optimal(g, x, y)


def prune(g: Pdag, x, y, z, order: Sequence[str] | None = None) -> NodeSet:
    """Single pass of backward elimination.

    Each member ``v`` of ``z`` (scanned in ``order``, default node order) is
    dropped if ``y`` is d-separated from ``v`` given ``x`` and the members
    still kept. The output does not depend on the scan order.
    """
    x, y, z = node_set(g, x), node_set(g, y), node_set(g, z)
    require_disjoint(x=x, y=y, z=z)
    _require_maximal(g)
    _require_valid(g, x, y, z)
    if order is None:
        scan = list(z)
    else:
        scan = list(node_set(g, order))
        if sorted(scan) != sorted(z):
            raise UsageError("order must be a permutation of z")
    keep = set(z)
    for v in scan:
        rest = keep - {v}
        if separated(g, y, (v,), tuple(x) + tuple(rest)):
            keep = rest
    return g.sort_nodes(keep)


class Verdict(str, Enum):
    SECOND_NO_WORSE = "SECOND_NO_WORSE"
    FIRST_NO_WORSE = "FIRST_NO_WORSE"
    EQUAL_GUARANTEE = "EQUAL_GUARANTEE"
    INCOMPARABLE = "INCOMPARABLE"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Certificate:
    """One separation statement ``a ⊥ b | given``."""

    a: NodeSet
    b: NodeSet
    given: NodeSet
    holds: bool

    def __str__(self) -> str:
        def fmt(s):
            return "{" + ",".join(s) + "}"

        rel = "_||_" if self.holds else "not _||_"
        return f"{fmt(self.a)} {rel} {fmt(self.b)} | {fmt(self.given)}"


@dataclass(frozen=True)
class ComparisonResult:
    verdict: Verdict
    second_no_worse: tuple[Certificate, Certificate]
    first_no_worse: tuple[Certificate, Certificate]


def _cert(g: Pdag, a, b, given) -> Certificate:
    return Certificate(tuple(a), tuple(b), g.sort_nodes(given), separated(g, a, b, g.sort_nodes(given)))


def compare(g: Pdag, x, y, z1, z2) -> ComparisonResult:
    """Graphical variance comparison of two valid adjustment sets.

    With ``T = z1 \\ z2`` and ``S = z2 \\ z1``, ``z2`` is guaranteed no worse
    than ``z1`` when ``y ⊥ T | x ∪ z2`` and ``x ⊥ S | z1``. Both directions
    are evaluated.
    """
    x, y = _prep(g, x, y)
    z1, z2 = node_set(g, z1), node_set(g, z2)
    require_disjoint(x=x, y=y, z1=z1)
    require_disjoint(x=x, y=y, z2=z2)
    _require_maximal(g)
    _require_valid(g, x, y, z1, "z1")
    _require_valid(g, x, y, z2, "z2")
    t = g.sort_nodes(set(z1) - set(z2))
    s = g.sort_nodes(set(z2) - set(z1))
    fwd = (_cert(g, y, t, set(x) | set(z2)), _cert(g, x, s, z1))
    rev = (_cert(g, y, s, set(x) | set(z1)), _cert(g, x, t, z2))
    second = all(c.holds for c in fwd)
    first = all(c.holds for c in rev)
    if second and first:
        verdict = Verdict.EQUAL_GUARANTEE
    elif second:
        verdict = Verdict.SECOND_NO_WORSE
    elif first:
        verdict = Verdict.FIRST_NO_WORSE
    else:
        verdict = Verdict.INCOMPARABLE
    return ComparisonResult(verdict, fwd, rev)


def effective_outcomes(g: Pdag, x, y) -> NodeSet:
    """Members of ``y`` that are possible descendants of ``x``."""
    x, y = _prep(g, x, y)
    pd = set(possde(g, x))
    return tuple(v for v in y if v in pd)


def exists_vas(g: Pdag, x, y) -> bool:
    """Does any valid adjustment set exist? Outcomes outside ``possde(x)`` are dropped first."""
    x, y = _prep(g, x, y)
    _require_maximal(g)
    yt = effective_outcomes(g, x, y)
    if yt != y:
        log.warning("dropping Y member(s) %s: not possible descendants of X", ", ".join(v for v in y if v not in yt))
    if not yt:
        return True
    if _amenability_violation(g, x, yt):
        return False
    return _check(g, x, yt, _optimal(g, x, yt), witness=False).valid

