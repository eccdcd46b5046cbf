"""Linear structural equation models: exact covariances, effects and asymptotic variances.

Each node is ``V_i = sum_j alpha_ij V_j + eps_i`` with independent zero-mean
errors. Everything here works at the population level and depends on the
model only through its coefficients and error variances. The error families
matter for sampling (see :mod:`adjopt.estimation`) and nowhere else.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np
from scipy import linalg

from adjopt.errors import (
    DomainError,
    GraphStructureError,
    GraphSyntaxError,
    InvalidAdjustmentSetError,
    UsageError,
)
from adjopt.graph import NodeSet, Pdag, node_set, parse_source, require_disjoint

FAMILIES = ("gaussian", "uniform", "logistic", "student_t5")
PD_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LinearSem:
    graph: Pdag
    coeff: Mapping[tuple[str, str], float]
    err_var: Mapping[str, float]
    err_family: Mapping[str, str] | None = None

    def __post_init__(self):
        g = self.graph
        if g.undirected:
            raise GraphStructureError("a linear SEM needs a DAG; found undirected edges")
        coeff = {tuple(k): float(v) for k, v in self.coeff.items()}
        if set(coeff) != set(g.directed):
            missing = sorted(set(g.directed) - set(coeff))
            extra = sorted(set(coeff) - set(g.directed))
            raise UsageError(f"coefficients must match the edges exactly (missing {missing}, extra {extra})")
        if not all(np.isfinite(v) for v in coeff.values()):
            raise UsageError("coefficients must be finite")
        var = {v: float(self.err_var[v]) for v in g.nodes if v in self.err_var}
        if set(var) != set(g.nodes) or set(self.err_var) - set(g.nodes):
            raise UsageError("err_var must give one variance per node")
        bad = [v for v, s in var.items() if not (s > 0 and np.isfinite(s))]
        if bad:
            raise UsageError(f"error variances must be positive: {', '.join(bad)}")
        fam = dict.fromkeys(g.nodes, "gaussian")
        fam.update(self.err_family or {})
        unknown = {f for f in fam.values() if f not in FAMILIES}
        if unknown or set(fam) != set(g.nodes):
            raise UsageError(f"unknown error family or node in err_family: {sorted(unknown) or sorted(set(fam) - set(g.nodes))}")
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "err_var", var)
        object.__setattr__(self, "err_family", fam)

    @property
    def nodes(self) -> tuple[str, ...]:
        return self.graph.nodes

    @cached_property
    def topo(self) -> np.ndarray:
        """Indices of the nodes in a topological order (ties by node order)."""
        g = self.graph
        indeg = {v: len(g._pa[v]) for v in g.nodes}
        ready = [v for v in g.nodes if indeg[v] == 0]
        order = []
        while ready:
            v = ready.pop(0)
            order.append(g.index[v])
            for w in sorted(g._ch[v], key=g.index.__getitem__):
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
            ready.sort(key=g.index.__getitem__)
        return np.array(order, dtype=np.intp)

    @cached_property
    def A(self) -> np.ndarray:
        """Coefficient matrix with ``A[i, j] = alpha`` for the edge ``j -> i``."""
        ix = self.graph.index
        a = np.zeros((len(ix), len(ix)))
        for (t, h), w in self.coeff.items():
            a[ix[h], ix[t]] = w
        a.setflags(write=False)
        return a

    @cached_property
    def D(self) -> np.ndarray:
        return np.array([self.err_var[v] for v in self.nodes])

    def with_err_var(self, err_var: Mapping[str, float]) -> "LinearSem":
        return LinearSem(self.graph, self.coeff, err_var, self.err_family)

    def with_families(self, family: str | Mapping[str, str]) -> "LinearSem":
        fam = dict.fromkeys(self.nodes, family) if isinstance(family, str) else dict(family)
        return LinearSem(self.graph, self.coeff, self.err_var, fam)


def parse_sem(text: str) -> LinearSem:
    """Parse a SEM file: a DAG with ``: weight`` on every edge, ``var`` and ``dist`` lines.

    A node without a ``var`` line gets error variance 1.
    """
    src = parse_source(text)
    if src.undirected:
        a, b = src.undirected[0]
        raise GraphSyntaxError(f"undirected edge {a} -- {b} in a SEM file", src.lines[(a, b)])
    for (a, b), w in src.directed.items():
        if w is None:
            raise GraphSyntaxError(f"edge {a} -> {b} needs a coefficient", src.lines[tuple(sorted((a, b)))])
    g = Pdag(tuple(src.nodes), frozenset(src.directed))
    var = {v: src.variances.get(v, 1.0) for v in g.nodes}
    for v, fam in src.families.items():
        if fam not in FAMILIES:
            raise UsageError(f"unknown distribution {fam!r} for {v}; expected one of {', '.join(FAMILIES)}")
    return LinearSem(g, dict(src.directed), var, dict(src.families))


def serialize_sem(sem: LinearSem) -> str:
    from adjopt.graph import serialize_graph

    lines = [serialize_graph(sem.graph, sem.coeff).rstrip("\n")]
    lines += [f"var {v} {sem.err_var[v]!r}" for v in sem.nodes]
    lines += [f"dist {v} {sem.err_family[v]}" for v in sem.nodes if sem.err_family[v] != "gaussian"]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class CovMatrix:
    """Symmetric positive-definite matrix indexed by node labels."""

    labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        object.__setattr__(self, "labels", tuple(self.labels))
        if vals.shape != (len(self.labels),) * 2:
            raise UsageError("covariance shape does not match the labels")
        scale = max(1.0, float(np.max(np.abs(vals)))) if vals.size else 1.0
        if not np.allclose(vals, vals.T, rtol=0, atol=1e-12 * scale):
            raise DomainError("covariance matrix is not symmetric")
        vals = (vals + vals.T) / 2
        if vals.size:
            _chol(vals)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.labels)}

    def idx(self, s: Iterable[str]) -> list[int]:
        try:
            return [self.index[v] for v in s]
        except KeyError as e:
            from adjopt.errors import UnknownNodeError

            raise UnknownNodeError([e.args[0]]) from None

    def block(self, s: Iterable[str], t: Iterable[str]) -> np.ndarray:
        return self.values[np.ix_(self.idx(s), self.idx(t))]


def _chol(m: np.ndarray):
    """Cholesky factor with the pivot tolerance ``PD_TOL * max diag``."""
    try:
        c = linalg.cholesky(m, lower=True)
    except linalg.LinAlgError:
        raise DomainError("matrix is not positive definite") from None
    if np.min(np.diag(c)) ** 2 <= PD_TOL * np.max(np.diag(m)):
        raise DomainError("matrix is numerically singular")
    return c


@dataclass(frozen=True, eq=False)
class EffectMatrix:
    """Rows are outcome labels, columns treatment labels."""

    rows: tuple[str, ...]
    cols: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).reshape(len(self.rows), len(self.cols))
        if not np.all(np.isfinite(vals)):
            raise DomainError("non-finite effect entries")
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "cols", tuple(self.cols))
        object.__setattr__(self, "values", vals)

    def __getitem__(self, key: tuple[str, str]) -> float:
        y, x = key
        return float(self.values[self.rows.index(y), self.cols.index(x)])

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def items(self):
        for j, y in enumerate(self.rows):
            for i, x in enumerate(self.cols):
                yield y, x, float(self.values[j, i])

    def __eq__(self, other) -> bool:
        if not isinstance(other, EffectMatrix):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and np.array_equal(self.values, other.values)

    __hash__ = None


def covariance(sem: LinearSem) -> CovMatrix:
    """``(I - A)^-1 D (I - A)^-T`` via a triangular solve in topological order."""
    t = sem.topo
    a = sem.A[np.ix_(t, t)]
    m = linalg.solve_triangular(np.eye(len(t)) - a, np.eye(len(t)), lower=True, unit_diagonal=True)
    sig_t = (m * sem.D[t]) @ m.T
    sig = np.empty_like(sig_t)
    sig[np.ix_(t, t)] = sig_t
    return CovMatrix(sem.nodes, (sig + sig.T) / 2)


def conditional_cov(cov: CovMatrix, s, t=()) -> np.ndarray:
    """Schur complement ``S_ss - S_st S_tt^-1 S_ts``."""
    s, t = tuple(s), tuple(t)
    require_disjoint(s=s, t=t)
    sss = cov.block(s, s)
    if not t:
        return sss.copy()
    c = _chol(cov.block(t, t))
    w = linalg.solve_triangular(c, cov.block(t, s), lower=True)
    return sss - w.T @ w


def regression(cov: CovMatrix, targets, regressors) -> EffectMatrix:
    """Population least-squares coefficients ``S_yx S_xx^-1``."""
    targets, regressors = tuple(targets), tuple(regressors)
    if not regressors:
        raise UsageError("regressors must be non-empty")
    require_disjoint(targets=targets, regressors=regressors)
    cf = linalg.cho_factor(cov.block(regressors, regressors), lower=True)
    beta = linalg.cho_solve(cf, cov.block(regressors, targets)).T
    return EffectMatrix(targets, regressors, beta)


def _effect_through(sem: LinearSem, removed_into: Iterable[str]) -> np.ndarray:
    """``(I - A')^-1`` where ``A'`` drops every edge into ``removed_into``."""
    a = np.array(sem.A)
    a[[sem.graph.index[v] for v in removed_into], :] = 0.0
    t = sem.topo
    at = a[np.ix_(t, t)]
    m_t = linalg.solve_triangular(np.eye(len(t)) - at, np.eye(len(t)), lower=True, unit_diagonal=True)
    m = np.empty_like(m_t)
    m[np.ix_(t, t)] = m_t
    return m


def total_effect(sem: LinearSem, x, y) -> EffectMatrix:
    """Sum of path products over proper causal paths; paths through other members of ``x`` do not count."""
    g = sem.graph
    x, y = node_set(g, x), node_set(g, y)
    require_disjoint(x=x, y=y)
    ix = g.index
    out = np.zeros((len(y), len(x)))
    for i, xi in enumerate(x):
        m = _effect_through(sem, [v for v in x if v != xi])
        out[:, i] = m[[ix[v] for v in y], ix[xi]]
    return EffectMatrix(y, x, out)


def partial_total_effect(sem: LinearSem, x: str, y: str, z=()) -> float:
    """Total effect of ``x`` on ``y`` along causal paths that avoid ``z``."""
    g = sem.graph
    (x,), (y,), z = node_set(g, [x]), node_set(g, [y]), node_set(g, z)
    require_disjoint(x=(x,), y=(y,), z=z)
    m = _effect_through(sem, z)
    return float(m[g.index[y], g.index[x]])


def avar_from_cov(cov: CovMatrix, x: NodeSet, y: NodeSet, z: NodeSet) -> EffectMatrix:
    """Entry ``(j, i)`` is ``s_{yj yj . x z} / s_{xi xi . x_-i z}``."""
    xz = tuple(x) + tuple(z)
    num = np.array([conditional_cov(cov, (yj,), xz)[0, 0] for yj in y])
    den = np.array([conditional_cov(cov, (xi,), tuple(v for v in x if v != xi) + tuple(z))[0, 0] for xi in x])
    return EffectMatrix(y, x, num[:, None] / den[None, :])


def avar(sem: LinearSem, x, y, z=(), *, check_valid: bool = True) -> EffectMatrix:
    """Asymptotic variance of the adjusted least-squares estimator.

    The formula is only justified for valid adjustment sets, so ``z`` is
    checked first. ``check_valid=False`` skips the check; with non-Gaussian
    errors the result then need not be the actual asymptotic variance.
    """
    g = sem.graph
    x, y, z = node_set(g, x), node_set(g, y), node_set(g, z)
    require_disjoint(x=x, y=y, z=z)
    if not x or not y:
        raise UsageError("x and y must be non-empty")
    if check_valid:
        from adjopt.adjustment import is_valid_adjustment

        dec = is_valid_adjustment(g, x, y, z, witness=False)
        if not dec.valid:
            raise InvalidAdjustmentSetError(f"z is not a valid adjustment set: {dec.describe()}", dec)
    return avar_from_cov(covariance(sem), x, y, z)
