"""Sampling from linear SEMs and least-squares effect estimation.

Random numbers come from numpy's ``Philox`` counter-based generator keyed by
``(seed, stream)``, so a given pair yields the same draws on every platform
and independent of how work is scheduled.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import linalg

from adjopt.errors import RankDeficientError, UsageError
from adjopt.graph import require_disjoint
from adjopt.sem import EffectMatrix, LinearSem

_U64 = (1 << 64) - 1
RANK_TOL = 1e-10


@dataclass(frozen=True)
class Rng:
    seed: int
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= v <= _U64:
                raise UsageError(f"{name} must be an integer in [0, 2**64)")

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed, self.stream], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, k: int) -> "Rng":
        """Deterministic sub-stream ``k`` of this stream."""
        ss = np.random.SeedSequence([self.seed, self.stream, k])
        return Rng(self.seed, int(ss.generate_state(1, np.uint64)[0]))


def draw_errors(family: str, var: float, size: int, gen: np.random.Generator) -> np.ndarray:
    """Zero-mean draws with variance ``var``."""
    if family == "gaussian":
        return gen.standard_normal(size) * np.sqrt(var)
    if family == "uniform":
        a = np.sqrt(3.0 * var)
        return gen.uniform(-a, a, size)
    if family == "logistic":
        return gen.logistic(0.0, np.sqrt(3.0 * var) / np.pi, size)
    if family == "student_t5":
        return gen.standard_t(5, size) / np.sqrt(5.0 / 3.0) * np.sqrt(var)
    raise UsageError(f"unknown error family {family!r}")


@dataclass(frozen=True, eq=False)
class Dataset:
    labels: tuple[str, ...]
    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        object.__setattr__(self, "labels", tuple(self.labels))
        if rows.ndim != 2 or rows.shape[1] != len(self.labels):
            raise UsageError("row width does not match the number of labels")
        if not np.all(np.isfinite(rows)):
            raise UsageError("dataset contains missing or non-finite values")
        if len(set(self.labels)) != len(self.labels):
            raise UsageError("duplicate column labels")
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    def columns(self, labels: Sequence[str]) -> np.ndarray:
        ix = {v: i for i, v in enumerate(self.labels)}
        missing = [v for v in labels if v not in ix]
        if missing:
            from adjopt.errors import UnknownNodeError

            raise UnknownNodeError(missing)
        return self.rows[:, [ix[v] for v in labels]]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.labels)
        for row in self.rows:
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Dataset":
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise UsageError("empty CSV") from None
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(header):
                raise UsageError(f"line {lineno}: expected {len(header)} fields, got {len(rec)}")
            try:
                rows.append([float(v) for v in rec])
            except ValueError:
                raise UsageError(f"line {lineno}: non-numeric field") from None
        return cls(tuple(h.strip() for h in header), np.array(rows, dtype=float).reshape(len(rows), len(header)))

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv())

    @classmethod
    def read(cls, path: str | Path) -> "Dataset":
        return cls.from_csv(Path(path).read_text())


def sample(sem: LinearSem, n: int, rng: Rng | np.random.Generator) -> Dataset:
    """``n`` i.i.d. draws; errors are drawn node by node in node order."""
    if n < 1:
        raise UsageError("n must be at least 1")
    gen = rng.generator() if isinstance(rng, Rng) else rng
    eps = np.empty((n, len(sem.nodes)))
    for i, v in enumerate(sem.nodes):
        eps[:, i] = draw_errors(sem.err_family[v], sem.err_var[v], n, gen)
    t = sem.topo
    a = sem.A[np.ix_(t, t)]
    # rows satisfy v = A v + eps, i.e. V^T = (I - A)^-1 E^T
    vt = linalg.solve_triangular(np.eye(len(t)) - a, eps[:, t].T, lower=True, unit_diagonal=True)
    out = np.empty_like(eps)
    out[:, t] = vt.T
    return Dataset(sem.nodes, out)


def ols_coefficients(design: np.ndarray, targets: np.ndarray, names: Sequence[str]) -> np.ndarray:
    """Least squares on mean-centred columns through a QR factorisation."""
    xc = design - design.mean(axis=0)
    yc = targets - targets.mean(axis=0)
    q, r = np.linalg.qr(xc)
    d = np.abs(np.diag(r))
    scale = max(float(np.max(np.linalg.norm(xc, axis=0))), 1e-300)
    bad = [names[i] for i in np.flatnonzero(d <= RANK_TOL * scale)]
    if bad:
        raise RankDeficientError(bad)
    return linalg.solve_triangular(r, q.T @ yc)


def ols_total_effect(data: Dataset, x, y, z=()) -> EffectMatrix:
    """Coefficients on ``x`` when each ``y_j`` is regressed on ``x`` and ``z``."""
    x, y, z = tuple(_as_list(x)), tuple(_as_list(y)), tuple(_as_list(z))
    require_disjoint(x=x, y=y, z=z)
    if not x or not y:
        raise UsageError("x and y must be non-empty")
    if data.n <= len(x) + len(z) + 1:
        raise UsageError(f"need more than {len(x) + len(z) + 1} rows, got {data.n}")
    names = x + z
    beta = ols_coefficients(data.columns(names), data.columns(y), names)
    return EffectMatrix(y, x, beta[: len(x)].T)


def _as_list(s) -> list[str]:
    if s is None:
        return []
    if isinstance(s, str):
        return [s]
    return list(dict.fromkeys(s))


def empirical_mse(estimates: Sequence[EffectMatrix], truth: EffectMatrix) -> EffectMatrix:
    if not estimates:
        raise UsageError("need at least one estimate")
    for e in estimates:
        if e.rows != truth.rows or e.cols != truth.cols:
            raise UsageError("estimate labels do not match the truth")
    dev = np.stack([e.values for e in estimates]) - truth.values
    return EffectMatrix(truth.rows, truth.cols, np.mean(dev**2, axis=0))
