"""Monte-Carlo comparison of adjustment sets on random linear SEMs.

Each model unit draws a random DAG, a treatment/outcome pair with a valid
adjustment set, and a random SEM. It then estimates the total effect with
four covariate sets: the empty set (``em``), the non-forbidden parents of
the treatments (``pa``), the ``Adjust`` set (``adj``) and the optimal set
(``O``). Every unit owns the RNG stream ``(seed, unit index)``, so results
do not depend on scheduling or on the number of workers.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable

import numpy as np

from adjopt.adjustment import adjust_set, exists_vas, forbidden, is_valid_adjustment, optimal_set
from adjopt.errors import DomainError, UsageError
from adjopt.estimation import Rng, ols_coefficients, sample
from adjopt.graph import Pdag, cpdag_of, de, pa
from adjopt.sem import LinearSem, total_effect

GRAPH_TYPES = ("erdos_renyi", "power_law")
ESTIMATORS = ("em", "pa", "adj", "O")
FAMILY_PROBS = {"gaussian": 0.5, "student_t5": 1 / 6, "logistic": 1 / 6, "uniform": 1 / 6}
PARAM_REDRAWS = 50
CSV_COLUMNS = (
    "graph_id", "p", "nbr", "graph_type", "n", "kx", "error_family", "estimator", "xi_label", "mse", "ratio_vs_O",
)


@dataclass(frozen=True)
class SimConfig:
    n_graphs: int = 200
    p: tuple[int, ...] = (10, 20, 50, 100)
    nbr: tuple[float, ...] = (2, 3, 4, 5)
    graph_type: tuple[str, ...] = GRAPH_TYPES
    n: tuple[int, ...] = (125, 500, 2000, 10000)
    kx: tuple[tuple[int, float], ...] = ((1, 0.5), (2, 0.25), (3, 0.25))
    replicates: int = 100
    seed: int = 0
    xy_retries: int = 20
    graph_retries: int = 20

    def __post_init__(self):
        for name in ("p", "nbr", "graph_type", "n", "kx"):
            if not getattr(self, name):
                raise UsageError(f"{name} must not be empty")
        if self.n_graphs < 1 or self.replicates < 1:
            raise UsageError("n_graphs and replicates must be positive")
        if any(t not in GRAPH_TYPES for t in self.graph_type):
            raise UsageError(f"graph_type must be among {', '.join(GRAPH_TYPES)}")
        if any(p < 2 for p in self.p) or any(n < 5 for n in self.n):
            raise UsageError("p must be at least 2 and n at least 5")
        for p in self.p:
            for nbr in self.nbr:
                if not 0 < nbr <= p - 1:
                    raise UsageError(f"expected neighbourhood {nbr} impossible with p={p}")
        probs = [w for _, w in self.kx]
        if any(w < 0 for w in probs) or not math.isclose(sum(probs), 1.0, abs_tol=1e-9):
            raise UsageError("kx probabilities must be non-negative and sum to 1")
        if any(k < 1 or k >= min(self.p) for k, _ in self.kx):
            raise UsageError("kx sizes must be between 1 and p - 1")

    @classmethod
    def from_text(cls, text: str) -> "SimConfig":
        """Parse ``key = value`` lines; lists are comma separated, ``kx`` is ``size:prob,...``."""
        kinds = {f.name: f.type for f in fields(cls)}
        vals: dict = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"line {lineno}: expected key = value")
            key, val = (t.strip() for t in line.split("=", 1))
            if key not in kinds:
                raise UsageError(f"line {lineno}: unknown key {key!r}")
            items = [t.strip() for t in val.split(",") if t.strip()]
            try:
                if key == "kx":
                    vals[key] = tuple((int(k), float(w)) for k, w in (t.split(":") for t in items))
                elif key in ("p", "n"):
                    vals[key] = tuple(int(t) for t in items)
                elif key == "nbr":
                    vals[key] = tuple(float(t) for t in items)
                elif key == "graph_type":
                    vals[key] = tuple(items)
                else:
                    vals[key] = int(val)
            except ValueError:
                raise UsageError(f"line {lineno}: bad value for {key}: {val!r}") from None
        return cls(**vals)


@dataclass(frozen=True)
class SimRecord:
    graph_id: int
    p: int
    nbr: float
    graph_type: str
    n: int
    kx: int
    error_family: str
    x: tuple[str, ...]
    y: str
    estimator: str
    xi_label: str
    mse: float
    ratio_vs_O: float

    def row(self) -> list[str]:
        nbr = int(self.nbr) if float(self.nbr).is_integer() else self.nbr
        return [
            str(self.graph_id), str(self.p), str(nbr), self.graph_type, str(self.n), str(self.kx),
            self.error_family, self.estimator, self.xi_label, repr(self.mse), repr(self.ratio_vs_O),
        ]


def _gen(rng) -> np.random.Generator:
    return rng.generator() if isinstance(rng, Rng) else rng


def random_dag(p: int, expected_nbr: float, graph_type: str, rng) -> Pdag:
    """Random DAG on nodes ``V1..Vp``.

    ``erdos_renyi`` joins each pair with probability ``nbr / (p - 1)`` and
    orients along a random order. ``power_law`` adds nodes one at a time,
    each linking to ``floor(nbr / 2 + 0.5)`` earlier nodes chosen with
    probability proportional to degree + 1, oriented old -> new.
    """
    if p < 2:
        raise UsageError("p must be at least 2")
    if not 0 < expected_nbr <= p - 1:
        raise UsageError("expected_nbr must be in (0, p - 1]")
    gen = _gen(rng)
    nodes = tuple(f"V{i + 1}" for i in range(p))
    edges = []
    if graph_type == "erdos_renyi":
        order = gen.permutation(p)
        hit = gen.random(p * (p - 1) // 2) < expected_nbr / (p - 1)
        k = 0
        for i in range(p):
            for j in range(i + 1, p):
                if hit[k]:
                    edges.append((nodes[order[i]], nodes[order[j]]))
                k += 1
    elif graph_type == "power_law":
        m = max(1, int(math.floor(expected_nbr / 2 + 0.5)))
        deg = np.zeros(p)
        for t in range(1, p):
            k = min(m, t)
            w = deg[:t] + 1.0
            targets = gen.choice(t, size=k, replace=False, p=w / w.sum())
            for s in sorted(targets):
                edges.append((nodes[s], nodes[t]))
                deg[s] += 1
                deg[t] += 1
    else:
        raise UsageError(f"unknown graph type {graph_type!r}")
    return Pdag(nodes, frozenset(edges))


def _draw_kx(dist, gen) -> int:
    if isinstance(dist, int):
        return dist
    items = sorted(dict(dist).items())
    probs = np.array([w for _, w in items], dtype=float)
    return int(items[int(gen.choice(len(items), p=probs / probs.sum()))][0])


def draw_xy(g: Pdag, size_dist, rng, retries: int = 50, cpdag: Pdag | None = None):
    """Treatments ``x`` and a single outcome ``y`` in every ``de(x_i)``.

    The pair must admit a valid adjustment set both in ``g`` and in its
    CPDAG. Returns ``None`` when ``retries`` draws all fail.
    """
    gen = _gen(rng)
    kx = _draw_kx(size_dist, gen)
    if kx >= len(g.nodes):
        return None
    cp = cpdag if cpdag is not None else cpdag_of(g)
    for _ in range(retries):
        pick = sorted(gen.choice(len(g.nodes), size=kx, replace=False))
        x = tuple(g.nodes[i] for i in pick)
        common = set(g.nodes) - set(x)
        for xi in x:
            common &= set(de(g, xi))
        if not common:
            continue
        cands = g.sort_nodes(common)
        y = (cands[int(gen.integers(len(cands)))],)
        if exists_vas(g, x, y) and exists_vas(cp, x, y):
            return x, y
    return None


def random_sem(g: Pdag, rng) -> LinearSem:
    """Coefficients uniform on [-2, -0.1] ∪ [0.1, 2], error variances on [0.5, 1.5], one family per model."""
    gen = _gen(rng)
    edges = sorted(g.directed)
    mag = gen.uniform(0.1, 2.0, len(edges))
    sign = np.where(gen.random(len(edges)) < 0.5, -1.0, 1.0)
    coeff = {e: float(s * m) for e, s, m in zip(edges, sign, mag)}
    var = {v: float(s) for v, s in zip(g.nodes, gen.uniform(0.5, 1.5, len(g.nodes)))}
    fams = list(FAMILY_PROBS)
    fam = fams[int(gen.choice(len(fams), p=list(FAMILY_PROBS.values())))]
    return LinearSem(g, coeff, var, dict.fromkeys(g.nodes, fam))


@dataclass
class _Unit:
    graph: Pdag
    sem: LinearSem
    x: tuple[str, ...]
    y: tuple[str, ...]
    p: int
    nbr: float
    graph_type: str
    n: int
    sets: dict = field(default_factory=dict)


def _build_unit(cfg: SimConfig, unit: int) -> _Unit:
    gen = Rng(cfg.seed, unit).generator()
    kx = _draw_kx(cfg.kx, gen)
    # Some settings never admit a pair (a power-law tree has a fully undirected
    # CPDAG); after graph_retries failures the graph settings are redrawn.
    for _ in range(PARAM_REDRAWS):
        p = int(cfg.p[int(gen.integers(len(cfg.p)))])
        nbr = float(cfg.nbr[int(gen.integers(len(cfg.nbr)))])
        gtype = cfg.graph_type[int(gen.integers(len(cfg.graph_type)))]
        n = int(cfg.n[int(gen.integers(len(cfg.n)))])
        if kx >= p:
            continue
        xy = None
        for _ in range(cfg.graph_retries):
            g = random_dag(p, nbr, gtype, gen)
            xy = draw_xy(g, kx, gen, cfg.xy_retries)
            if xy is not None:
                break
        if xy is not None:
            break
    else:
        raise DomainError(f"unit {unit}: no admissible (X, Y) found; check the configuration")
    x, y = xy
    sem = random_sem(g, gen)
    forb = set(forbidden(g, x, y))
    u = _Unit(g, sem, x, y, p, nbr, gtype, n)
    u.sets = {
        "em": (),
        "pa": tuple(v for v in pa(g, x) if v not in forb),
        "adj": adjust_set(g, x, y),
        "O": optimal_set(g, x, y),
    }
    if len(x) == 1 and not is_valid_adjustment(g, x, y, u.sets["pa"], witness=False).valid:
        raise AssertionError(f"unit {unit}: pa(x) is not a valid adjustment set")
    return u


def run_unit(cfg: SimConfig, unit: int) -> list[SimRecord]:
    u = _build_unit(cfg, unit)
    truth = total_effect(u.sem, u.x, u.y).values[0]
    sq = {k: np.zeros(len(u.x)) for k in ESTIMATORS}
    base = Rng(cfg.seed, unit)
    for r in range(cfg.replicates):
        data = sample(u.sem, u.n, base.child(r))
        ycol = data.columns(u.y)
        for k in ESTIMATORS:
            names = u.x + u.sets[k]
            beta = ols_coefficients(data.columns(names), ycol, names)
            sq[k] += (beta[: len(u.x), 0] - truth) ** 2
    mse = {k: v / cfg.replicates for k, v in sq.items()}
    fam = u.sem.err_family[u.graph.nodes[0]]
    out = []
    for k in ESTIMATORS:
        for i, xi in enumerate(u.x):
            ratio = mse["O"][i] / mse[k][i] if mse[k][i] > 0 else float("nan")
            out.append(
                SimRecord(unit, u.p, u.nbr, u.graph_type, u.n, len(u.x), fam, u.x, u.y[0], k, xi, float(mse[k][i]), float(ratio))
            )
    return out


def _worker(args):
    return run_unit(*args)


def thread_count(threads: int | None = None) -> int:
    if threads is None:
        env = os.environ.get("ADJOPT_THREADS", "")
        threads = int(env) if env.strip().isdigit() else (os.cpu_count() or 1)
    return max(1, threads)


def run_sim(cfg: SimConfig, out_dir: str | Path | None = None, threads: int | None = None) -> list[SimRecord]:
    """Run every unit, then optionally write ``results.csv`` and ``summary.txt`` to ``out_dir``."""
    jobs = [(cfg, i) for i in range(cfg.n_graphs)]
    workers = min(thread_count(threads), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            chunks = list(ex.map(_worker, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        chunks = [_worker(j) for j in jobs]
    records = sorted((r for c in chunks for r in c), key=lambda r: (r.graph_id, ESTIMATORS.index(r.estimator), r.xi_label))
    if out_dir is not None:
        write_outputs(records, out_dir)
    return records


def write_csv(records: Iterable[SimRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow(r.row())


def summarize(records: Iterable[SimRecord]) -> dict[str, float]:
    """Geometric mean, median and share above 1.5 of the ``O / alternative`` MSE ratios."""
    records = list(records)
    out: dict[str, float] = {"models": float(len({r.graph_id for r in records}))}
    for k in ESTIMATORS[:-1]:
        ratios = np.array([r.ratio_vs_O for r in records if r.estimator == k and np.isfinite(r.ratio_vs_O)])
        if not len(ratios):
            continue
        out[f"{k}.geomean"] = float(np.exp(np.mean(np.log(ratios))))
        out[f"{k}.median"] = float(np.median(ratios))
        out[f"{k}.frac_gt_1.5"] = float(np.mean(ratios > 1.5))
        out[f"{k}.count"] = float(len(ratios))
    return out


def write_outputs(records: list[SimRecord], out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(records, out / "results.csv")
    lines = []
    for key, val in summarize(records).items():
        lines.append(f"{key}={int(val)}" if key.endswith((".count", "models")) else f"{key}={val:.6g}")
    (out / "summary.txt").write_text("\n".join(lines) + "\n")
