import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _gen import random_dag, random_sem, split_xyz
from adjopt.adjustment import is_valid_adjustment
from adjopt.errors import DomainError, GraphStructureError, GraphSyntaxError, InvalidAdjustmentSetError, UsageError
from adjopt.graph import Pdag, de, parse_graph
from adjopt.sem import (
    CovMatrix,
    LinearSem,
    avar,
    conditional_cov,
    covariance,
    parse_sem,
    partial_total_effect,
    regression,
    serialize_sem,
    total_effect,
)


def _path_sum(sem, x, y, avoid=()):
    """Sum of edge-weight products over directed paths from x to y avoiding ``avoid``."""
    g = sem.graph
    total = 0.0

    def walk(v, acc):
        nonlocal total
        if v == y:
            total += acc
            return
        for c in g.children(v):
            if c not in avoid:
                walk(c, acc * sem.coeff[(v, c)])

    walk(x, 1.0)
    return total


def test_parse_sem_defaults_and_round_trip():
    sem = parse_sem("A -> B : 0.5\nB -> C : -2\nvar A 2.0\ndist C uniform\n")
    assert sem.err_var == {"A": 2.0, "B": 1.0, "C": 1.0}
    assert sem.err_family["C"] == "uniform" and sem.err_family["A"] == "gaussian"
    again = parse_sem(serialize_sem(sem))
    assert again.coeff == sem.coeff and again.err_var == sem.err_var and again.err_family == sem.err_family


@pytest.mark.parametrize(
    "text, err",
    [
        ("A -> B\n", GraphSyntaxError),
        ("A -> B : 1\nB -- C\n", GraphSyntaxError),
        ("A -> B : 1\ndist A cauchy\n", UsageError),
        ("A -> B : 1\nvar A -1\n", UsageError),
    ],
)
def test_parse_sem_errors(text, err):
    with pytest.raises(err):
        parse_sem(text)


def test_sem_validation():
    g = Pdag.from_edges([("A", "B")])
    with pytest.raises(UsageError, match="missing"):
        LinearSem(g, {}, {"A": 1, "B": 1})
    with pytest.raises(UsageError):
        LinearSem(g, {("A", "B"): float("nan")}, {"A": 1, "B": 1})
    with pytest.raises(GraphStructureError):
        LinearSem(Pdag.from_edges(undirected=[("A", "B")]), {}, {"A": 1, "B": 1})


def test_cov_matrix_checks():
    with pytest.raises(DomainError, match="symmetric"):
        CovMatrix(("a", "b"), [[1, 0.5], [0.4, 1]])
    with pytest.raises(DomainError):
        CovMatrix(("a", "b"), [[1, 1], [1, 1]])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 9))
def test_covariance_matches_inverse(seed, p):
    r = random.Random(seed)
    sem = random_sem(r, random_dag(r, p))
    n = len(sem.nodes)
    a = np.zeros((n, n))
    for (t, h), w in sem.coeff.items():
        a[sem.graph.index[h], sem.graph.index[t]] = w
    m = np.linalg.inv(np.eye(n) - a)
    expect = m @ np.diag([sem.err_var[v] for v in sem.nodes]) @ m.T
    np.testing.assert_allclose(covariance(sem).values, expect, rtol=1e-10, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_total_effect_is_path_sum(seed):
    r = random.Random(seed)
    sem = random_sem(r, random_dag(r, r.randint(2, 8)))
    x, y, _ = split_xyz(r, sem.graph)
    te = total_effect(sem, x, y)
    for yj, xi, v in te.items():
        others = [w for w in x if w != xi]
        assert v == pytest.approx(_path_sum(sem, xi, yj, others), abs=1e-10)
    xi, yj = x[0], y[0]
    assert partial_total_effect(sem, xi, yj) == pytest.approx(_path_sum(sem, xi, yj), abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_valid_adjustment_recovers_total_effect(seed):
    r = random.Random(seed)
    sem = random_sem(r, random_dag(r, r.randint(2, 7)))
    g = sem.graph
    x, y, _ = split_xyz(r, g)
    cov = covariance(sem)
    te = total_effect(sem, x, y)
    free = [v for v in g.nodes if v not in x and v not in y]
    for k in range(len(free) + 1):
        for z in itertools.combinations(free, k):
            if is_valid_adjustment(g, x, y, z, witness=False):
                beta = regression(cov, y, tuple(x) + z)
                for yj, xi, v in te.items():
                    assert beta[yj, xi] == pytest.approx(v, abs=1e-8)


def test_conditional_cov_schur():
    cov = CovMatrix(("a", "b", "c"), [[2, 0.5, 0.3], [0.5, 1, 0.2], [0.3, 0.2, 1.5]])
    s = cov.values
    expect = s[0, 0] - s[0, 1:] @ np.linalg.solve(s[1:, 1:], s[1:, 0])
    assert conditional_cov(cov, ["a"], ["b", "c"])[0, 0] == pytest.approx(expect)
    assert conditional_cov(cov, ["a"])[0, 0] == 2


def test_avar_table2_spot_values(data_dir):
    sem = parse_sem((data_dir / "table2_i.sem").read_text())
    assert avar(sem, "X", "Y", ["C"])["Y", "X"] == pytest.approx(16 / 33, abs=1e-12)
    assert avar(sem, "X", "Y", ["A"])["Y", "X"] == pytest.approx(1.0, abs=1e-12)


def test_avar_rejects_invalid_set(data_dir):
    sem = parse_sem((data_dir / "table2_i.sem").read_text())
    g = sem.graph
    bad = [v for v in g.nodes if v not in ("X", "Y") and not is_valid_adjustment(g, "X", "Y", [v], witness=False)]
    assert bad
    with pytest.raises(InvalidAdjustmentSetError):
        avar(sem, "X", "Y", bad[:1])
    assert avar(sem, "X", "Y", bad[:1], check_valid=False)["Y", "X"] > 0


def test_avar_multivariate_shape():
    g = parse_graph("A -> X1\nA -> Y1\nX1 -> X2\nX1 -> Y1\nX2 -> Y2\nY1 -> Y2\n")
    sem = LinearSem(g, dict.fromkeys(g.directed, 0.7), dict.fromkeys(g.nodes, 1.0))
    out = avar(sem, ["X1", "X2"], ["Y1", "Y2"], ["A"])
    assert out.shape == (2, 2)
    assert np.all(out.values > 0)


def test_descendants_helper_sanity():
    # guards the path-sum helper used above
    g = parse_graph("A -> B : 2\nB -> C : 3\nA -> C : 1\n")
    sem = parse_sem("A -> B : 2\nB -> C : 3\nA -> C : 1\n")
    assert _path_sum(sem, "A", "C") == 7
    assert set(de(g, "A")) == {"A", "B", "C"}
