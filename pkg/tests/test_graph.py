import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _gen import random_dag, random_mpdag
from adjopt.errors import (
    ExtensionLimitError,
    GraphStructureError,
    GraphSyntaxError,
    NotMaximalError,
    OrientationConflictError,
    OverlapError,
    UnknownNodeError,
)
from adjopt.graph import (
    Pdag,
    ancestry,
    cpdag_of,
    d_separated,
    de,
    is_maximal,
    is_open_path,
    list_dag_extensions,
    node_set,
    orient_closure,
    parse_graph,
    possan,
    possde,
    serialize_graph,
    triple_status,
    v_structures,
)


def load(data_dir, name):
    return parse_graph((data_dir / name).read_text())


# -- parsing --------------------------------------------------------------------------


def test_parse_basic():
    g = parse_graph("# comment\nnode Z\nA -> B\nB -- C  # trailing\n")
    assert g.nodes == ("Z", "A", "B", "C")
    assert g.directed == {("A", "B")}
    assert g.undirected == {("B", "C")}
    assert g.edge("B", "A") == "<-"
    assert g.edge("C", "B") == "--"
    assert g.edge("A", "C") is None


def test_weights_are_ignored_by_parse_graph():
    g = parse_graph("A -> B : 0.5\nvar A 2\ndist B uniform\n")
    assert g.directed == {("A", "B")}


@pytest.mark.parametrize(
    "text, err, line",
    [
        ("A -> B\nA => C\n", GraphSyntaxError, 2),
        ("A -> B : x\n", GraphSyntaxError, 1),
        ("A -- B : 1\n", GraphSyntaxError, 1),
        ("A-B -> C\n", GraphSyntaxError, 1),
    ],
)
def test_syntax_errors_name_the_line(text, err, line):
    with pytest.raises(err) as e:
        parse_graph(text)
    assert e.value.line == line
    assert f"line {line}" in str(e.value)


@pytest.mark.parametrize(
    "text, needle",
    [
        ("A -> A\n", "self-loop"),
        ("A -> B\nA -> B\n", "duplicate"),
        ("A -> B\nB -> A\n", "cycle"),
        ("A -> B\nA -- B\n", "conflicting"),
        ("A -> B\nB -> C\nC -> A\n", "cycle"),
    ],
)
def test_structure_errors(text, needle):
    with pytest.raises(GraphStructureError, match=needle):
        parse_graph(text)


def test_pdag_constructor_rejects_unknown_nodes():
    with pytest.raises(UnknownNodeError):
        Pdag(("A",), frozenset({("A", "B")}))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 8))
def test_serialize_round_trip(seed, p):
    g = random_mpdag(random.Random(seed), p)
    assert parse_graph(serialize_graph(g)) == g


def test_serialize_is_sorted():
    g = Pdag.from_edges([("B", "C"), ("A", "C")], [("D", "C")], nodes="ABCD")
    assert serialize_graph(g).splitlines()[4:] == ["A -> C", "B -> C", "C -- D"]


# -- node sets ------------------------------------------------------------------------


def test_node_set_single_label_and_dedup(data_dir):
    g = load(data_dir, "fig1.g")
    assert node_set(g, "V1") == ("V1",)
    assert node_set(g, ["V2", "V1", "V2"]) == ("V2", "V1")
    with pytest.raises(UnknownNodeError, match="V9"):
        node_set(g, ["V1", "V9"])


def test_overlap_is_rejected(data_dir):
    g = load(data_dir, "fig2a.g")
    with pytest.raises(OverlapError):
        d_separated(g, ["X"], ["X", "Y"])


# -- maximality -----------------------------------------------------------------------


@pytest.mark.parametrize("name", ["fig1.g", "fig2a.g", "fig2b.g", "fig3a.g", "fig3b.g", "fig3c.g", "fig3d.g"])
def test_example_graphs_are_maximal(data_dir, name):
    assert is_maximal(load(data_dir, name)).is_maximal


def test_pattern_a_is_detected_and_closed():
    g = Pdag.from_edges([("A", "B")], [("B", "C")])
    rep = is_maximal(g)
    assert not rep.is_maximal
    assert rep.violations[0][0] == "a"
    assert orient_closure(g).directed == {("A", "B"), ("B", "C")}


def test_pattern_b_orients_to_avoid_cycle():
    g = Pdag.from_edges([("A", "B"), ("B", "C")], [("A", "C")])
    assert orient_closure(g).edge("A", "C") == "->"


def test_closure_conflict():
    # a -> b -- c with a, c non-adjacent forces b -> c, which closes a cycle
    g = Pdag.from_edges([("A", "B"), ("C", "D"), ("D", "A")], [("B", "C")])
    with pytest.raises(OrientationConflictError):
        orient_closure(g)


def test_orient_rejects_cycle():
    g = Pdag.from_edges([("A", "B")], [("B", "C"), ("A", "C")])
    with pytest.raises(GraphStructureError):
        g.orient("C", "A").orient("B", "C").orient("C", "B")  # not undirected any more


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 8))
def test_cpdag_invariants(seed, p):
    dag = random_dag(random.Random(seed), p)
    cp = cpdag_of(dag)
    assert is_maximal(cp).is_maximal
    assert {tuple(sorted(e)) for e in dag.directed} == {tuple(sorted(e)) for e in cp.directed} | set(cp.undirected)
    assert v_structures(cp) == v_structures(dag)
    assert cpdag_of(dag) == cp
    assert dag in set(list_dag_extensions(cp))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 7))
def test_extensions_share_class(seed, p):
    g = random_mpdag(random.Random(seed), p)
    exts = list(list_dag_extensions(g))
    assert exts
    assert len(set(exts)) == len(exts)
    for d in exts:
        assert d.is_dag
        assert g.directed <= d.directed
        assert v_structures(d) == v_structures(g)
        assert orient_closure(d) == d


def test_undirected_chain_has_three_extensions():
    g = Pdag.from_edges(undirected=[("A", "B"), ("B", "C")])
    assert len(list(list_dag_extensions(g))) == 3


def test_extension_guards():
    with pytest.raises(NotMaximalError):
        list(list_dag_extensions(Pdag.from_edges([("A", "B")], [("B", "C")])))
    chain = Pdag.from_edges(undirected=[(f"V{i}", f"V{i+1}") for i in range(5)])
    with pytest.raises(ExtensionLimitError):
        list(list_dag_extensions(chain, limit=3))


# -- ancestry -------------------------------------------------------------------------


def test_relations_fig1(data_dir):
    g = load(data_dir, "fig1.g")
    assert set(de(g, "V4")) == {"V4", "V5", "V6"}
    assert ancestry(g, "V4", "parents") == ("V1",)
    assert set(ancestry(g, "V5", "ancestors")) == {"V1", "V2", "V3", "V4", "V5"}
    assert set(ancestry(g, ["V2", "V3"], "children")) == {"V5"}


def test_possible_relations_cpdag(data_dir):
    g = load(data_dir, "fig3a.g")
    assert set(possde(g, "V2")) == set(g.nodes)
    g = load(data_dir, "fig3c.g")
    assert set(possde(g, "V1")) == {"V1", "V3", "V4"}
    assert set(possan(g, "V1")) == {"V1", "V2"}


def test_bad_relation():
    g = Pdag.from_edges([("A", "B")])
    with pytest.raises(ValueError):
        ancestry(g, "A", "cousins")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 8))
def test_possible_relations_are_dual(seed, p):
    g = random_mpdag(random.Random(seed), p)
    for v in g.nodes:
        for w in possde(g, v):
            assert v in possan(g, w)


# -- d-separation ---------------------------------------------------------------------


def test_triple_status():
    g = Pdag.from_edges([("A", "B"), ("C", "B")], [("B", "D"), ("D", "E")])
    assert triple_status(g, "A", "B", "C") == "collider"
    assert triple_status(g, "B", "D", "E") == "non-collider"
    assert triple_status(g, "A", "B", "D") is None  # not of definite status
    g = Pdag.from_edges([("B", "A"), ("B", "C")])
    assert triple_status(g, "A", "B", "C") == "non-collider"


def test_dsep_fig2a(data_dir):
    g = load(data_dir, "fig2a.g")
    assert d_separated(g, "Y", "A", ["B", "C", "X"]).separated
    res = d_separated(g, "X", "C", [])
    assert res.separated
    res = d_separated(g, "X", "C", ["Y"])
    assert not res.separated
    assert is_open_path(g, res.witness, ["Y"])


def test_dsep_requires_maximal():
    with pytest.raises(NotMaximalError):
        d_separated(Pdag.from_edges([("A", "B")], [("B", "C")]), "A", "C")


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 8))
def test_dsep_symmetric_with_open_witness(seed, p):
    r = random.Random(seed)
    g = random_mpdag(r, p)
    nodes = list(g.nodes)
    r.shuffle(nodes)
    x, y = nodes[:1], nodes[1:2]
    z = [v for v in nodes[2:] if r.random() < 0.4]
    a, b = d_separated(g, x, y, z), d_separated(g, y, x, z)
    assert a.separated == b.separated
    if not a.separated:
        assert a.witness[0] == x[0] and a.witness[-1] == y[0]
        assert is_open_path(g, a.witness, z)
