"""Command-line interface.

Exit status: 0 success, 1 usage error, 2 domain error (invalid or
non-amenable input, failed criterion), 3 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from adjopt import adjustment as adj
from adjopt import oracle
from adjopt.errors import AdjoptError, DomainError, UsageError
from adjopt.graph import d_separated, is_maximal, parse_graph
from adjopt.sem import avar, parse_sem, total_effect

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def node_list(text: str) -> tuple[str, ...]:
    """Comma-separated labels; the empty string is the empty set."""
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _fmt_set(s) -> str:
    return ",".join(s)


def _num(v: float) -> str:
    return f"{v:.6g}"


class Out:
    def __init__(self, kv: bool, stream=None):
        self.kv = kv
        self.stream = stream or sys.stdout

    def line(self, text: str = "") -> None:
        print(text, file=self.stream)

    def pair(self, key: str, value) -> None:
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = _num(value)
        elif isinstance(value, (tuple, list)):
            value = _fmt_set(value)
        self.line(f"{key}={value}")


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _graph(path: str):
    return parse_graph(_read(path))


def _sem(path: str):
    return parse_sem(_read(path))


# -- subcommands ------------------------------------------------------------------------


def cmd_validate(a, out: Out) -> int:
    g = _graph(a.graph)
    rep = is_maximal(g)
    if out.kv:
        out.pair("nodes", len(g.nodes))
        out.pair("directed", len(g.directed))
        out.pair("undirected", len(g.undirected))
        out.pair("maximal", rep.is_maximal)
        for pat, nodes in rep.violations:
            out.pair("violation", f"{pat}:{_fmt_set(nodes)}")
    else:
        kind = "DAG" if g.is_dag else ("maximal PDAG" if rep.is_maximal else "PDAG, not maximal")
        out.line(f"{len(g.nodes)} nodes, {len(g.directed)} directed, {len(g.undirected)} undirected edges: {kind}")
        for pat, nodes in rep.violations:
            out.line(f"  forbidden pattern ({pat}) on {' '.join(nodes)}")
    return EXIT_OK


def cmd_dsep(a, out: Out) -> int:
    g = _graph(a.graph)
    res = d_separated(g, a.x, a.y, a.z or ())
    if out.kv:
        out.pair("separated", res.separated)
        if res.witness:
            out.pair("witness", res.witness)
    else:
        out.line("separated" if res.separated else "not separated" + (f": open path {' '.join(res.witness)}" if res.witness else ""))
    return EXIT_OK


def cmd_vas(a, out: Out) -> int:
    g = _graph(a.graph)
    dec = adj.is_valid_adjustment(g, a.x, a.y, a.z or ())
    if out.kv:
        out.pair("valid", dec.valid)
        if not dec.valid:
            out.pair("failed_condition", dec.failed_condition)
            out.pair("detail", dec.detail or ())
    else:
        out.line(dec.describe())
    return EXIT_OK if dec.valid else EXIT_DOMAIN


def _set_cmd(key: str, fn):
    def run(a, out: Out) -> int:
        g = _graph(a.graph)
        res = fn(g, a)
        if out.kv:
            out.pair(key, res)
        else:
            out.line(" ".join(res))
        return EXIT_OK

    return run


def _prune(g, a):
    order = a.order if a.order is not None else None
    return adj.prune(g, a.x, a.y, a.z or (), order=order)


def cmd_compare(a, out: Out) -> int:
    g = _graph(a.graph)
    res = adj.compare(g, a.x, a.y, a.z1, a.z2)
    if out.kv:
        out.pair("verdict", res.verdict.value)
        for i, c in enumerate(res.second_no_worse, 1):
            out.pair(f"second_no_worse.{i}", str(c))
        for i, c in enumerate(res.first_no_worse, 1):
            out.pair(f"first_no_worse.{i}", str(c))
    else:
        out.line(res.verdict.value)
        if a.verbose:
            for c in res.second_no_worse:
                out.line(f"  second no worse needs {c}")
            for c in res.first_no_worse:
                out.line(f"  first no worse needs {c}")
    return EXIT_OK


def _emit_matrix(out: Out, key: str, m) -> None:
    for y, x, v in m.items():
        if out.kv:
            out.pair(f"{key}[{y},{x}]", v)
        else:
            out.line(f"{y} <- {x}: {_num(v)}")


def cmd_avar(a, out: Out) -> int:
    sem = _sem(a.sem)
    _emit_matrix(out, "avar", avar(sem, a.x, a.y, a.z or (), check_valid=not a.unchecked))
    return EXIT_OK


def cmd_total_effect(a, out: Out) -> int:
    sem = _sem(a.sem)
    _emit_matrix(out, "effect", total_effect(sem, a.x, a.y))
    return EXIT_OK


def cmd_estimate(a, out: Out) -> int:
    from adjopt.estimation import Dataset, ols_total_effect

    data = Dataset.read(a.data)
    z = a.z or ()
    if a.sem.lower() != "none":
        sem = _sem(a.sem)
        dec = adj.is_valid_adjustment(sem.graph, a.x, a.y, z, witness=False)
        if not dec.valid:
            raise DomainError(f"z is not a valid adjustment set: {dec.describe()}")
        _emit_matrix(out, "truth", total_effect(sem, a.x, a.y))
    _emit_matrix(out, "estimate", ols_total_effect(data, a.x, a.y, z))
    if out.kv:
        out.pair("n", data.n)
    return EXIT_OK


def cmd_simulate(a, out: Out) -> int:
    from adjopt.simbench import SimConfig, run_sim, summarize

    cfg = SimConfig.from_text(_read(a.config))
    recs = run_sim(cfg, a.out, threads=a.threads)
    for k, v in summarize(recs).items():
        out.pair(k, v) if out.kv else out.line(f"{k}: {_num(v)}")
    return EXIT_OK


def cmd_oracle(a, out: Out) -> int:
    if a.oracle_cmd == "valid-sets":
        g = _graph(a.graph)
        sets = oracle.all_valid_adjustment_sets(g, a.x, a.y)
        if out.kv:
            out.pair("count", len(sets))
            for z in sets:
                out.pair("set", z)
        else:
            for z in sets:
                out.line("{" + ", ".join(z) + "}")
        return EXIT_OK
    if a.oracle_cmd == "dsep":
        g = _graph(a.graph)
        sep = oracle.dsep_by_extension(g, a.x, a.y, a.z or ())
        out.pair("separated", sep) if out.kv else out.line("separated" if sep else "not separated")
        return EXIT_OK
    sem = _sem(a.sem)
    rep = oracle.brute_optimality(sem, a.x, a.y, strict=False)
    if out.kv:
        out.pair("optimal", rep.optimal)
        out.pair("ok", rep.ok)
    else:
        out.line("optimal set: {" + ", ".join(rep.optimal) + "}")
    for z, vals in rep.table:
        label = "{" + ",".join(z) + "}"
        cells = " ".join(_num(v) for v in vals.ravel())
        out.pair(f"avar{label}", cells) if out.kv else out.line(f"  {label:<24} {cells}")
    return EXIT_OK if rep.ok else EXIT_DOMAIN


# -- parser -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "kv"), default="text", help="output style")

    p = _Parser(prog="adjopt", description="Covariate adjustment sets for DAGs, CPDAGs and maximal PDAGs.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def xy(sp, z=False, z_required=False):
        sp.add_argument("--x", type=node_list, required=True, help="treatments, comma separated")
        sp.add_argument("--y", type=node_list, required=True, help="outcomes, comma separated")
        if z:
            sp.add_argument("--z", type=node_list, required=z_required, default=None,
                            help='covariates, comma separated; "" is the empty set')

    s = sub.add_parser("validate", parents=[common], help="parse a graph and check maximality")
    s.add_argument("graph")
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("dsep", parents=[common], help="d-separation on a maximal PDAG")
    s.add_argument("graph")
    xy(s, z=True)
    s.set_defaults(fn=cmd_dsep)

    s = sub.add_parser("vas", parents=[common], help="check whether Z is a valid adjustment set")
    s.add_argument("graph")
    xy(s, z=True, z_required=True)
    s.set_defaults(fn=cmd_vas)

    s = sub.add_parser("optimal", parents=[common], help="the optimal adjustment set")
    s.add_argument("graph")
    xy(s)
    s.set_defaults(fn=_set_cmd("optimal", lambda g, a: adj.optimal_set(g, a.x, a.y)))

    s = sub.add_parser("adjust", parents=[common], help="the Adjust set")
    s.add_argument("graph")
    xy(s)
    s.set_defaults(fn=_set_cmd("adjust", lambda g, a: adj.adjust_set(g, a.x, a.y)))

    s = sub.add_parser("prune", parents=[common], help="prune a valid adjustment set")
    s.add_argument("graph")
    xy(s, z=True, z_required=True)
    s.add_argument("--order", type=node_list, default=None, help="scan order (a permutation of Z)")
    s.set_defaults(fn=_set_cmd("pruned", _prune))

    s = sub.add_parser("compare", parents=[common], help="graphical variance comparison of two sets")
    s.add_argument("graph")
    xy(s)
    s.add_argument("--z1", type=node_list, required=True)
    s.add_argument("--z2", type=node_list, required=True)
    s.add_argument("-v", "--verbose", action="store_true", help="print the separation statements")
    s.set_defaults(fn=cmd_compare)

    s = sub.add_parser("avar", parents=[common], help="asymptotic variance of the adjusted estimator")
    s.add_argument("sem")
    xy(s, z=True, z_required=True)
    s.add_argument("--unchecked", action="store_true", help="skip the validity check of Z")
    s.set_defaults(fn=cmd_avar)

    s = sub.add_parser("total-effect", parents=[common], help="total effects in a linear SEM")
    s.add_argument("sem")
    xy(s)
    s.set_defaults(fn=cmd_total_effect)

    s = sub.add_parser("estimate", parents=[common], help="least-squares effect estimate from CSV data")
    s.add_argument("sem", help='SEM file for the truth and a validity check, or "none"')
    s.add_argument("--data", required=True)
    xy(s, z=True)
    s.set_defaults(fn=cmd_estimate)

    s = sub.add_parser("simulate", parents=[common], help="run the simulation benchmark")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--threads", type=int, default=None, help="worker processes (default: ADJOPT_THREADS or CPU count)")
    s.set_defaults(fn=cmd_simulate)

    s = sub.add_parser("oracle", help="brute-force reference checks")
    osub = s.add_subparsers(dest="oracle_cmd", required=True, parser_class=_Parser)
    o = osub.add_parser("valid-sets", parents=[common], help="enumerate all valid adjustment sets")
    o.add_argument("graph")
    xy(o)
    o = osub.add_parser("dsep", parents=[common], help="d-separation over every represented DAG")
    o.add_argument("graph")
    xy(o, z=True)
    o = osub.add_parser("optimality", parents=[common], help="avar of every valid set")
    o.add_argument("sem")
    xy(o)
    s.set_defaults(fn=cmd_oracle)
    return p


def dispatch(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.WARNING, format="warning: %(message)s", stream=stderr)
    out = Out(a.format == "kv", stdout)
    try:
        return a.fn(a, out)
    except UsageError as e:
        print(f"error: {e}", file=stderr)
        return EXIT_USAGE
    except DomainError as e:
        print(f"error: {e}", file=stderr)
        return EXIT_DOMAIN
    except OSError as e:
        print(f"error: {e}", file=stderr)
        return EXIT_IO
    except AdjoptError as e:  # pragma: no cover - every error derives from one of the above
        print(f"error: {e}", file=stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
