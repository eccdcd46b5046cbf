import io
import subprocess
import sys

import pytest

from adjopt.cli import EXIT_DOMAIN, EXIT_IO, EXIT_OK, EXIT_USAGE, dispatch, node_list
from adjopt.estimation import Rng, sample
from adjopt.sem import parse_sem


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = dispatch([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_node_list():
    assert node_list("A, B,,C") == ("A", "B", "C")
    assert node_list("") == ()


def test_optimal_golden(data_dir):
    assert run("optimal", data_dir / "fig1.g", "--x", "V4", "--y", "V6") == (EXIT_OK, "V2 V3\n", "")
    assert run("optimal", data_dir / "fig2a.g", "--x", "X", "--y", "Y", "--format", "kv")[1] == "optimal=B,C\n"


def test_empty_optimal_prints_empty_line(data_dir):
    assert run("optimal", data_dir / "fig3c.g", "--x", "V1", "--y", "V4")[:2] == (EXIT_OK, "\n")


def test_adjust_and_prune(data_dir):
    g = data_dir / "fig2a.g"
    assert run("adjust", g, "--x", "X", "--y", "Y")[1] == "A B C\n"
    assert run("prune", g, "--x", "X", "--y", "Y", "--z", "A,B,D")[1] == "B\n"
    assert run("prune", g, "--x", "X", "--y", "Y", "--z", "D,C,B,A", "--order", "A,B,C,D")[1] == "B C\n"


def test_vas(data_dir):
    g = data_dir / "fig2a.g"
    assert run("vas", g, "--x", "X", "--y", "Y", "--z", "B")[:2] == (EXIT_OK, "valid\n")
    code, out, _ = run("vas", g, "--x", "X", "--y", "Y", "--z", "", "--format", "kv")
    assert code == EXIT_DOMAIN
    assert out == "valid=false\nfailed_condition=open_path\ndetail=X,B,Y\n"
    # --z is required: omitted differs from empty
    assert run("vas", g, "--x", "X", "--y", "Y")[0] == EXIT_USAGE


def test_compare(data_dir):
    g = data_dir / "fig2a.g"
    assert run("compare", g, "--x", "X", "--y", "Y", "--z1", "A,B", "--z2", "B,C")[1] == "SECOND_NO_WORSE\n"
    _, out, _ = run("compare", g, "--x", "X", "--y", "Y", "--z1", "A,B", "--z2", "B,C", "-v")
    assert out.startswith("SECOND_NO_WORSE\n  second no worse needs")


def test_dsep_and_validate(data_dir):
    g = data_dir / "fig2a.g"
    assert run("dsep", g, "--x", "Y", "--y", "A", "--z", "B,C,X")[1] == "separated\n"
    _, out, _ = run("dsep", g, "--x", "X", "--y", "C", "--z", "Y", "--format", "kv")
    assert out.startswith("separated=false\nwitness=X,")
    assert run("validate", data_dir / "fig3b.g", "--format", "kv")[1] == (
        "nodes=4\ndirected=1\nundirected=3\nmaximal=true\n"
    )


def test_avar_and_total_effect(data_dir):
    sem = data_dir / "table2_i.sem"
    assert run("avar", sem, "--x", "X", "--y", "Y", "--z", "C")[1] == "Y <- X: 0.484848\n"
    assert run("avar", sem, "--x", "X", "--y", "Y", "--z", "A", "--format", "kv")[1] == "avar[Y,X]=1\n"
    assert run("total-effect", sem, "--x", "X", "--y", "Y", "--format", "kv")[1] == "effect[Y,X]=2\n"
    code, _, err = run("avar", sem, "--x", "X", "--y", "Y", "--z", "X")
    assert code == EXIT_USAGE and "overlap" in err


def test_estimate(data_dir, tmp_path):
    semf = data_dir / "table2_i.sem"
    data = sample(parse_sem(semf.read_text()), 20_000, Rng(1))
    data.write(tmp_path / "d.csv")
    code, out, _ = run("estimate", semf, "--data", tmp_path / "d.csv", "--x", "X", "--y", "Y", "--z", "C", "--format", "kv")
    assert code == EXIT_OK
    vals = dict(line.split("=") for line in out.splitlines())
    assert float(vals["truth[Y,X]"]) == 2
    assert abs(float(vals["estimate[Y,X]"]) - 2) < 0.05
    assert vals["n"] == "20000"
    assert run("estimate", semf, "--data", tmp_path / "d.csv", "--x", "X", "--y", "Y", "--z", "B")[0] == EXIT_DOMAIN
    assert run("estimate", "none", "--data", tmp_path / "d.csv", "--x", "X", "--y", "Y")[0] == EXIT_OK


def test_oracle_commands(data_dir):
    code, out, _ = run("oracle", "valid-sets", data_dir / "fig2a.g", "--x", "X", "--y", "Y", "--format", "kv")
    assert code == EXIT_OK and out.startswith("count=8\n")
    assert run("oracle", "dsep", data_dir / "fig3a.g", "--x", "V2", "--y", "V3", "--z", "V1")[1] == "separated\n"
    code, out, _ = run("oracle", "optimality", data_dir / "table2_ii.sem", "--x", "X", "--y", "Y", "--format", "kv")
    assert code == EXIT_OK
    assert out.startswith("optimal=C\nok=true\n")


@pytest.mark.parametrize(
    "argv, code, needle",
    [
        (["optimal", "missing.g", "--x", "X", "--y", "Y"], EXIT_IO, "missing.g"),
        (["optimal", "{d}/fig2a.g", "--x", "Q", "--y", "Y"], EXIT_USAGE, "unknown node"),
        (["optimal", "{d}/fig3a.g", "--x", "V1", "--y", "V4"], EXIT_DOMAIN, "amenable"),
        (["optimal", "{d}/fig2a.g", "--x", "X"], EXIT_USAGE, "--y"),
        (["frobnicate"], EXIT_USAGE, "invalid choice"),
        (["avar", "{d}/table2_i.sem", "--x", "X", "--y", "Y", "--z", "B"], EXIT_DOMAIN, "not a valid adjustment set"),
    ],
)
def test_exit_codes(data_dir, argv, code, needle, capsys):
    argv = [a.format(d=data_dir) for a in argv]
    got, _, err = run(*argv)
    err += capsys.readouterr().err
    assert got == code
    assert needle in err


def test_syntax_error_exit(tmp_path):
    (tmp_path / "bad.g").write_text("A -> B\nA => C\n")
    code, _, err = run("validate", tmp_path / "bad.g")
    assert code == EXIT_USAGE and "line 2" in err


def test_simulate_and_console_script(tmp_path, data_dir):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("n_graphs = 2\np = 6\nnbr = 2\nn = 100\nkx = 1:1\nreplicates = 3\nseed = 1\n")
    code, out, _ = run("simulate", "--config", cfg, "--out", tmp_path / "o", "--threads", "1", "--format", "kv")
    assert code == EXIT_OK and "models=2" in out
    assert (tmp_path / "o" / "results.csv").exists()
    proc = subprocess.run(
        [sys.executable, "-m", "adjopt.cli", "optimal", str(data_dir / "fig2b.g"), "--x", "X", "--y", "Y"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and proc.stdout == "C\n"


def test_kv_numbers_are_six_significant_digits(data_dir):
    _, out, _ = run("avar", data_dir / "table2_ii.sem", "--x", "X", "--y", "Y", "--z", "", "--format", "kv")
    assert out == "avar[Y,X]=0.502008\n"
