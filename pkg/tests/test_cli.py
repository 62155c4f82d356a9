import io

import pytest

from l0sense import matrices
from l0sense.cli import cli_main, lemma_summary


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli_main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def parse_kv(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


def test_construct_writes_sensemat(tmp_path):
    path = tmp_path / "a.mat"
    code, out, err = run(["construct", "--kind", "min-binary", "--n", "7", "--m", "3", "--out", str(path)])
    assert code == 0 and out == ""
    assert matrices.parse(path.read_bytes()) == matrices.min_cost_binary(7, 3)
    assert "l0 cost 12" in err


def test_construct_to_stdout():
    code, out, _ = run(["construct", "--kind", "identity", "--n", "3"])
    assert code == 0
    assert matrices.parse(out) == matrices.baseline_matrix("identity", 3, 3)


def test_construct_infeasible():
    code, out, err = run(["construct", "--kind", "min-binary", "--n", "8", "--m", "3"])
    assert code == 3 and out == ""
    assert "2^m - 1" in err


@pytest.mark.parametrize(
    "kind,extra",
    [
        ("gaussian", ["--t", "1"]),
        ("bisection-plan", []),
        ("grid-packing", ["--tau", "3", "--eps", "0.1", "--mu", "2.5631031310892007"]),
    ],
)
def test_construct_other_kinds(tmp_path, kind, extra):
    path = tmp_path / "m.mat"
    code, _, err = run(["construct", "--kind", kind, "--n", "16", "--out", str(path)] + extra)
    assert code == 0, err
    assert matrices.parse(path.read_bytes()).cols == 16


def test_construct_grid_packing_needs_params(tmp_path):
    code, _, err = run(["construct", "--kind", "grid-packing", "--n", "16", "--out", str(tmp_path / "x")])
    assert code == 2 and "--tau" in err


def test_bounds_binary():
    code, out, _ = run(["bounds", "--regime", "binary", "--n", "256", "--m", "9"])
    kv = parse_kv(out)
    assert code == 0
    assert (kv["r0"], kv["lower_bound"], kv["regime"]) == ("4", "842", "binary-noiseless")


def test_bounds_other_regimes():
    code, out, _ = run(["bounds", "--regime", "higher-m", "--n", "1048576", "--m", "1048576"])
    kv = parse_kv(out)
    assert code == 0 and kv["argmax_d"] == "16"
    assert float(kv["lower_bound"]) == pytest.approx(170495.30704027349, rel=1e-9)
    code, out, _ = run(["bounds", "--regime", "ksparse", "--n", "256", "--m", "9", "--k", "4"])
    assert code == 0 and parse_kv(out)["lower_bound"] == "842"
    code, out, _ = run(
        ["bounds", "--regime", "noisy", "--n", "100", "--m", "4", "--tau", "4", "--eps", "0.1", "--mu", "2.5631031310892007"]
    )
    assert code == 0 and parse_kv(out)["r0"] == "1"
    code, _, _ = run(["bounds", "--regime", "binary", "--n", "300", "--m", "8"])
    assert code == 3


def test_cost_subcommand(tmp_path):
    path = tmp_path / "a.mat"
    path.write_bytes(matrices.serialize(matrices.min_cost_binary(7, 3)))
    code, out, _ = run(["cost", "--matrix", str(path)])
    assert code == 0
    kv = parse_kv(out)
    assert kv["l0_cost"] == "12" and kv["reference_r0"] == "2"
    assert "weight 2: 3" in out


def test_cost_parse_error(tmp_path):
    path = tmp_path / "bad.mat"
    path.write_bytes(b"SENSEMAT 2\nkind binary\nrows 1\ncols 1\nnnz 0\n")
    code, out, err = run(["cost", "--matrix", str(path)])
    assert code == 4 and out == ""
    assert "line 1" in err


def test_cost_missing_file(tmp_path):
    assert run(["cost", "--matrix", str(tmp_path / "nope.mat")])[0] == 4


def test_simulate_outputs():
    argv = ["simulate", "--strategy", "bisection", "--n", "64", "--mu", "4", "--noisy", "--trials", "500", "--seed", "1", "--eps", "0.2"]
    code, out, _ = run(argv)
    kv = parse_kv(out)
    assert code == 0
    assert kv["trials"] == "500" and kv["meets_target"] in ("true", "false")
    assert run(argv)[1] == out
    code, out, _ = run(["simulate", "--strategy", "nonadaptive", "--n", "20", "--mu", "1", "--trials", "100", "--seed", "0"])
    assert code == 0 and parse_kv(out)["failures"] == "0"


def test_simulate_matrix_mismatch(tmp_path):
    path = tmp_path / "a.mat"
    path.write_bytes(matrices.serialize(matrices.min_cost_binary(7, 3)))
    argv = ["simulate", "--strategy", "nonadaptive", "--n", "8", "--matrix", str(path), "--mu", "1", "--trials", "10", "--seed", "0"]
    assert run(argv)[0] == 2


def test_sweep_and_chart(tmp_path):
    csv_path, svg_path = tmp_path / "s.csv", tmp_path / "s.svg"
    code, _, _ = run(
        ["sweep", "--n-min", "256", "--n-max", "4096", "--strategies", "min-binary,bisection", "--seed", "0", "--out", str(csv_path)]
    )
    assert code == 0
    assert len(csv_path.read_text().splitlines()) == 1 + 5 * 2
    assert run(["chart", "--csv", str(csv_path), "--out", str(svg_path)])[0] == 0
    assert svg_path.read_text().startswith("<svg")


def test_sweep_config_errors(tmp_path):
    base = ["sweep", "--seed", "0", "--out", str(tmp_path / "s.csv")]
    assert run(base + ["--strategies", "min-binary"])[0] == 2
    assert run(base + ["--n-values", "8", "--strategies", "nope"])[0] == 2
    assert run(base + ["--n-values", "8", "--strategies", "grid-packing"])[0] == 2


def test_lemmas():
    code, out, _ = run(["lemmas", "--m-max", "64"])
    assert code == 0
    assert out.splitlines() == [
        "lemma1: pass (992 checked, 0 failed)",
        "lemma2: pass (2016 checked, 0 failed)",
        "lemma3: pass (1000 checked, 0 failed)",
    ]
    assert lemma_summary(10)["lemma2"] == (45, 0)
    assert run(["lemmas", "--m-max", "1"])[0] == 2


def test_lemmas_failure_exit_code(monkeypatch):
    from l0sense import cli

    monkeypatch.setattr(cli, "lemma_summary", lambda m_max: {"lemma1": (3, 1)})
    assert run(["lemmas", "--m-max", "5"])[0] == 1


@pytest.mark.parametrize("argv", [["bogus"], [], ["bounds", "--regime", "binary", "--n", "x", "--m", "3"]])
def test_usage_errors(argv, capsys):
    assert run(argv)[0] == 2
    assert "usage" in capsys.readouterr().err


def test_domain_error_is_usage():
    assert run(["bounds", "--regime", "higher-m", "--n", "4", "--m", "1"])[0] == 2
