import pytest

from natr.bench import load_records_csv
from natr.cli import run_cli
from natr.solver import load_trace

SECTION4_DEFAULTS = {
    "mu": "0.01",
    "tau": "0.1",
    "gamma": "1.7",
    "delta_bar": "100.0",
    "alpha0": "0.15",
    "alpha1": "0.35",
    "N": "10",
    "N_bar": "10",
    "I_bar": "3",
    "nu": "0.25",
    "c_fixed": "0.35",
    "eps_rel": "1e-06",
    "max_iters": "10000",
    "max_fevals": "100000",
}


def run(args):
    return run_cli(args)


def usage_error(args):
    with pytest.raises(SystemExit) as err:
        run_cli(args)
    return err.value.code


def test_list_problems(capsys):
    assert run(["list-problems"]) == 0
    out = capsys.readouterr().out
    assert "SROSENBR" in out
    line = next(l for l in out.splitlines() if l.startswith("SROSENBR"))
    assert line.split()[1:] == ["100", "500", "1000", "5000"]
    assert "DIXMAANL" in out


def test_solve_converges(capsys):
    rc = run(["solve", "--problem", "SROSENBR", "--dim", "100",
              "--policy", "natr"])
    out = capsys.readouterr().out
    assert rc == 0
    assert out.startswith("status=converged")
    assert "iters=" in out and "fevals=" in out and "gnorm=" in out
    assert len(out.strip().splitlines()) == 1


def test_solve_budget_exhaustion_exit_code():
    rc = run(["solve", "--problem", "SROSENBR", "--dim", "100",
              "--param", "max_iters=2"])
    assert rc == 2


def test_solve_missing_dim_is_usage_error():
    assert usage_error(["solve", "--problem", "SROSENBR"]) == 64


def test_unknown_flag_is_usage_error():
    assert usage_error(["solve", "--problem", "SROSENBR", "--dim", "100",
                        "--frobnicate"]) == 64


def test_unknown_subcommand_is_usage_error():
    assert usage_error(["explode"]) == 64


def test_unknown_param_key_is_usage_error():
    assert usage_error(["solve", "--problem", "SROSENBR", "--dim", "100",
                        "--param", "warp=9"]) == 64
    assert usage_error(["solve", "--problem", "SROSENBR", "--dim", "100",
                        "--param", "mu"]) == 64


def test_unknown_problem_is_usage_error():
    assert usage_error(["solve", "--problem", "NOSUCH", "--dim", "10"]) == 64
    assert usage_error(["solve", "--problem", "WOODS", "--dim", "10"]) == 64


def test_print_config_defaults(capsys):
    rc = run(["solve", "--problem", "SROSENBR", "--dim", "100",
              "--print-config"])
    assert rc == 0
    values = dict(line.split("=", 1)
                  for line in capsys.readouterr().out.splitlines())
    for key, expected in SECTION4_DEFAULTS.items():
        assert values[key] == expected, key
    assert values["policy"] == "natr"


def test_param_override_shows_in_config(capsys):
    rc = run(["solve", "--problem", "SROSENBR", "--dim", "100",
              "--param", "mu=0.2", "--param", "N_bar=5", "--print-config"])
    assert rc == 0
    values = dict(line.split("=", 1)
                  for line in capsys.readouterr().out.splitlines())
    assert values["mu"] == "0.2"
    assert values["N_bar"] == "5"


def test_solve_writes_trace(tmp_path, capsys):
    path = tmp_path / "trace.txt"
    rc = run(["solve", "--problem", "TRIDIA", "--dim", "10",
              "--trace", str(path)])
    assert rc == 0
    records = load_trace(path)
    assert records
    assert records[0].k == 0


def test_check_grad_pass(capsys):
    assert run(["check-grad", "--problem", "DQDRTIC", "--dim", "12"]) == 0
    assert "max_rel_err=" in capsys.readouterr().out


def test_check_grad_all_policies_smoke(capsys):
    for policy in ("natr", "iatr", "niatr1", "niatr2", "monotone"):
        rc = run(["solve", "--problem", "TRIDIA", "--dim", "10",
                  "--policy", policy])
        assert rc == 0
    capsys.readouterr()


def test_bench_and_profile_pipeline(tmp_path, capsys):
    suite = tmp_path / "suite.txt"
    suite.write_text("# tiny desk suite\nSROSENBR 10\nTRIDIA 10  # inline\n")
    out_dir = tmp_path / "out"
    rc = run(["bench", "--suite", str(suite), "--out", str(out_dir)])
    assert rc == 0
    records_path = out_dir / "records.csv"
    records = load_records_csv(records_path)
    assert len(records) == 8  # 2 problems x 4 policies
    assert {r.solver for r in records} == {"iatr", "niatr1", "niatr2", "natr"}

    rc = run(["profile", "--records", str(records_path),
              "--index", "fevals", "--out", str(out_dir)])
    assert rc == 0
    assert (out_dir / "profile_fevals.csv").exists()
    assert (out_dir / "profile_fevals.svg").exists()
    capsys.readouterr()


def test_bench_rejects_bad_suite(tmp_path):
    bad = tmp_path / "suite.txt"
    bad.write_text("SROSENBR\n")
    assert usage_error(["bench", "--suite", str(bad),
                        "--out", str(tmp_path)]) == 64
    assert usage_error(["bench", "--suite", str(tmp_path / "missing.txt"),
                        "--out", str(tmp_path)]) == 64


def test_profile_rejects_missing_records(tmp_path):
    assert usage_error(["profile", "--records", str(tmp_path / "no.csv"),
                        "--out", str(tmp_path)]) == 64
