import json

from click.testing import CliRunner

from offo.cli import main


def invoke(*args):
    return CliRunner().invoke(main, list(args), catch_exceptions=False)


def test_run_writes_trace(tmp_path):
    out = tmp_path / "trace.csv"
    res = invoke("run", "--problem", "tridia", "--n", "6", "--method", "adagrad",
                 "--eps", "1e-4", "--max-iter", "5000", "--trace", str(out))
    assert res.exit_code == 0, res.output
    assert "status=converged" in res.output
    assert out.read_text().startswith("k,normg,f,delta_min,delta_max,gamma,status")


def test_run_noisy_with_seed():
    res = invoke("run", "--problem", "tridia", "--n", "6", "--method", "adagrad",
                 "--eps", "1e-3", "--max-iter", "3000", "--noise", "0.05", "--seed", "2")
    assert res.exit_code == 0, res.output
    assert "status=converged" in res.output


def test_run_sdba():
    res = invoke("run", "--problem", "tridia", "--n", "6", "--method", "sdba",
                 "--eps", "1e-4", "--max-iter", "5000")
    assert res.exit_code == 0, res.output


def test_verify_lambert(tmp_path):
    report = tmp_path / "report.json"
    res = invoke("verify", "--suite", "lambert", "--report", str(report))
    assert res.exit_code == 0, res.output
    data = json.loads(report.read_text())
    assert data["passed"] is True


def test_verify_series():
    res = invoke("verify", "--suite", "series")
    assert res.exit_code == 0, res.output
    assert json.loads(res.output)["passed"] is True


def test_sharpness_csv_and_replay(tmp_path):
    out = tmp_path / "seq.csv"
    res = invoke("sharpness", "--kind", "thm31", "--mu", "0.5", "--eta", "0.01",
                 "--iters", "50", "--out", str(out))
    assert res.exit_code == 0, res.output
    assert "matched=True" in res.output
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "k,x,f,g"
    assert len(lines) == 52


def test_sharpness_thm41():
    res = invoke("sharpness", "--kind", "thm41", "--iters", "50", "--no-replay")
    assert res.exit_code == 0, res.output
    assert "admissibility margins" in res.output


def test_bench_small_matrix(tmp_path):
    res = invoke("bench", "--methods", "adagrad,maxg", "--problems", "cube,beale",
                 "--noise", "0", "--seeds", "1", "--eps", "1e-3",
                 "--max-iter", "2000", "--out", str(tmp_path))
    assert res.exit_code == 0, res.output
    assert (tmp_path / "records.csv").exists()
    assert (tmp_path / "aggregate.json").exists()


def test_problem_dump():
    res = invoke("problem", "rosenbr", "--n", "2")
    assert res.exit_code == 0
    data = json.loads(res.output)
    assert data == {"name": "rosenbr", "n": 2, "x0": [-1.2, 1.0], "f_low": 0.0}
