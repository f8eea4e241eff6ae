import json

import pytest

from toxdesign.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def job(tmp_path):
    def write(data):
        path = tmp_path / "job.json"
        path.write_text(json.dumps(data))
        return str(path)

    return write


CANONICAL = {"theta2": [0.13, 0.27, 3.33], "alpha": 0.05}


def test_ed_prenatal(capsys, job):
    code, out, _ = run(capsys, "ed", "--config", job({"scenario": CANONICAL}))
    assert code == 0
    header, row = out.strip().splitlines()
    assert header == "scenario,ed,residual,g1,g2,g3"
    assert float(row.split(",")[1]) == pytest.approx(0.607, abs=5e-4)


def test_ed_overall_residual(capsys, job):
    scenario = {"theta1": [0.06, 0.7, 3.37], "theta2": [0.13, 0.3, 3.33], "endpoint": "overall"}
    code, out, _ = run(capsys, "ed", "--config", job({"scenario": scenario}), "--format", "json")
    record = json.loads(out)
    assert code == 0 and abs(record["residual"]) < 1e-12 and len(record["gradient"]) == 6


def test_local_opt(capsys, job):
    code, out, _ = run(capsys, "local-opt", "--config", job({"scenario": CANONICAL}), "--format", "json")
    record = json.loads(out)
    assert code == 0
    assert record["design"]["doses"] == pytest.approx([0, 0.686, 1], abs=5e-4)
    assert record["eff_uniform"] == pytest.approx(0.562, abs=5e-4)
    assert record["max_sensitivity"] <= 1 + 1e-4


def test_efficiency_matrix(capsys, job):
    cfg = {
        "scenarios": [{"label": "base", "theta2": [0.13, 0.27, 3.3]}],
        "designs": [{"doses": [0, 0.25, 0.5, 1], "weights": [1, 1, 1, 1]}, {"uniform": 5}],
    }
    code, out, _ = run(capsys, "efficiency", "--config", job(cfg))
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "d1,d2,d3,d4,d5,w1,w2,w3,w4,w5,base"
    assert float(lines[1].split(",")[-1]) == pytest.approx(0.28, abs=0.01)


def test_sensitivity_grid_has_end_points(capsys, job):
    cfg = {"scenario": CANONICAL, "design": {"uniform": 5}, "grid_points": 21}
    code, out, _ = run(capsys, "sensitivity", "--config", job(cfg))
    rows = [line.split(",") for line in out.strip().splitlines()[1:]]
    assert code == 0 and len(rows) == 21
    assert float(rows[0][0]) == 0 and float(rows[-1][0]) == 1
    assert max(float(r[1]) for r in rows) > 1


def test_optimal_design_sensitivity_below_one(capsys, job):
    cfg = {"scenario": CANONICAL, "design": {"doses": [0, 0.685935, 1], "weights": [0.396209, 0.548016, 0.0557749]}}
    code, out, _ = run(capsys, "sensitivity", "--config", job(cfg), "--format", "json")
    assert json.loads(out)["max_sensitivity"] <= 1 + 1e-4


def test_design_from_file(capsys, job, tmp_path):
    (tmp_path / "d.csv").write_text("dose,weight\n0,0.4\n0.686,0.55\n1,0.05\n")
    cfg = {"scenario": CANONICAL, "design": {"file": "d.csv"}, "grid_points": 11}
    code, _, _ = run(capsys, "sensitivity", "--config", job(cfg))
    assert code == 0


def test_maximin_degenerate_box(capsys, job):
    cfg = {"box": {"a2": [0.13, 0.13], "b2": [0.27, 0.27], "gamma2": [3.33, 3.33]}, "scenario": CANONICAL}
    code, out, _ = run(capsys, "maximin", "--config", job(cfg), "--format", "json")
    record = json.loads(out)
    assert code == 0 and record["min_eff"] == pytest.approx(1.0, abs=1e-9)
    assert len(record["scenarios"]) == 1


def test_unknown_table_is_usage_error(capsys):
    code, _, err = run(capsys, "table", "table99")
    assert code == 2 and "unknown table" in err


def test_bad_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


@pytest.mark.parametrize(
    "cfg",
    [{}, {"scenario": {"theta2": [0.13, -0.27, 3.33]}}, {"scenario": {"theta2": [0.1, 0.2, 3], "colour": 1}}],
)
def test_config_errors_exit_2(capsys, job, cfg):
    code, _, err = run(capsys, "ed", "--config", job(cfg))
    assert code == 2 and "configuration error" in err


def test_missing_config_file(capsys):
    assert run(capsys, "ed", "--config", "/nonexistent.json")[0] == 2


def test_computation_error_exits_1(capsys, job):
    cfg = {"scenario": CANONICAL, "design": {"doses": [0.5], "weights": [1]}}
    code, _, err = run(capsys, "sensitivity", "--config", job(cfg))
    assert code == 1 and "NotEstimable" in err


def test_output_file_and_determinism(capsys, job, tmp_path):
    cfg = job({"scenario": CANONICAL})
    outs = []
    for i in range(2):
        target = tmp_path / f"out{i}.csv"
        assert run(capsys, "local-opt", "--config", cfg, "--seed", "3", "--out", str(target))[0] == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]


def test_table_command(capsys):
    code, out, _ = run(capsys, "table", "table11")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 14
    assert lines[0].endswith("max_abs_diff")
