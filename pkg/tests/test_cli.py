import csv
import json

from uavee.bench import CSV_HEADER
from uavee.cli import cli_main
from uavee.scenario import ScenarioConfig


def test_run_writes_csv(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code = cli_main(
        ["run", "--pairs", "2", "--trials", "10", "--seed", "1", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + 30  # 10 trials x 3 algorithms
    rows = list(csv.DictReader(lines))
    assert {r["algorithm"] for r in rows} == {"jhtpa", "opa", "oht"}
    summary = json.loads(capsys.readouterr().out)
    assert summary["summary"]


def test_run_rejects_zero_pairs(capsys):
    assert cli_main(["run", "--pairs", "0"]) == 1
    assert "error" in capsys.readouterr().err


def test_unknown_flag_exits_one(capsys):
    assert cli_main(["run", "--frobnicate"]) == 1
    err = capsys.readouterr().err
    assert "usage" in err


def test_unknown_subcommand_exits_one(capsys):
    assert cli_main(["explode"]) == 1


def test_gen_scenario_roundtrip(tmp_path):
    out = tmp_path / "s.json"
    assert cli_main(["gen-scenario", "--pairs", "3", "--seed", "11", "--out", str(out)]) == 0
    config = ScenarioConfig.from_json(out.read_text())
    assert config.num_pairs == 3
    assert config.seed == 11


def test_gen_scenario_requires_seed(capsys):
    assert cli_main(["gen-scenario", "--pairs", "3"]) == 1


def test_solve_outputs_report(tmp_path, capsys):
    scenario = tmp_path / "s.json"
    cli_main(["gen-scenario", "--pairs", "2", "--seed", "7", "--out", str(scenario)])
    capsys.readouterr()
    assert cli_main(["solve", "--scenario", str(scenario), "--algorithm", "oht"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["algorithm"] == "oht"
    assert report["status"] == "converged"
    assert report["ee_nats_per_joule"] > 0.0


def test_solve_missing_scenario_is_runtime_error(tmp_path, capsys):
    code = cli_main(["solve", "--scenario", str(tmp_path / "nope.json"), "--algorithm", "oht"])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_run_invalid_algorithms(capsys):
    assert cli_main(["run", "--pairs", "2", "--algorithms", "genie"]) == 1


def test_selftest_passes(capsys):
    assert cli_main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    assert "FAIL" not in out
