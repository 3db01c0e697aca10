import json
from pathlib import Path

import jsonschema
import pytest

from schurdistill.cli import main
from schurdistill.report import load_schema

GOLDEN = Path(__file__).parent / "golden"

GOLDEN_RUNS = {
    "rate_table.json": ["rate-table", "--spectrum", "0.5,0.5", "--k", "3", "--seed", "0"],
    "moment_distance.json": ["moment-distance", "--a", "haar:4", "--b", "subsystem:4:2", "--k", "2", "--seed", "0"],
    "tomo_plan.json": ["tomo-plan", "--n", "4", "--epsilon", "0.1", "--kn", "100", "--seed", "0"],
}

SMOKE_RUNS = [
    ["rate-table", "--spectrum", "0.9,0.1", "--k", "2,4", "--thresholds", "1"],
    ["schur-law", "--spectrum", "0.6,0.4", "--k", "3", "--method", "bruteforce"],
    ["verify-iid", "--state", "random", "--k", "2"],
    ["run-protocol", "--k", "3", "--trials", "50"],
    ["bounds", "--spectrum", "0.125," * 7 + "0.125", "--k", "8"],
    ["dominance", "--spectrum", "0.7,0.3", "--k", "5"],
    ["moment-distance", "--a", "haar:2", "--b", "subsystem:2:1", "--k", "2", "--mode", "empirical", "--samples", "20"],
    ["concentration", "--ensemble", "haar:2", "--k", "1", "--samples", "100,200"],
    ["planted-entropy", "--eta", "0.25", "--s-min", "1", "--inner-s1", "2", "--inner-smin", "1.5"],
    ["entropy-test-instance", "--alpha", "1", "--beta", "3", "--n", "6"],
    ["tomo-plan", "--n", "2", "--epsilon", "0.2", "--kn", "10", "--s-min", "0.5"],
    ["rate-bounds", "--s1", "1", "--na", "4", "--p", "0.99", "--epsilon", "0.0001"],
]


def _run(argv, tmp_path, name="out"):
    out = tmp_path / name
    code = main(list(argv) + ["--out", str(out)])
    return code, out.read_bytes() if out.exists() else b""


@pytest.mark.parametrize("golden", sorted(GOLDEN_RUNS))
def test_golden_outputs_are_byte_identical(golden, tmp_path):
    code, first = _run(GOLDEN_RUNS[golden], tmp_path, "a")
    _, second = _run(GOLDEN_RUNS[golden], tmp_path, "b")
    assert code == 0
    assert first == second == (GOLDEN / golden).read_bytes()


@pytest.mark.parametrize("argv", SMOKE_RUNS, ids=[r[0] for r in SMOKE_RUNS])
def test_reports_validate_and_repeat(argv, tmp_path):
    code, first = _run(argv + ["--seed", "11"], tmp_path, "a")
    assert code == 0
    jsonschema.validate(json.loads(first), load_schema())
    _, second = _run(argv + ["--seed", "11"], tmp_path, "b")
    assert first == second


def test_csv_output(tmp_path):
    code, text = _run(["rate-table", "--spectrum", "0.5,0.5", "--k", "3", "--format", "csv"], tmp_path)
    assert code == 0
    lines = text.decode().splitlines()
    assert lines[0] == "k,lambda,prob,ebits"
    assert lines[1:] == ["3,3,0.5,0.0", "3,2 1,0.5,1.0"]


def test_seed_changes_sampled_output(tmp_path):
    argv = ["run-protocol", "--k", "3", "--trials", "50"]
    _, a = _run(argv + ["--seed", "1"], tmp_path, "a")
    _, b = _run(argv + ["--seed", "2"], tmp_path, "b")
    assert json.loads(a)["seed"] == 1 and json.loads(b)["seed"] == 2


def test_domain_errors_exit_2(capsys):
    assert main(["rate-table", "--spectrum", "0.5,0.6", "--k", "2"]) == 2
    assert "error" in capsys.readouterr().err
    assert main(["rate-table", "--spectrum", "0.5,abc", "--k", "2"]) == 2
    assert main(["no-such-command"]) == 2
    assert main(["rate-bounds", "--s1", "1", "--na", "4", "--p", "0.1", "--epsilon", "0.2"]) == 2


def test_capacity_errors_exit_3(capsys):
    assert main(["verify-iid", "--state", "random", "--split", "2,2", "--k", "4", "--cap", "1000"]) == 3
    assert "capacity" in capsys.readouterr().err
    assert main(["moment-distance", "--a", "haar:6", "--b", "restricted:6:2:10:1", "--k", "2"]) == 3


def test_rate_table_rows_match_law():
    from schurdistill.distillation import distill_law

    rows = json.loads((GOLDEN / "rate_table.json").read_text())["rows"]
    law = {tuple(o.partition): o.probability for o in distill_law((0.5, 0.5), 3)}
    assert {tuple(r["lambda"]): r["prob"] for r in rows} == law


def test_moment_distance_golden_matches_library():
    from schurdistill.ensembles import Haar, HaarSubsystem, moment_distance

    rows = json.loads((GOLDEN / "moment_distance.json").read_text())["rows"]
    assert rows[0]["distance"] == moment_distance(Haar(4), HaarSubsystem(4, 2), 2).distance


@pytest.mark.parametrize("argv", SMOKE_RUNS, ids=[r[0] for r in SMOKE_RUNS])
def test_every_subcommand_writes_csv(argv, tmp_path):
    code, first = _run(argv + ["--format", "csv"], tmp_path, "a")
    _, second = _run(argv + ["--format", "csv"], tmp_path, "b")
    assert code == 0 and first == second
    text = first.decode()
    assert text.endswith("\n") and "\r" not in text and text.splitlines()[0]


def test_pure_spectrum_gives_single_row(tmp_path):
    _, out = _run(["rate-table", "--spectrum", "1.0", "--k", "5"], tmp_path)
    rows = json.loads(out)["rows"]
    assert len(rows) == 1 and rows[0]["ebits"] == 0.0 and rows[0]["prob"] == 1.0


def test_moment_distance_modes(tmp_path):
    _, out = _run(["moment-distance", "--a", "haar:3", "--b", "haar:3", "--k", "2"], tmp_path, "a")
    assert json.loads(out)["rows"][0]["distance"] == 0.0
    argv = ["moment-distance", "--a", "haar:2", "--b", "subsystem:2:1", "--k", "1", "--mode", "empirical", "--samples", "40"]
    _, out = _run(argv, tmp_path, "b")
    tag = json.loads(out)["summary"]["a"]
    assert tag["samples"] == 40 and tag["bernstein_epsilon"] > 0


def test_tomo_plan_branch_one_and_invalid_epsilon(tmp_path):
    argv = ["tomo-plan", "--n", "4", "--epsilon", "0.1", "--kn", "100", "--ka", "10", "--kb", "10", "--s-min", "0.000625"]
    _, out = _run(argv, tmp_path)
    row = json.loads(out)["rows"][0]
    assert row["branch"] == "product_approximation" and row["branch_copies"] == 20
    assert main(["tomo-plan", "--n", "4", "--epsilon", "0", "--kn", "100"]) == 2
