import json

import pytest
from click.testing import CliRunner

from fieldsense.cli import main

from conftest import FIXTURES


@pytest.fixture
def runner():
    return CliRunner()


def train_args(tmp_path, out="model.json"):
    return [
        "train",
        "--data", str(FIXTURES / "bank_data.csv"),
        "--schema", str(FIXTURES / "bank_schema.json"),
        "--seed", "7",
        "--out", str(tmp_path / out),
    ]


def test_train_writes_artifact_and_report(runner, tmp_path):
    result = runner.invoke(main, train_args(tmp_path))
    assert result.exit_code == 0, result.output
    assert (tmp_path / "model.json").exists()
    assert "removed field: name (unique-ratio>0.9)" in result.output
    assert "independent fields:" in result.output
    assert "clusters: k=" in result.output
    assert "model global:" in result.output


def test_train_is_run_to_run_identical(runner, tmp_path):
    assert runner.invoke(main, train_args(tmp_path, "a.json")).exit_code == 0
    assert runner.invoke(main, train_args(tmp_path, "b.json")).exit_code == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_train_missing_data_exits_2(runner, tmp_path):
    result = runner.invoke(main, [
        "train", "--data", str(tmp_path / "ghost.csv"),
        "--schema", str(FIXTURES / "bank_schema.json"),
        "--out", str(tmp_path / "m.json"),
    ])
    assert result.exit_code == 2
    assert result.output.splitlines()[-1].startswith("error: ")


def test_suggest_prints_ranked_values(runner, tmp_path):
    runner.invoke(main, train_args(tmp_path))
    result = runner.invoke(main, [
        "suggest", "--model", str(tmp_path / "model.json"),
        "--target", "primary activity",
        "--filled", "company type=Leasing",
        "--filled", "entity=Private",
        "--theta", "0.2",
    ])
    assert result.exit_code == 0, result.output
    assert "model_used:" in result.output
    assert "check_dep:" in result.output


def test_suggest_target_typo_exits_3_with_hint(runner, tmp_path):
    runner.invoke(main, train_args(tmp_path))
    result = runner.invoke(main, [
        "suggest", "--model", str(tmp_path / "model.json"),
        "--target", "primary activty",
    ])
    assert result.exit_code == 3
    assert "did you mean 'primary activity'?" in result.output


def test_suggest_never_fails_on_unendorsed(runner, tmp_path):
    runner.invoke(main, train_args(tmp_path))
    result = runner.invoke(main, [
        "suggest", "--model", str(tmp_path / "model.json"),
        "--target", "primary activity", "--theta", "1.0",
    ])
    assert result.exit_code == 0
    assert ("no suggestion (not endorsed)" in result.output) or "\t" in result.output


def test_evaluate_writes_reports(runner, tmp_path):
    synth_dir = tmp_path / "synthdata"
    result = runner.invoke(main, ["synth", "--out", str(synth_dir),
                                  "--instances", "400", "--seed", "3"])
    assert result.exit_code == 0, result.output
    result = runner.invoke(main, [
        "evaluate",
        "--data", str(synth_dir / "data.csv"),
        "--schema", str(synth_dir / "schema.json"),
        "--algorithms", "mfm,fls",
        "--seed", "3",
        "--out", str(tmp_path / "report"),
    ])
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "report.json").read_text())
    assert set(report["reports"]) == {"mfm", "fls"}
    csv_text = (tmp_path / "report.csv").read_text()
    assert csv_text.startswith("algorithm,scenario,target,mrr,pcr,provided,total")


def test_evaluate_same_seed_identical_reports(runner, tmp_path):
    synth_dir = tmp_path / "synthdata"
    runner.invoke(main, ["synth", "--out", str(synth_dir), "--instances", "300"])
    for name in ("r1", "r2"):
        result = runner.invoke(main, [
            "evaluate", "--data", str(synth_dir / "data.csv"),
            "--schema", str(synth_dir / "schema.json"),
            "--scenario", "random", "--algorithms", "mfm",
            "--seed", "11", "--out", str(tmp_path / name),
        ])
        assert result.exit_code == 0, result.output
    assert (tmp_path / "r1.json").read_text() == (tmp_path / "r2.json").read_text()


def test_evaluate_unknown_algorithm_exits_4(runner, tmp_path):
    result = runner.invoke(main, [
        "evaluate", "--data", str(FIXTURES / "bank_data7.csv"),
        "--schema", str(FIXTURES / "bank_schema.json"),
        "--algorithms", "oracle9000",
        "--out", str(tmp_path / "r"),
    ])
    assert result.exit_code == 4
    assert "valid names" in result.output


def test_serve_rejects_bad_bind(runner, tmp_path):
    runner.invoke(main, train_args(tmp_path))
    result = runner.invoke(main, [
        "serve", "--model", str(tmp_path / "model.json"), "--bind", "nonsense",
    ])
    assert result.exit_code == 4
