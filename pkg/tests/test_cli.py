import json

import pytest

from copaug.cli.main import EXIT_KS_FAILED, _experiment_config, build_parser, main
from copaug.errors import ConfigError, StageError, TooFewRows

TINY_RUN = {
    "bundled_rows": 300,
    "synthetic_levels": [20, 50],
    "tuning_k": 2,
    "eval_k": 3,
    "grid": {"n_estimators": [10], "learning_rate": [0.1], "max_depth": [2]},
    "master_seed": 7,
}


COMMANDS = ("generate-data", "fit-copula", "sample", "ks-test", "run", "report")


def _exit_code(argv) -> int:
    with pytest.raises(SystemExit) as exc:
        main(argv)
    return exc.value.code


@pytest.mark.parametrize(
    "argv",
    [
        ["--help"],
        ["--version"],
        *([command, "--help"] for command in COMMANDS),
    ],
)
def test_help_exits_cleanly(argv):
    assert _exit_code(argv) == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "--bogus"],
        ["run", "--config", "does-not-exist.json"],
        ["sample", "--model", "m.json", "--n", "0", "--out", "s.csv"],
        ["ks-test", "--real", "a.csv", "--synth", "b.csv", "--alpha", "1.5"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_two(argv):
    assert _exit_code(argv) == 2


def test_copula_workflow(tmp_path, capsys):
    data, model, synth = tmp_path / "data.csv", tmp_path / "model.json", tmp_path / "synth.csv"
    assert main(["generate-data", "--n", "400", "--seed", "1", "--out", str(data)]) == 0
    assert main(["fit-copula", "--input", str(data), "--out", str(model), "--seed", "3"]) == 0
    assert "correlation of normal scores" in capsys.readouterr().out
    assert json.loads(model.read_text())["format"] == "copula-v1"

    assert main(["sample", "--model", str(model), "--n", "200", "--out", str(synth)]) == 0
    assert len(synth.read_text().splitlines()) == 201
    assert main(["ks-test", "--real", str(data), "--synth", str(data)]) == 0


def test_refit_is_byte_identical(tmp_path):
    data = tmp_path / "data.csv"
    main(["generate-data", "--n", "200", "--out", str(data)])
    for name in ("a.json", "b.json"):
        main(["fit-copula", "--input", str(data), "--out", str(tmp_path / name), "--seed", "5"])
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_ks_test_failure_exit_code(write_csv):
    real = write_csv("v\n" + "\n".join(str(i) for i in range(1, 101)) + "\n", "real.csv")
    synth = write_csv("v\n" + "\n".join(str(i + 1000) for i in range(1, 101)) + "\n", "synth.csv")
    assert main(["ks-test", "--real", str(real), "--synth", str(synth)]) == EXIT_KS_FAILED


def test_fit_copula_too_few_rows(write_csv, tmp_path, capsys):
    path = write_csv("x,y\n1,2\n2,3\n3,4\n4,5\n5,6\n")
    assert main(["fit-copula", "--input", str(path), "--out", str(tmp_path / "m.json")]) == 1
    assert "need at least 10 rows, got 5" in capsys.readouterr().err
    assert not (tmp_path / "m.json").exists()


def test_run_writes_report(tmp_path, capsys):
    config = tmp_path / "exp.json"
    config.write_text(json.dumps(TINY_RUN))
    out = tmp_path / "results"
    assert main(["run", "--config", str(config), "--out", str(out), "--workers", "1"]) == 0
    assert len(list(out.iterdir())) == 6
    summary = capsys.readouterr().out
    assert "Baseline" in summary and "Synthetic 50" in summary

    first = json.loads((out / "report.json").read_text())
    assert main(["run", "--config", str(config), "--out", str(out), "--workers", "1"]) == 0
    second = json.loads((out / "report.json").read_text())
    for payload in (first, second):
        del payload["provenance"]["timestamp"]
    assert first == second

    again = tmp_path / "again"
    assert main(["report", "--input", str(out / "report.json"), "--out", str(again)]) == 0
    assert sorted(p.name for p in again.iterdir()) == sorted(
        p.name for p in out.iterdir() if p.name != "report.json"
    )


def test_run_stage_failure_exits_one(mocker, tmp_path, capsys):
    mocker.patch(
        "copaug.cli.main.run_experiment",
        side_effect=StageError("split", TooFewRows(1, 2)),
    )
    assert main(["run", "--out", str(tmp_path / "results")]) == 1
    assert "[split]" in capsys.readouterr().err
    assert not (tmp_path / "results").exists()


def test_run_with_mistyped_config_exits_one(tmp_path, capsys):
    config = tmp_path / "exp.json"
    config.write_text(json.dumps({**TINY_RUN, "master_seed": "7"}))
    assert main(["run", "--config", str(config), "--out", str(tmp_path / "out")]) == 1
    assert "master_seed must be an integer" in capsys.readouterr().err
    assert not (tmp_path / "out").exists()


@pytest.mark.parametrize(
    "content",
    [b"not json", b"[]", b'{"models": []}', b'{"models": [{}], "ttests": [], "ridge_check": {}}'],
)
def test_report_rejects_malformed_input(tmp_path, capsys, content):
    path = tmp_path / "report.json"
    path.write_bytes(content)
    assert main(["report", "--input", str(path)]) == 1
    assert "not a usable report" in capsys.readouterr().err


def test_fit_copula_rejects_non_utf8_csv(tmp_path, capsys):
    path = tmp_path / "latin1.csv"
    path.write_bytes(b"temp,sal\n" + b"\n".join(b"%d,%d\xe9" % (i, i) for i in range(20)))
    assert main(["fit-copula", "--input", str(path), "--out", str(tmp_path / "m.json")]) == 1
    assert "not UTF-8 text" in capsys.readouterr().err


def test_seed_precedence(monkeypatch):
    parser = build_parser()
    monkeypatch.setenv("COPAUG_SEED", "7")
    assert _experiment_config(parser.parse_args(["run"])).master_seed == 7
    assert _experiment_config(parser.parse_args(["run", "--seed", "9"])).master_seed == 9
    monkeypatch.setenv("COPAUG_SEED", "seven")
    with pytest.raises(ConfigError):
        _experiment_config(parser.parse_args(["run"]))


def test_run_flags_override_config(monkeypatch):
    monkeypatch.delenv("COPAUG_SEED", raising=False)
    args = build_parser().parse_args(["run", "--levels", "100,250", "--fast"])
    cfg = _experiment_config(args)
    assert cfg.synthetic_levels == (100, 250)
    assert len(cfg.grid) == 1
    assert cfg.master_seed == 42
