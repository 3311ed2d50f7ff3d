# test_cli.py

import json

import pytest

from wavelet_amp.cli import (
    EXIT_BAD_INPUT,
    EXIT_GOLDEN_MISMATCH,
    EXIT_HALTED,
    RunCommand,
    Subcommand,
    main,
    parse_command,
)

TRACE_HEADER = "k,t,r,ym,y,u,f_true,f_hat,eta,e,selected_index,a,applied"


@pytest.mark.integration
def test_example1_writes_artifacts(tmp_path, capsys):
    out = tmp_path / "e1"
    assert main(["example1", "--out", str(out), "--set", "duration=5"]) == 0
    assert (out / "trace.csv").read_text().splitlines()[0] == TRACE_HEADER
    for name in ("metrics.json", "config.json", "run.json"):
        assert (out / name).is_file()
    printed = json.loads(capsys.readouterr().out)
    assert printed == json.loads((out / "metrics.json").read_text())


@pytest.mark.integration
def test_oracle_override_tracks_perfectly(tmp_path, capsys):
    status = main(["example1", "--out", str(tmp_path), "--set", "noise.std=0", "--set", "oracle=true"])
    assert status == 0
    assert json.loads(capsys.readouterr().out)["tracking_rmse"] <= 1e-9


@pytest.mark.integration
def test_svg_plots(tmp_path, capsys):
    assert main(["example2", "--out", str(tmp_path), "--set", "duration=3", "--svg"]) == 0
    assert (tmp_path / "output.svg").read_text().count("<polyline") == 2
    assert (tmp_path / "input.svg").read_text().count("<polyline") == 1
    assert (tmp_path / "identification.svg").is_file()


@pytest.mark.integration
def test_saved_config_reproduces_the_trace(tmp_path, capsys):
    first, second = tmp_path / "first", tmp_path / "second"
    assert main(["example2", "--out", str(first), "--set", "duration=4"]) == 0
    assert main(["custom", str(first / "config.json"), "--out", str(second)]) == 0
    assert (first / "trace.csv").read_bytes() == (second / "trace.csv").read_bytes()


@pytest.mark.unit
def test_missing_custom_config(tmp_path, capsys):
    status = main(["custom", str(tmp_path / "missing.json"), "--out", str(tmp_path)])
    assert status != 0
    assert "config not found" in capsys.readouterr().err


@pytest.mark.unit
def test_custom_without_config(capsys):
    assert main(["custom"]) == 1
    assert "config file" in capsys.readouterr().err


@pytest.mark.unit
def test_unknown_override_key(tmp_path, capsys):
    assert main(["example1", "--out", str(tmp_path), "--set", "noise.sd=0"]) == 1
    assert "unknown config key: noise.sd" in capsys.readouterr().err


@pytest.mark.unit
def test_unwritable_output(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["example1", "--out", str(blocker / "run"), "--set", "duration=1"]) == 3


@pytest.mark.integration
def test_export_atoms(tmp_path, capsys):
    assert main(["export-atoms", "--out", str(tmp_path), "--svg"]) == 0
    header = (tmp_path / "atoms.csv").read_text().splitlines()[0]
    assert header.split(",")[:3] == ["x", "atom_0", "atom_1"]
    assert (tmp_path / "atoms.svg").read_text().count("<polyline") == 30
    assert json.loads(capsys.readouterr().out)["atoms"] == 30


@pytest.mark.integration
def test_decompose(tmp_path, capsys):
    signal = tmp_path / "signal.csv"
    signal.write_text("value\n" + "\n".join(str((i % 8) / 8.0) for i in range(64)) + "\n")
    out = tmp_path / "mp"
    assert main(["decompose", str(signal), "--out", str(out), "--max-iters", "5"]) == 0
    picks = (out / "picks.csv").read_text().splitlines()
    assert picks[0] == "iteration,index,coefficient,residual_norm"
    assert 1 < len(picks) <= 6
    assert len((out / "residual.csv").read_text().splitlines()) == 65
    assert json.loads(capsys.readouterr().out)["picks"] == len(picks) - 1


@pytest.mark.unit
def test_parse_command():
    cmd = parse_command(["custom", "--config", "run.yaml", "--set", "a=1", "--set", "b=2", "--svg"])
    assert cmd == RunCommand(
        subcommand=Subcommand.CUSTOM,
        config_path="run.yaml",
        output_dir="runs/custom",
        overrides=("a=1", "b=2"),
        svg=True,
    )
    assert parse_command(["example2"]).preset == "example2"


@pytest.mark.unit
@pytest.mark.parametrize("argv", [[], ["example1", "--bogus"], ["example3"], ["decompose"]])
def test_usage_errors_are_bad_input(argv, capsys):
    status = main(argv)
    assert status == EXIT_BAD_INPUT
    assert status != EXIT_HALTED
    assert "usage:" in capsys.readouterr().err


@pytest.mark.unit
def test_help_exits_cleanly(capsys):
    assert main(["example1", "--help"]) == 0
    assert "--golden" in capsys.readouterr().out


@pytest.mark.integration
def test_golden_option_records_then_compares(tmp_path, capsys):
    golden = tmp_path / "golden"
    argv = ["example1", "--out", str(tmp_path / "run"), "--set", "duration=2", "--golden", str(golden)]
    assert main(argv) == 0
    assert json.loads(capsys.readouterr().out)["golden"] == "recorded"
    assert main(argv) == 0
    assert json.loads(capsys.readouterr().out)["golden"] == "match"

    (golden / ".hash").write_text("0" * 64)
    assert main(argv) == EXIT_GOLDEN_MISMATCH
    assert "golden record" in capsys.readouterr().err
