"""Command-line surface: subcommands, outputs, exit codes."""

import json

import pytest

from exerseek.cli import main


def test_simulate_writes_csv(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"duration": 3.0}))
    out = tmp_path / "run.csv"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("t,p_x")
    assert len(lines) == 1 + 180  # 3 s at 60 Hz
    assert "records" in capsys.readouterr().out


def test_simulate_seed_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"duration": 2.0}))
    outs = []
    for seed in (5, 5, 6):
        out = tmp_path / f"run{len(outs)}.csv"
        assert main(["simulate", "--config", str(cfg), "--out", str(out),
                     "--seed", str(seed)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert outs[0] != outs[2]


def test_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{"ellipse": {"t_rev": -1}}')
    out = tmp_path / "run.csv"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 2
    assert "t_rev" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path / "o.csv")]) == 2


def test_sweep_writes_grid(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--step", "5", "--out", str(out), "--jobs", "4"]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 36
    assert "local maximum" in capsys.readouterr().out


def test_filters_reports_minus_3db(capsys):
    assert main(["filters", "--fs", "2000", "--fc", "50", "--kind", "lp"]) == 0
    out = capsys.readouterr().out
    assert "b0 =" in out
    assert "-3.0103" in out


def test_filters_rejects_bad_cutoff(capsys):
    assert main(["filters", "--fs", "2000", "--fc", "1500", "--kind", "lp"]) == 2
