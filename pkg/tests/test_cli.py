"""Command-line interface: exit codes, artifacts, determinism of one run."""
import json

import numpy as np
import pytest

from hcsolvers.cli import main

CSV_HEADER = "oracle_calls,f1,f2,penalty,eta,iter_kind"


def _read_csv(path):
    lines = path.read_text().splitlines()
    data = [ln for ln in lines if not ln.startswith("#")]
    return data


def test_solve_grid_writes_summary_and_trace(tmp_path):
    out = tmp_path / "run"
    rc = main(["solve", "--method", "grid", "--problem", "cgp2d",
               "--resolution", "0.05", "--out", str(out)])
    assert rc == 0
    summary = json.loads((out / "cgp2d_grid.json").read_text())
    for key in ("method", "problem", "seed", "f1_final", "f2_final",
                "f1_star_ref", "gap", "oracle_calls_total", "wall_ms"):
        assert key in summary
    assert summary["f1_final"] == pytest.approx(5.0, abs=0.2)
    rows = _read_csv(out / "cgp2d_grid.csv")
    assert rows[0] == CSV_HEADER


def test_solve_bundle_exit_zero(tmp_path):
    out = tmp_path / "run"
    rc = main(["solve", "--method", "s-starbl", "--problem", "cgp2d",
               "--eps", "1e-2", "--out", str(out)])
    assert rc == 0
    summary = json.loads((out / "cgp2d_s-starbl.json").read_text())
    assert abs(summary["gap"]) <= 1e-2


def test_solve_tolerance_failure_exit_one(tmp_path):
    # two bundle steps cannot reach a 1e-2 gap
    out = tmp_path / "run"
    rc = main(["solve", "--method", "s-starbl", "--problem", "cgp2d",
               "--eps", "1e-2", "--budget", "8", "--out", str(out)])
    assert rc == 1


def test_missing_config_exit_two(tmp_path):
    rc = main(["solve", "--method", "grid", "--problem", "cgp2d",
               "--config", str(tmp_path / "nope.toml"),
               "--out", str(tmp_path / "o")])
    assert rc == 2


def test_bad_set_override_exit_two(tmp_path):
    rc = main(["solve", "--method", "grid", "--problem", "cgp2d",
               "--set", "not-a-pair", "--out", str(tmp_path / "o")])
    assert rc == 2


def test_config_file_and_set_override(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('[solve]\nresolution = 0.2\n')
    out = tmp_path / "o"
    rc = main(["solve", "--method", "grid", "--problem", "cgp2d",
               "--config", str(cfg), "--set", "resolution=0.05",
               "--out", str(out)])
    assert rc == 0
    # the --set override wins over the file: finer grid, tighter value
    summary = json.loads((out / "cgp2d_grid.json").read_text())
    assert summary["f1_final"] == pytest.approx(5.0, abs=0.2)


def test_reference_subcommand(capsys):
    rc = main(["reference", "--problem", "cgp2d"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "5.0" in out


def test_bench_unknown_suite_rejected(tmp_path):
    with pytest.raises(SystemExit):
        main(["bench", "nope", "--out", str(tmp_path)])


def test_trace_timestamp_comment_only_difference(tmp_path):
    # identical flags, two runs: traces match byte for byte once the
    # timestamp comment lines are dropped
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["solve", "--method", "s-starbl", "--problem", "cgp2d",
                     "--eps", "1e-2", "--out", str(out)]) == 0
    assert (_read_csv(a / "cgp2d_s-starbl.csv")
            == _read_csv(b / "cgp2d_s-starbl.csv"))
