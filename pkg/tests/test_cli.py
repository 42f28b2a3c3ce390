import csv
import json
import shutil
import subprocess

import pytest

from hybridsim.admm import AdmmConfig
from hybridsim.cli import main
from hybridsim.harness import SweepSpec


def write_config(tmp_path, **overrides):
    base = dict(
        scenario="narrowband_full",
        n_s=2,
        n_rf=2,
        n_tx_side=3,
        n_rx_side=3,
        n_subcarriers=1,
        snr_db_list=[0.0],
        runs=2,
        base_seed=7,
        admm=AdmmConfig(rho=2 / 18, max_iters=8, tau=0.0, seed=0),
    )
    base.update(overrides)
    doc = SweepSpec(**base).to_dict()
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    return path


class TestValidate:
    def test_good_config(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        assert main(["validate", "--config", str(cfg)]) == 0
        assert capsys.readouterr().out.strip() == "config OK"

    def test_unknown_key_is_config_error(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        doc = json.loads(cfg.read_text())
        doc["carrier_ghz"] = 28
        cfg.write_text(json.dumps(doc))
        assert main(["validate", "--config", str(cfg)]) == 2
        assert capsys.readouterr().err.startswith("config error:")

    def test_missing_file(self, tmp_path, capsys):
        missing = tmp_path / "nope.json"
        assert main(["validate", "--config", str(missing)]) == 2
        assert "config error:" in capsys.readouterr().err

    def test_malformed_json(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{broken")
        assert main(["validate", "--config", str(cfg)]) == 2
        assert "config error:" in capsys.readouterr().err


class TestRun:
    def test_writes_rows_and_reports(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        out = tmp_path / "res.csv"
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
        msg = capsys.readouterr().out
        assert f"wrote 4 rows to {out} (4 with finite rate)" in msg
        with open(out, newline="") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 5  # header + 1 snr x 2 runs x 2 methods

    def test_runs_and_seed_overrides(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "res.csv"
        code = main(
            [
                "run",
                "--config",
                str(cfg),
                "--out",
                str(out),
                "--runs",
                "1",
                "--seed",
                "42",
            ]
        )
        assert code == 0
        with open(out, newline="") as fh:
            rows = list(csv.reader(fh))
        body = rows[1:]
        assert len(body) == 2
        assert all(r[4] == "42" for r in body)  # seed column


class TestTrace:
    def test_trace_csv_shape(self, tmp_path, capsys):
        cfg = write_config(tmp_path, admm=AdmmConfig(rho=2 / 18, max_iters=12, tau=0.0))
        out = tmp_path / "trace.csv"
        assert main(["trace", "--config", str(cfg), "--out", str(out)]) == 0
        with open(out, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["iteration", "objective", "primal_residual"]
        body = rows[1:]
        assert len(body) == 13  # start plus 12 iterations at tau = 0
        assert [int(r[0]) for r in body] == list(range(13))
        objs = [float(r[1]) for r in body]
        assert objs[-1] <= objs[0]
        assert "trace rows" in capsys.readouterr().out


@pytest.mark.skipif(
    shutil.which("hybridsim") is None, reason="console script not installed"
)
def test_console_script_end_to_end(tmp_path):
    cfg = write_config(tmp_path)
    res = subprocess.run(
        ["hybridsim", "validate", "--config", str(cfg)],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0
    assert res.stdout.strip() == "config OK"
