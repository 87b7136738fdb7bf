import csv
import json

import numpy as np
import pytest

from netdep.cli import main
from netdep.graph import fixture, write_edge_list


@pytest.fixture
def ring_edgelist(tmp_path):
    path = tmp_path / "ring8.edges"
    write_edge_list(fixture("ring", 8), path)
    return str(path)


def _write_sample_csv(path, y):
    y = np.atleast_2d(y)
    if y.shape[0] == 1:
        y = y.T
    with open(path, "w", newline="") as fh:
        fh.write(",".join(f"y{k + 1}" for k in range(y.shape[1])) + "\n")
        for row in y:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


class TestStats:
    def test_basic_profile(self, ring_edgelist, tmp_path, capsys):
        out = tmp_path / "stats.json"
        main(["stats", ring_edgelist, "--m", "2", "--out", str(out)])
        got = json.loads(out.read_text())
        assert got["n"] == 8
        assert got["stats"]["diameter"] == 4
        assert got["stats"]["avgDegree"] == pytest.approx(2.0)
        assert got["deltaShell"]["1,1"] == pytest.approx(2.0)

    def test_with_conditions(self, ring_edgelist, capsys):
        main(["stats", ring_edgelist, "--theta", "geometric:0.5",
              "--bandwidth", "3.0"])
        got = json.loads(capsys.readouterr().out)
        assert "conditions" in got
        assert got["conditions"]["bN"] == 3.0
        assert got["conditions"]["nfQThreshold"] > 1.0

    def test_bad_theta_flag(self, ring_edgelist):
        with pytest.raises(SystemExit):
            main(["stats", ring_edgelist, "--theta", "weird:1"])


class TestEstimate:
    def test_scalar_with_ci(self, ring_edgelist, tmp_path, capsys):
        rng = np.random.default_rng(0)
        sample = tmp_path / "y.csv"
        _write_sample_csv(sample, rng.standard_normal(8))
        main(["estimate", ring_edgelist, str(sample),
              "--kernel", "bartlett", "--bandwidth", "3.0"])
        got = json.loads(capsys.readouterr().out)
        assert got["kernel"] == "bartlett"
        assert got["bandwidth"] == 3.0
        assert len(got["ci"]) == 2 and got["ci"][0] < got["ci"][1]
        assert "0" in got["lagOmegaTraces"]

    def test_known_mean_flag(self, ring_edgelist, tmp_path, capsys):
        sample = tmp_path / "y.csv"
        _write_sample_csv(sample, np.ones(8))
        main(["estimate", ring_edgelist, str(sample), "--mean", "0.0",
              "--kernel", "truncated", "--bandwidth", "10.0"])
        got = json.loads(capsys.readouterr().out)
        # all weights one, known mean zero: V = (sum y)^2 / n = 8
        assert got["V"][0][0] == pytest.approx(8.0)

    def test_kernel_dash_alias(self, ring_edgelist, tmp_path, capsys):
        sample = tmp_path / "y.csv"
        _write_sample_csv(sample, np.arange(8.0))
        main(["estimate", ring_edgelist, str(sample),
              "--kernel", "tukey-hanning", "--bandwidth", "2.0"])
        assert json.loads(capsys.readouterr().out)["kernel"] == "tukey_hanning"

    def test_bad_header_rejected(self, ring_edgelist, tmp_path):
        sample = tmp_path / "bad.csv"
        sample.write_text("a,b\n1,2\n")
        with pytest.raises(SystemExit):
            main(["estimate", ring_edgelist, str(sample)])


class TestSimulate:
    def test_writes_replications(self, tmp_path, capsys):
        out = tmp_path / "sims"
        main(["simulate", "--n", "40", "--lambda", "2.0", "--gamma", "0.3",
              "--seed", "1", "--reps", "2", "--out", str(out)])
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["reps"] == 2
        assert (out / "rep0000.edges").exists()
        with open(out / "rep0001.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["y1"]
        assert len(rows) == 41

    def test_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            main(["simulate", "--n", "30", "--lambda", "2.0",
                  "--seed", "3", "--out", str(out)])
        assert (a / "rep0000.edges").read_bytes() == \
            (b / "rep0000.edges").read_bytes()
        assert (a / "rep0000.csv").read_bytes() == \
            (b / "rep0000.csv").read_bytes()


class TestVerify:
    def test_ledger_passes(self, tmp_path):
        out = tmp_path / "ledger.json"
        main(["verify", "--reps", "400", "--seed", "0", "--out", str(out)])
        ledger = json.loads(out.read_text())
        assert ledger["allPass"] is True
        assert len(ledger["psiBound"]["entries"]) == 6
        assert ledger["cltDiagnostic"]["pass"] is True


class TestMc:
    def test_single_cell(self, tmp_path, capsys):
        out = tmp_path / "study"
        main(["mc", "--lambda", "2.0", "--n", "50", "--gamma", "0.0",
              "--reps", "20", "--out", str(out)])
        msg = capsys.readouterr().out
        assert "coverage=" in msg
        with open(out / "study.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert rows[0]["n"] == "50"

    def test_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "cells.json"
        cfg.write_text(json.dumps({"cells": [
            {"lam": 2.0, "n": 40, "gamma": 0.0, "reps": 10},
            {"lam": 2.0, "n": 40, "gamma": 0.5, "reps": 10},
        ]}))
        out = tmp_path / "study"
        main(["mc", "--config", str(cfg), "--out", str(out)])
        with open(out / "study.csv") as fh:
            assert len(list(csv.DictReader(fh))) == 2

    def test_large_n_guard(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["mc", "--n", "2000", "--reps", "1",
                  "--out", str(tmp_path / "s")])
