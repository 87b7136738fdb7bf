import csv
import json
import math

import pytest

from netdep.montecarlo import (McCell, power_curve, run_cell, run_grid,
                               write_study)


SMALL = McCell(lam=2.0, n=60, gamma=0.3, reps=40, seed=5)


class TestCell:
    def test_key_ignores_seed(self):
        a = McCell(lam=2.0, n=60, gamma=0.3, seed=1)
        b = McCell(lam=2.0, n=60, gamma=0.3, seed=2)
        assert a.key() == b.key()

    def test_key_distinguishes_designs(self):
        a = McCell(lam=2.0, n=60, gamma=0.3)
        b = McCell(lam=2.0, n=60, gamma=0.5)
        assert a.key() != b.key()

    def test_validation(self):
        with pytest.raises(ValueError):
            McCell(lam=2.0, n=60, gamma=1.0)
        with pytest.raises(ValueError):
            McCell(lam=0.0, n=60, gamma=0.0)
        with pytest.raises(ValueError):
            McCell(lam=2.0, n=60, gamma=0.0, reps=0)


class TestRunCell:
    def test_coverage_rejection_identity(self):
        rep = run_cell(SMALL)
        assert rep.coverage + rep.rejection == pytest.approx(1.0)
        assert rep.valid_reps + rep.neg_var_count == SMALL.reps
        assert 0.0 <= rep.coverage <= 1.0
        assert rep.coverage_se == pytest.approx(
            math.sqrt(rep.coverage * (1 - rep.coverage) / rep.valid_reps))

    def test_network_stats_sane(self):
        rep = run_cell(SMALL)
        assert rep.mean_avg_degree > 0.5
        assert rep.mean_max_degree >= rep.mean_avg_degree
        assert rep.mean_diameter >= 1.0
        assert rep.mean_bandwidth > 0.0

    def test_deterministic_same_seed(self):
        a = run_cell(SMALL)
        b = run_cell(SMALL)
        assert a == b

    def test_seed_changes_draws(self):
        other = McCell(lam=2.0, n=60, gamma=0.3, reps=40, seed=6)
        assert run_cell(other) != run_cell(SMALL)

    def test_worker_count_invariance(self):
        serial = run_cell(SMALL, parallelism=1)
        parallel = run_cell(SMALL, parallelism=3)
        assert serial == parallel

    def test_single_rep(self):
        rep = run_cell(McCell(lam=2.0, n=50, gamma=0.0, reps=1, seed=0))
        assert rep.rejection in (0.0, 1.0) or math.isnan(rep.rejection)
        assert rep.sd_diameter == 0.0


class TestStudyOutput:
    def test_round_trip(self, tmp_path):
        reports = run_grid([SMALL], out_dir=tmp_path)
        with open(tmp_path / "study.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 1
        assert float(rows[0]["coverage"]) == pytest.approx(reports[0].coverage)
        assert rows[0]["kernel"] == "parzen"
        with open(tmp_path / "study.json") as fh:
            detail = json.load(fh)
        assert detail[0]["cell"]["lam"] == 2.0
        assert detail[0]["valid_reps"] == reports[0].valid_reps

    def test_byte_identical_reruns(self, tmp_path):
        run_grid([SMALL], out_dir=tmp_path / "a")
        run_grid([SMALL], out_dir=tmp_path / "b")
        assert (tmp_path / "a" / "study.csv").read_bytes() == \
            (tmp_path / "b" / "study.csv").read_bytes()
        assert (tmp_path / "a" / "study.json").read_bytes() == \
            (tmp_path / "b" / "study.json").read_bytes()

    def test_empty_grid_header_only(self, tmp_path):
        write_study([], tmp_path)
        text = (tmp_path / "study.csv").read_text()
        assert text.startswith("lambda,n,gamma")
        assert len(text.strip().splitlines()) == 1
        assert json.loads((tmp_path / "study.json").read_text()) == []


class TestPowerCurve:
    def test_grid_shape_and_identity(self):
        rows = power_curve(lam=2.0, ns=[50], gammas=[0.0, 0.5], reps=30,
                           seed=3)
        assert len(rows) == 2
        for row in rows:
            assert row["rejection"] == pytest.approx(1.0 - row["coverage"])

    def test_matches_run_cell(self):
        rows = power_curve(lam=2.0, ns=[60], gammas=[0.3], reps=40, seed=5)
        assert rows[0]["coverage"] == pytest.approx(run_cell(SMALL).coverage)
