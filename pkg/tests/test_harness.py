"""Experiment harness: configs, histograms, outputs, verification sweep."""

import json

import numpy as np
import pytest

from saddlescape import (
    ExperimentConfig,
    GradientOracle,
    HistogramSummary,
    Landscape,
    ParameterError,
    SaddleInfo,
    SmoothnessSpec,
    VERIFY_IDS,
    derive_nc_params,
    derive_params_for,
    derive_pgdnc_params,
    derive_sgdnc_params,
    run_dimension_scaling,
    run_experiment,
    run_verify,
)
from saddlescape.harness import _resolve_knobs, build_payload


class TestExperimentConfig:
    def test_aliases_normalize(self):
        assert ExperimentConfig(algorithm="pgd-nc", landscape="quartic").algorithm == "nc"
        assert ExperimentConfig(algorithm="sgd-nc", landscape="cubic").algorithm == "snc"

    def test_rejects_unknown_algorithm(self):
        with pytest.raises(ParameterError):
            ExperimentConfig(algorithm="adam", landscape="quartic")

    def test_rejects_bad_mode_and_trials(self):
        with pytest.raises(ParameterError):
            ExperimentConfig(algorithm="nc", landscape="quartic", mode="fast")
        with pytest.raises(ParameterError):
            ExperimentConfig(algorithm="nc", landscape="quartic", trials=0)

    def test_recipe_overlay_precedence(self):
        cfg = ExperimentConfig(algorithm="nc", landscape="quartic", eta=0.123)
        knobs = _resolve_knobs(cfg)
        assert knobs["eta"] == 0.123
        assert knobs["radius"] == 0.1
        assert knobs["ncf_steps"] == 30

    def test_unreciped_landscape_needs_explicit_knobs(self):
        cfg = ExperimentConfig(algorithm="ancgd", landscape="triangle", trials=1)
        with pytest.raises(ParameterError, match="explicit settings"):
            run_experiment(cfg)

    def test_payload_threshold_defaults_to_gap_fraction(self):
        cfg = ExperimentConfig(algorithm="nc", landscape="quartic", threshold=None)
        payload = build_payload(cfg)
        # Saddle value 0, minimum value -1: escape bar is 90% of the gap.
        assert payload["threshold"] == pytest.approx(0.9)

    def test_x0_dimension_checked(self):
        cfg = ExperimentConfig(
            algorithm="nc", landscape="quartic", trials=1, x0=(0.0, 0.0, 0.0)
        )
        with pytest.raises(ParameterError):
            build_payload(cfg)


class TestHistogramSummary:
    def test_from_decreases_bins(self):
        hist = HistogramSummary.from_decreases([0.01, 0.06, 0.99, 1.0], bin_width=0.05)
        assert hist.bin_edges[0] == 0.0
        assert hist.bin_edges[-1] == pytest.approx(1.0)
        assert hist.total == 4
        assert sum(hist.counts) == 4
        assert hist.counts[0] == 1
        assert hist.counts[1] == 1

    def test_negative_decreases_extend_left(self):
        hist = HistogramSummary.from_decreases([-0.12, 0.3], bin_width=0.05)
        assert hist.bin_edges[0] == pytest.approx(-0.15)
        assert hist.total == 2

    def test_fraction_below(self):
        hist = HistogramSummary.from_decreases([0.01, 0.02, 0.5, 0.92], bin_width=0.05)
        assert hist.fraction_below(0.05) == pytest.approx(0.5)
        assert hist.fraction_below(0.9) == pytest.approx(0.75)
        assert hist.fraction_below(2.0) == pytest.approx(1.0)

    def test_fraction_below_empty(self):
        hist = HistogramSummary.from_decreases([])
        assert hist.fraction_below(1.0) == 0.0

    def test_merge_aligned(self):
        a = HistogramSummary.from_decreases([0.01, 0.06], bin_width=0.05)
        b = HistogramSummary.from_decreases([0.26], bin_width=0.05)
        merged = a.merge(b)
        assert merged.total == 3
        assert sum(merged.counts) == 3
        assert merged.bin_edges[0] == 0.0
        assert merged.bin_edges[-1] == pytest.approx(0.3)

    def test_merge_rejects_mismatched_widths(self):
        a = HistogramSummary.from_decreases([0.1], bin_width=0.05)
        b = HistogramSummary.from_decreases([0.1], bin_width=0.1)
        with pytest.raises(ParameterError):
            a.merge(b)


class TestRunExperiment:
    def test_rows_ordered_and_summary_consistent(self):
        cfg = ExperimentConfig(
            algorithm="nc", landscape="quartic", trials=8, seed=3
        )
        res = run_experiment(cfg)
        assert [r.trial for r in res.rows] == list(range(8))
        assert all(r.seed == 3 for r in res.rows)
        summary = res.summary()
        assert summary["trials"] == 8
        assert summary["escape_rate"] == pytest.approx(res.escape_rate)
        assert res.escape_rate + res.fail_rate == pytest.approx(1.0)

    def test_serial_and_parallel_outputs_identical(self, tmp_path):
        outs = {}
        for jobs in (1, 2):
            out = str(tmp_path / f"jobs{jobs}")
            cfg = ExperimentConfig(
                algorithm="pgd", landscape="quartic", trials=6, seed=0,
                jobs=jobs, out=out,
            )
            run_experiment(cfg)
            outs[jobs] = (
                (tmp_path / f"jobs{jobs}.csv").read_bytes(),
                (tmp_path / f"jobs{jobs}.summary.json").read_bytes(),
            )
        assert outs[1][0] == outs[2][0]
        # Summaries differ only in the echoed jobs/out fields.
        s1 = json.loads(outs[1][1])
        s2 = json.loads(outs[2][1])
        for s in (s1, s2):
            s["config"].pop("jobs")
            s["config"].pop("out")
        assert s1 == s2

    def test_out_writes_csv_and_summary(self, tmp_path):
        out = str(tmp_path / "res.csv")
        cfg = ExperimentConfig(
            algorithm="nc", landscape="quartic", trials=3, seed=0, out=out
        )
        res = run_experiment(cfg)
        csv_lines = (tmp_path / "res.csv").read_text().strip().split("\n")
        assert csv_lines[0] == "trial,seed,t,f0,f_final,decrease,escaped"
        assert len(csv_lines) == 4
        # repr-formatted floats round-trip exactly.
        first = csv_lines[1].split(",")
        assert float(first[5]) == res.rows[0].decrease
        summary = json.loads((tmp_path / "res.summary.json").read_text())
        assert summary["algorithm"] == "nc"
        assert summary["counts"] == res.histogram.counts

    def test_reruns_are_deterministic(self):
        cfg = ExperimentConfig(algorithm="snc", landscape="cubic", trials=3, seed=1)
        a = run_experiment(cfg)
        b = run_experiment(cfg)
        assert [r.f_final for r in a.rows] == [r.f_final for r in b.rows]


class TestDimensionScaling:
    def test_single_dimension_row(self):
        rows = run_dimension_scaling([1], trials=10, seed=0)
        (row,) = rows
        assert row["n"] == 10
        assert row["nc_steps"] == 30
        assert row["pgd_steps"] == 30
        assert row["nc_escape_rate"] >= row["pgd_escape_rate"] - 0.05

    def test_rejects_p_below_one(self):
        with pytest.raises(ParameterError):
            run_dimension_scaling([0], trials=1)

    def test_out_csv(self, tmp_path):
        out = str(tmp_path / "dims.csv")
        run_dimension_scaling([1], trials=5, seed=0, out=out)
        lines = (tmp_path / "dims.csv").read_text().strip().split("\n")
        assert lines[0].startswith("p,n,trials")
        assert len(lines) == 2


def _broken_landscape() -> Landscape:
    # Declares the wrong minimum value and an understated smoothness bound.
    oracle = GradientOracle(
        f=lambda x: float(0.5 * x @ x),
        grad=lambda x: np.asarray(x, dtype=float),
        spec=SmoothnessSpec(0.5, 1.0),
        dim=2,
        name="broken",
    )
    saddle = SaddleInfo(
        point=np.zeros(2),
        lambda_min=-1.0,
        direction=np.array([1.0, 0.0]),
        ell_local=1.0,
        rho_local=1.0,
    )
    return Landscape(
        id="broken",
        oracle=oracle,
        box=(-2.0, 2.0),
        saddles=[saddle],
        minima=[(np.zeros(2), -1.0)],
    )


class TestRunVerify:
    def test_catalog_passes(self):
        report = run_verify(ids=VERIFY_IDS, points_per_landscape=25)
        assert report.ok
        assert not report.failures
        assert {e["landscape"] for e in report.entries} == set(VERIFY_IDS)
        for entry in report.entries:
            assert all(c["ok"] for c in entry["checks"])

    def test_broken_landscape_flagged(self):
        report = run_verify(landscapes=[_broken_landscape()], points_per_landscape=10)
        assert not report.ok
        names = {f.split(": ")[1] for f in report.failures}
        # The declared minimum value is wrong (bowl bottom is 0, not -1),
        # the declared eigenvalue is wrong, and ell understates the spectrum.
        assert "minimum-0-value" in names
        assert "saddle-0-eigenvalue" in names
        assert "spectrum-bound" in names


class TestDeriveParamsFor:
    def test_nc_matches_driver_derivation(self):
        out = derive_params_for("nc", 1.0, 1.0, 0.1, 0.1, 2, 1.0)
        ref = derive_pgdnc_params(SmoothnessSpec(1.0, 1.0), 0.1, 0.1, 2, 1.0)
        assert out["total_steps"] == ref.total_steps == 24287
        assert out["nc"]["steps"] == ref.nc.steps

    def test_ncf_matches(self):
        out = derive_params_for("ncf", 1.0, 1.0, 0.01, 0.1, 2)
        ref = derive_nc_params(SmoothnessSpec(1.0, 1.0), 0.01, 0.1, 2)
        assert out["steps"] == ref.steps == 351
        assert out["radius"] == ref.radius

    def test_snc_matches_outer_loop_derivation(self):
        out = derive_params_for("snc", 1.0, 1.0, 0.1, 0.1, 2, 1.0, ell_tilde=1.0)
        ref = derive_sgdnc_params(SmoothnessSpec(1.0, 1.0), 1.0, 0.1, 0.1, 2, 1.0)
        assert out["total_steps"] == ref.total_steps == 24287
        assert out["outer_batch"] == ref.outer_batch == 1600
        assert out["snc"]["batch"] == ref.snc.batch

    def test_alias_and_unknown(self):
        out = derive_params_for("pgd-nc", 1.0, 1.0, 0.1, 0.1, 2, 1.0)
        assert out["total_steps"] == 24287
        with pytest.raises(ParameterError):
            derive_params_for("pgd", 1.0, 1.0, 0.1, 0.1, 2, 1.0)
