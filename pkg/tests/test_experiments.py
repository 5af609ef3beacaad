import numpy as np
import pytest

from enkfda.dynamics import LinearMap, Lorenz96
from enkfda.experiments import (
    AggregateStats,
    ErrorSeries,
    ExperimentConfig,
    emit_training_data,
    estimate_alpha,
    noise_scaling_experiment,
    preset_config,
    run_monte_carlo,
    run_trial,
)
from enkfda.observation import every_third_removed, selection_matrix
from enkfda.validation import ConfigError


def small_cfg(**overrides):
    base = dict(
        model_kind="lorenz96",
        model_params={"dim": 12, "substeps": 10},
        obs_operator="every_third",
        eps=0.1,
        n_members=10,
        inflation=1.0,
        ball_radius=None,
        n_trials=4,
        horizon=3.0,
        burn_in=1.0,
        seed=0,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestRunTrial:
    def test_deterministic_csv_bytes(self, tmp_path):
        cfg = small_cfg()
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        run_trial(cfg, 3).write_csv(p1)
        run_trial(cfg, 3).write_csv(p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_trials_differ(self):
        cfg = small_cfg()
        assert not np.array_equal(run_trial(cfg, 0).errors, run_trial(cfg, 1).errors)

    def test_series_shape_and_columns(self, tmp_path):
        cfg = small_cfg()
        series = run_trial(cfg, 0)
        assert len(series.steps) == 30
        path = tmp_path / "s.csv"
        series.write_csv(path)
        again = ErrorSeries.read_csv(path)
        assert np.array_equal(again.errors, series.errors)
        assert np.array_equal(again.cov_traces, series.cov_traces)

    def test_invalid_config_rejected(self):
        with pytest.raises(ConfigError):
            run_trial(small_cfg(horizon=0.5, burn_in=1.0), 0)
        with pytest.raises(ConfigError):
            run_trial(small_cfg(model_kind="lorenz42"), 0)

    def test_ball_projection_active_run(self):
        cfg = small_cfg(ball_radius="auto")
        series = run_trial(cfg, 0)
        assert np.isfinite(series.errors).all()

    def test_meanfield_series_records_sample_count(self, tmp_path):
        cfg = small_cfg(filter_kind="meanfield", n_samples=300, n_trials=2)
        series = run_trial(cfg, 0)
        assert series.n_mc == 300
        path = tmp_path / "mf.csv"
        series.write_csv(path)
        with open(path) as fh:
            header = fh.readline().strip().split(",")
        assert header[-1] == "n_mc"


class TestAggregation:
    def test_identical_series_give_zero_stderr(self):
        cfg = small_cfg()
        s = run_trial(cfg, 0)
        copy = ErrorSeries(1, s.steps, s.times, s.errors.copy(),
                           s.cov_traces.copy(), s.obs_errors.copy())
        stats = AggregateStats.from_series([s, copy], burn_in=1.0)
        assert np.array_equal(stats.stderr, np.zeros_like(stats.stderr))
        assert stats.steady_stderr == 0.0

    def test_band_nonnegative_and_ordered(self, tmp_path):
        cfg = small_cfg()
        stats, _ = run_monte_carlo(cfg, output_dir=str(tmp_path))
        assert np.all(stats.band_lo >= 0)
        assert np.all(stats.band_hi >= stats.mean_error)
        assert (tmp_path / "aggregate.csv").exists()
        assert (tmp_path / "trial_0003.csv").exists()

    def test_stderr_shrinks_with_trials(self):
        small = run_monte_carlo(small_cfg(n_trials=10, seed=21))[0]
        large = run_monte_carlo(small_cfg(n_trials=40, seed=21))[0]
        ratio = small.steady_stderr / large.steady_stderr
        assert 1.2 <= ratio <= 3.4  # ~2 expected from quadrupling the trials

    def test_aggregation_permutation_invariant(self):
        cfg = small_cfg()
        series = [run_trial(cfg, t) for t in range(4)]
        a = AggregateStats.from_series(series, burn_in=1.0)
        b = AggregateStats.from_series(series[::-1], burn_in=1.0)
        assert np.array_equal(a.mean_error, b.mean_error)
        assert np.array_equal(a.stderr, b.stderr)

    def test_single_trial_rejected(self):
        with pytest.raises(ConfigError):
            run_monte_carlo(small_cfg(n_trials=1))


class TestNoiseScaling:
    def test_error_ordering_small_scale(self, tmp_path):
        cfg = small_cfg(eps=[1.0, 1e-3], n_trials=3, horizon=4.0, burn_in=2.0)
        result = noise_scaling_experiment(cfg, output_dir=str(tmp_path))
        by_eps = dict(zip(result.eps, result.steady_errors))
        assert by_eps[1.0] > by_eps[1e-3]
        assert (tmp_path / "noise_scaling.csv").exists()

    def test_single_eps_rejected(self):
        with pytest.raises(ConfigError):
            noise_scaling_experiment(small_cfg(eps=[0.1]))


class TestEstimateAlpha:
    def test_contractive_fully_observed_is_zero(self):
        model = LinearMap(0.5 * np.eye(4))
        alpha = estimate_alpha(model, np.eye(4), n_pairs=120, seed=0)
        assert alpha == 0.0

    def test_identity_unobserved_reports_boundary(self):
        model = LinearMap(np.eye(4))
        alpha = estimate_alpha(model, selection_matrix(4, []), n_pairs=120, seed=0)
        assert alpha == pytest.approx(1.0, rel=1e-12)

    def test_lorenz96_contracts_in_unobserved_subspace(self):
        model = Lorenz96(dim=12, substeps=10)
        alpha = estimate_alpha(model, every_third_removed(12), n_pairs=200, seed=1)
        assert 0.0 < alpha < 1.0

    def test_too_few_pairs_rejected(self):
        with pytest.raises(ValueError):
            estimate_alpha(LinearMap(np.eye(2)), np.eye(2), n_pairs=10)


class TestTrainingData:
    def test_row_count_and_round_trip(self, tmp_path):
        model = Lorenz96(dim=6, substeps=10)
        path = tmp_path / "pairs.csv"
        emit_training_data(model, 250, 4, path, steps_per_trajectory=100)
        raw = np.genfromtxt(path, delimiter=",", names=True)
        assert len(raw) == 250
        names = raw.dtype.names
        assert names[:2] == ("u_0", "u_1") and names[-1] == "v_5"
        data = np.vstack([raw[n] for n in names]).T
        rng = np.random.default_rng(0)
        for idx in rng.choice(250, size=100, replace=False):
            u, v = data[idx, :6], data[idx, 6:]
            assert np.linalg.norm(model.flow(u) - v) <= 1e-9

    def test_zero_pairs_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            emit_training_data(Lorenz96(dim=6), 0, 0, tmp_path / "x.csv")


class TestPresets:
    def test_fig1_matches_reference_protocol(self):
        cfg = preset_config("fig1")
        assert cfg.model_params["dim"] == 60
        assert cfg.model_params["dt_obs"] == 0.1
        assert cfg.n_members == 50
        assert cfg.inflation == 1.0
        assert cfg.eps == [1.0, 1e-1, 1e-2, 1e-3]
        assert cfg.horizon == 25.0 and cfg.burn_in == 10.0
        assert cfg.truth_init_std == pytest.approx(np.sqrt(10.0))
        cfg.validate()

    def test_fig4_surrogate_protocol(self):
        cfg = preset_config("fig4")
        assert cfg.inflation == 10.0
        kinds = [s["kind"] for s in cfg.surrogates]
        assert kinds == ["perturbed_forcing", "perturbed_forcing", "coarse_step"]
        cfg.validate()

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            preset_config("fig9")
