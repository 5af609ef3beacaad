import numpy as np
import pytest

from enkfda.dynamics import Lorenz96, estimate_ball_radius
from enkfda.surrogate import (
    CoarseStepSurrogate,
    PerturbedForcingSurrogate,
    estimate_model_error,
    fit_ridge_substep_surrogate,
    sample_attractor,
    train_ridge_quadratic,
)
from enkfda.validation import SingularMatrixError


@pytest.fixture(scope="module")
def l96():
    return Lorenz96(dim=12, substeps=100)


@pytest.fixture(scope="module")
def attractor_samples(l96):
    return sample_attractor(l96, 150, burn_in=150, stride=2, seed=0)


class TestDegenerateSurrogates:
    def test_coarse_with_same_substeps_is_truth(self, l96, attractor_samples):
        surrogate = CoarseStepSurrogate(l96, substeps=l96.substeps)
        cols = attractor_samples[:10].T
        assert np.array_equal(surrogate.flow(cols), l96.flow(cols))

    def test_zero_forcing_offset_is_truth(self, l96, attractor_samples):
        surrogate = PerturbedForcingSurrogate(l96, forcing_offset=0.0)
        cols = attractor_samples[:10].T
        assert np.array_equal(surrogate.flow(cols), l96.flow(cols))

    def test_perturbed_forcing_needs_a_forcing(self):
        from enkfda.dynamics import LinearMap

        with pytest.raises(ValueError):
            PerturbedForcingSurrogate(LinearMap(np.eye(2)), forcing_offset=1.0)


class TestModelError:
    def test_truth_surrogate_has_zero_error(self, l96, attractor_samples):
        from enkfda.observation import every_third_removed

        h = every_third_removed(12)
        surrogate = CoarseStepSurrogate(l96, substeps=l96.substeps)
        est = estimate_model_error(l96, surrogate, attractor_samples, h)
        assert est.kappa_hat == 0.0 and est.delta_hat == 0.0

    def test_coarse_error_decreases_with_substeps(self, l96, attractor_samples):
        from enkfda.observation import every_third_removed

        h = every_third_removed(12)
        deltas = []
        for substeps in (1, 2, 5, 10):
            est = estimate_model_error(
                l96, CoarseStepSurrogate(l96, substeps), attractor_samples, h
            )
            assert est.delta_hat <= est.kappa_hat
            deltas.append(est.delta_hat)
        assert all(deltas[i] >= deltas[i + 1] for i in range(len(deltas) - 1))

    def test_monotone_in_sample_set(self, l96, attractor_samples):
        from enkfda.observation import every_third_removed

        h = every_third_removed(12)
        surrogate = PerturbedForcingSurrogate(l96, forcing_offset=0.5)
        small = estimate_model_error(l96, surrogate, attractor_samples[:50], h)
        large = estimate_model_error(l96, surrogate, attractor_samples, h)
        assert large.kappa_hat >= small.kappa_hat
        assert large.delta_hat >= small.delta_hat

    def test_empty_samples_rejected(self, l96):
        with pytest.raises(ValueError):
            estimate_model_error(l96, l96, np.zeros((0, 12)), None)


class TestRidge:
    def test_recovers_local_linear_map(self):
        # data generated by a map inside the feature window is fit exactly
        rng = np.random.default_rng(1)
        d = 10
        inputs = rng.standard_normal((400, d))
        outputs = 0.6 * inputs + 0.3 * np.roll(inputs, -1, axis=1) - 0.1
        surrogate = train_ridge_quadratic(inputs, outputs, 1e-10, window=2, dt_obs=0.1)
        test = rng.standard_normal((50, d))
        pred = surrogate.flow(test.T).T
        target = 0.6 * test + 0.3 * np.roll(test, -1, axis=1) - 0.1
        assert np.abs(pred - target).max() <= 1e-8

    def test_large_regularization_predicts_mean(self):
        rng = np.random.default_rng(2)
        inputs = rng.standard_normal((300, 8))
        outputs = 2.0 + rng.standard_normal((300, 8))
        surrogate = train_ridge_quadratic(inputs, outputs, 1e12, window=1, dt_obs=0.1)
        # all feature weights shrink to zero except the unpenalized constant
        assert np.abs(surrogate.weights[1:]).max() <= 1e-6
        assert surrogate.weights[0] == pytest.approx(outputs.mean(), abs=1e-3)

    def test_too_few_pairs_rejected(self):
        with pytest.raises(ValueError, match="rows"):
            train_ridge_quadratic(np.zeros((2, 5)), np.zeros((2, 5)), 1e-8, window=2)

    def test_singular_at_zero_regularization(self):
        # constant-only data makes the quadratic features collinear
        inputs = np.ones((100, 6))
        outputs = np.ones((100, 6))
        with pytest.raises(SingularMatrixError):
            train_ridge_quadratic(inputs, outputs, 0.0, window=1)

    def test_substep_surrogate_beats_perturbed_forcing(self):
        # the trained map composed over sub-intervals is more accurate in
        # the unobserved components than a unit forcing offset
        from enkfda.observation import every_third_removed

        model = Lorenz96(dim=60, substeps=100)
        h = every_third_removed(60)
        samples = sample_attractor(model, 300, burn_in=200, stride=2, seed=5)
        ridge = fit_ridge_substep_surrogate(model, n_pairs=60_000, seed=5)
        baseline = PerturbedForcingSurrogate(model, forcing_offset=1.0)
        ridge_err = estimate_model_error(model, ridge, samples, h)
        base_err = estimate_model_error(model, baseline, samples, h)
        assert ridge_err.delta_hat < base_err.delta_hat


class TestSampleAttractor:
    def test_inside_estimated_ball(self, l96, attractor_samples):
        radius = estimate_ball_radius(l96, horizon=150.0, seed=9)
        assert np.all(np.linalg.norm(attractor_samples, axis=1) <= radius)

    def test_zero_stride_rejected(self, l96):
        with pytest.raises(ValueError):
            sample_attractor(l96, 5, burn_in=10, stride=0, seed=0)

    def test_fixed_seed_identical(self, l96):
        a = sample_attractor(l96, 8, burn_in=20, stride=2, seed=3)
        b = sample_attractor(l96, 8, burn_in=20, stride=2, seed=3)
        assert np.array_equal(a, b)
