import numpy as np
import pytest

from enkfda.dynamics import (
    BallSpec,
    LinearODE,
    Lorenz63,
    Lorenz96,
    estimate_ball_radius,
    project_to_ball,
)
from enkfda.observation import selection_matrix
from enkfda.surrogate import sample_attractor
from enkfda.validation import BlowUpError


# Printed decomposition du/dt + A u + B(u, u) = F of the two systems,
# kept as independent oracles for the right-hand sides.

L63_A = np.array([[10.0, -10.0, 0.0], [10.0, 1.0, 0.0], [0.0, 0.0, 8.0 / 3.0]])
L63_F = np.array([0.0, 0.0, -304.0 / 3.0])


def l63_bilinear(u, v):
    return np.array(
        [
            0.0,
            (u[0] * v[2] + u[2] * v[0]) / 2.0,
            -(u[0] * v[1] + u[1] * v[0]) / 2.0,
        ]
    )


def l96_bilinear(u, v):
    d = len(u)
    out = np.zeros(d)
    for i in range(d):
        out[i] = -0.5 * (
            v[(i + 1) % d] * u[(i - 1) % d]
            + u[(i + 1) % d] * v[(i - 1) % d]
            - v[(i - 2) % d] * u[(i - 1) % d]
            - u[(i - 2) % d] * v[(i - 1) % d]
        )
    return out


class TestLorenz63Rhs:
    def test_origin_gives_forcing(self):
        rhs = Lorenz63().rhs(np.zeros(3))
        assert np.allclose(rhs, [0.0, 0.0, -304.0 / 3.0], atol=1e-13)

    @pytest.mark.parametrize("z", [-5.0, 0.0, 17.3])
    def test_equal_first_two_coordinates(self, z):
        rhs = Lorenz63().rhs(np.array([1.0, 1.0, z]))
        assert rhs[0] == 0.0

    def test_matches_decomposition(self):
        rng = np.random.default_rng(0)
        model = Lorenz63()
        for _ in range(10):
            u = 5.0 * rng.standard_normal(3)
            expected = L63_F - L63_A @ u - l63_bilinear(u, u)
            assert np.allclose(model.rhs(u), expected, atol=1e-12)

    def test_quadratic_term_conserves_energy(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            u = 10.0 * rng.standard_normal(3)
            assert abs(np.dot(l63_bilinear(u, u), u)) <= 1e-12 * max(1.0, np.dot(u, u))


class TestLorenz96Rhs:
    def test_zero_state_gives_forcing(self):
        assert np.allclose(Lorenz96(dim=8).rhs(np.zeros(8)), 8.0)

    def test_uniform_fixed_point(self):
        assert np.allclose(Lorenz96(dim=10).rhs(np.full(10, 8.0)), 0.0, atol=1e-12)

    def test_matches_decomposition(self):
        rng = np.random.default_rng(2)
        model = Lorenz96(dim=6)
        for _ in range(10):
            u = 4.0 * rng.standard_normal(6)
            expected = 8.0 - u - l96_bilinear(u, u)
            assert np.allclose(model.rhs(u), expected, atol=1e-12)

    def test_quadratic_term_conserves_energy(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            u = 6.0 * rng.standard_normal(6)
            assert abs(np.dot(l96_bilinear(u, u), u)) <= 1e-12 * max(1.0, np.dot(u, u))

    def test_small_dimension_rejected(self):
        with pytest.raises(ValueError):
            Lorenz96(dim=3)


class TestFlow:
    def test_richardson_ratio(self):
        # RK4 global error ~ h^4 so halving h divides the error by ~16
        rng = np.random.default_rng(4)
        u0 = rng.standard_normal(6)
        ref = Lorenz96(dim=6, substeps=1024).flow(u0)
        err_h = np.linalg.norm(Lorenz96(dim=6, substeps=2).flow(u0) - ref)
        err_h2 = np.linalg.norm(Lorenz96(dim=6, substeps=4).flow(u0) - ref)
        assert 12.0 <= err_h / err_h2 <= 20.0

    def test_linear_decay(self):
        model = LinearODE(-np.eye(2), dt_obs=0.1, substeps=100)
        u0 = np.array([2.0, -1.0])
        assert np.allclose(model.flow(u0), np.exp(-0.1) * u0, atol=1e-10)

    def test_lorenz63_fine_step_reference(self):
        u0 = np.array([1.0, 1.0, 1.0])
        coarse = Lorenz63(substeps=100).flow(u0)
        fine = Lorenz63(substeps=10_000).flow(u0)
        assert np.linalg.norm(coarse - fine) <= 1e-6

    def test_deterministic(self):
        model = Lorenz96(dim=12, substeps=20)
        u0 = np.linspace(-1, 1, 12)
        assert np.array_equal(model.flow(u0), model.flow(u0))

    def test_batched_matches_single(self):
        model = Lorenz96(dim=6, substeps=10)
        rng = np.random.default_rng(5)
        cols = rng.standard_normal((6, 4))
        batched = model.flow(cols)
        for j in range(4):
            assert np.array_equal(batched[:, j], model.flow(cols[:, j]))

    def test_blowup_reported(self):
        u = np.array([1e200, -1e200, 1e200, -1e200, 1e200, -1e200])
        with pytest.raises(BlowUpError):
            Lorenz96(dim=6, substeps=1).flow(u)


class TestBallProjection:
    def test_radial_case(self):
        ball = BallSpec(1.0, beta=0.0)
        assert np.allclose(project_to_ball(np.array([2.0, 0.0]), ball), [1.0, 0.0], atol=1e-12)

    def test_observed_axis_case(self):
        # beta=1, observed first coordinate: multiplier solves 4/(2+lam) = 1
        ball = BallSpec(1.0, beta=1.0, obs_matrix=selection_matrix(2, [0]))
        v = project_to_ball(np.array([2.0, 0.0]), ball)
        assert np.allclose(v, [1.0, 0.0], atol=1e-12)

    def test_inside_unchanged(self):
        ball = BallSpec(5.0, beta=1.0, obs_matrix=selection_matrix(3, [0]))
        u = np.array([1.0, 2.0, -1.0])
        assert np.array_equal(project_to_ball(u, ball), u)

    def test_optimal_against_random_feasible_points(self):
        rng = np.random.default_rng(6)
        h = selection_matrix(2, [0])
        ball = BallSpec(1.0, beta=1.0, obs_matrix=h)
        u = np.array([2.0, 2.0])
        v = project_to_ball(u, ball)
        assert np.linalg.norm(v) <= 1.0 + 1e-12

        def v_norm(w):
            return np.sqrt(np.dot(w, w) + np.dot(h @ w, h @ w))

        for _ in range(100):
            w = rng.standard_normal(2)
            w *= rng.uniform(0, 1.0) / np.linalg.norm(w)
            assert v_norm(u - v) <= v_norm(u - w) + 1e-10

    def test_idempotent_and_feasible(self):
        rng = np.random.default_rng(7)
        h = selection_matrix(5, [0, 2])
        ball = BallSpec(1.3, beta=2.0, obs_matrix=h)
        u = rng.standard_normal((5, 40)) * 3.0
        v = project_to_ball(u, ball)
        assert np.all(np.linalg.norm(v, axis=0) <= 1.3 * (1 + 1e-12))
        v2 = project_to_ball(v, ball)
        assert np.abs(v2 - v).max() <= 1e-12 * max(1.0, np.abs(v).max())

    def test_nonexpansive_toward_feasible_points(self):
        rng = np.random.default_rng(8)
        h = selection_matrix(4, [1, 3])
        ball = BallSpec(1.0, beta=1.0, obs_matrix=h)

        def v_norm(w):
            return np.sqrt(np.dot(w, w) + np.dot(h @ w, h @ w))

        for _ in range(50):
            u = 3.0 * rng.standard_normal(4)
            w = rng.standard_normal(4)
            w *= rng.uniform(0, 1.0) / np.linalg.norm(w)
            v = project_to_ball(u, ball)
            assert v_norm(v - w) <= v_norm(u - w) + 1e-10


class TestBallRadius:
    def test_lorenz96_forward_invariance(self):
        model = Lorenz96(dim=60, substeps=100)
        r = estimate_ball_radius(model, horizon=500.0, seed=0)
        assert r > 0
        u = np.sqrt(10.0) * np.random.default_rng(123).standard_normal(60)
        for _ in range(200):  # settle onto the attractor
            u = model.flow(u)
        for _ in range(10_000):
            u = model.flow(u)
            assert np.linalg.norm(u) <= r

    def test_decaying_system_tracks_trajectory_maximum(self):
        model = LinearODE(-np.eye(3), dt_obs=0.1, substeps=10)
        r = estimate_ball_radius(model, horizon=20.0, seed=1)
        # after burn-in the decaying trajectory only shrinks, so the radius
        # is 1.1x the first post-burn-in state
        assert 0 < r < 1.1 * np.sqrt(3.0)

    def test_lorenz63_ball_contains_attractor(self):
        model = Lorenz63(substeps=50)
        r = estimate_ball_radius(model, horizon=200.0, seed=2)
        pts = sample_attractor(model, 200, burn_in=100, stride=2, seed=3)
        assert np.all(np.linalg.norm(pts, axis=1) <= r)
        # the classical bound point (0, 0, rho + sigma) maps to the origin
        # in these shifted coordinates
        assert np.linalg.norm(np.zeros(3)) <= r

    def test_short_horizon_rejected(self):
        with pytest.raises(ValueError):
            estimate_ball_radius(Lorenz96(dim=6, substeps=5), horizon=0.5)
