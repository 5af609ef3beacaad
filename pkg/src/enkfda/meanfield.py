"""Gaussian projected filter: the mean-field limit of the ensemble filter.

Instead of particles, a Gaussian (mean, covariance) pair is propagated.
The prediction moments are Gaussian expectations of the projected flow,
approximated here by plain Monte Carlo with a per-step sample stream;
the analysis applies the Kalman formulas with the inflation operator
a * H^T H added to the prediction covariance.
"""
from dataclasses import dataclass

import numpy as np

from . import rng as streams
from .base import ParamsMixin
from .dynamics import project_to_ball
from .ensemble import FilterRun, _init_sqrt
from .linalg import clamp_psd, kalman_gain, psd_sqrt, symmetrize
from .validation import BlowUpError, as_state

__all__ = ["GaussianState", "GaussianProjectedFilter"]


@dataclass
class GaussianState:
    """Mean and PSD covariance of the filtering Gaussian."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float)
        self.cov = np.asarray(self.cov, dtype=float)
        if self.cov.shape != (self.mean.shape[0], self.mean.shape[0]):
            raise ValueError("covariance shape does not match mean")

    @property
    def trace(self):
        return float(np.trace(self.cov))


class GaussianProjectedFilter(ParamsMixin):
    """Mean-field filter with Monte Carlo Gaussian expectations.

    Parameters
    ----------
    model : flow map
    observation : ObservationSetup
    inflation : float
        Amplitude a of the inflation operator a * H^T H added to the
        prediction covariance before the analysis.
    n_samples : int
        Monte Carlo sample count per prediction (moment error O(n^-1/2)).
    init_mean, init_cov : scalar or ndarray
    ball : BallSpec or None
    seed : int or tuple
    """

    def __init__(self, model, observation, inflation=1.0, n_samples=10_000,
                 init_mean=0.0, init_cov=1.0, ball=None, seed=0):
        self.model = model
        self.observation = observation
        self.inflation = inflation
        self.n_samples = n_samples
        self.init_mean = init_mean
        self.init_cov = init_cov
        self.ball = ball
        self.seed = seed

    @property
    def dim(self):
        return self.model.dim

    def initial_state(self):
        d = self.dim
        m0 = np.broadcast_to(np.atleast_1d(np.asarray(self.init_mean, dtype=float)), (d,)).copy()
        sqrt_c0 = _init_sqrt(self.init_cov, d)
        return GaussianState(m0, symmetrize(sqrt_c0 @ sqrt_c0.T))

    def predict(self, state, step):
        """Monte Carlo moments of Psi(project(u)) under u ~ N(mean, cov).

        A zero covariance short-circuits to the deterministic push-forward
        of the mean. The sample covariance uses 1/(n-1).
        """
        if self.n_samples < 2:
            raise ValueError("n_samples must be at least 2")
        d = self.dim
        if not np.any(state.cov):
            image = self.model.flow(project_to_ball(state.mean, self.ball))
            return GaussianState(image, np.zeros((d, d)))
        sqrt_c = psd_sqrt(state.cov)
        z = streams.stream(self.seed, streams.MEANFIELD, step).standard_normal(
            (d, self.n_samples)
        )
        samples = state.mean[:, None] + sqrt_c @ z
        try:
            images = self.model.flow(project_to_ball(samples, self.ball))
        except BlowUpError as exc:
            raise BlowUpError(f"mean-field prediction failed: {exc}", step=step) from exc
        mu = images.mean(axis=1)
        anom = images - mu[:, None]
        cov = (anom @ anom.T) / (self.n_samples - 1)
        return GaussianState(mu, symmetrize(cov))

    def analyze(self, pred, y):
        """Kalman update of the inflated prediction Gaussian.

        The posterior covariance is symmetrized and eigenvalue-clamped to
        stop round-off drift over long runs.
        """
        obs = self.observation
        y = as_state(y, dim=obs.n_obs, name="observation")
        sigma_q = pred.cov
        if self.inflation > 0 and obs.n_obs:
            sigma_q = sigma_q + self.inflation * (obs.h.T @ obs.h)
        gain = kalman_gain(sigma_q, obs.h, obs.eps, obs.noise_cov)
        mean = pred.mean + gain @ (y - obs.h @ pred.mean)
        cov = clamp_psd(sigma_q - gain @ (obs.h @ sigma_q), name="analysis covariance")
        return GaussianState(mean, cov)

    def fit(self, ys, truth=None):
        """Alternate prediction and analysis over an observation sequence.

        Sets ``states_`` (list of per-step analysis Gaussians), ``means_``,
        ``cov_traces_`` and ``run_``; returns the estimator.
        """
        ys = np.atleast_2d(np.asarray(ys, dtype=float))
        n_steps = ys.shape[0]
        state = self.initial_state()
        dt = getattr(self.model, "dt_obs", 1.0)
        states = []
        means = np.empty((n_steps, self.dim))
        traces = np.empty(n_steps)
        errors = np.full(n_steps, np.nan)
        obs_errors = np.full(n_steps, np.nan)
        for j in range(1, n_steps + 1):
            state = self.analyze(self.predict(state, j), ys[j - 1])
            states.append(state)
            means[j - 1] = state.mean
            traces[j - 1] = state.trace
            if truth is not None:
                diff = state.mean - truth[j - 1]
                errors[j - 1] = np.linalg.norm(diff)
                obs_errors[j - 1] = np.linalg.norm(self.observation.h @ diff)
        self.states_ = states
        self.means_ = means
        self.cov_traces_ = traces
        self.run_ = FilterRun(
            steps=np.arange(1, n_steps + 1),
            times=dt * np.arange(1, n_steps + 1),
            means=means,
            cov_traces=traces,
            errors=errors if truth is not None else None,
            obs_errors=obs_errors if truth is not None else None,
        )
        return self
