"""Square-root ensemble Kalman filter with covariance inflation.

One assimilation cycle ball-projects each member, propagates it through
the flow map, inflates (stochastically through the observed subspace, or
deterministically on the empirical covariance), and then applies a
deterministic transform to the forecast anomalies so that the analysis
ensemble reproduces the Kalman mean/covariance formulas exactly:

    mean:        m = mu + K(Sigma)(y - H mu)
    covariance:  (1/(N-1)) Za Za^T = (I - K(Sigma) H) Sigma

with Sigma the 1/N-normalized forecast covariance and K the gain built
on the eps^2 R noise convention. The transform is the symmetric ensemble
transform (ETKF), evaluated in observation space so the cost stays
O(k^3 + d N k) regardless of ensemble size.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from . import rng as streams
from .base import ParamsMixin
from .dynamics import project_to_ball
from .linalg import clamp_psd, kalman_gain, psd_sqrt, sym_eig, symmetrize
from .validation import BlowUpError, SingularMatrixError, as_state

logger = logging.getLogger(__name__)

__all__ = ["SquareRootEnKF", "PredictionMoments", "FilterRun"]


@dataclass
class PredictionMoments:
    """Forecast ensemble first two moments (anomalies sum to zero)."""

    mean: np.ndarray
    anomalies: np.ndarray
    normalization: str = "1/N"

    @property
    def covariance(self):
        n = self.anomalies.shape[1]
        return (self.anomalies @ self.anomalies.T) / n


@dataclass
class FilterRun:
    """Per-step filter output over one assimilation run."""

    steps: np.ndarray
    times: np.ndarray
    means: np.ndarray
    cov_traces: np.ndarray
    errors: np.ndarray = field(default=None)
    obs_errors: np.ndarray = field(default=None)


def _init_sqrt(init_cov, dim):
    init_cov = np.asarray(init_cov, dtype=float)
    if init_cov.ndim == 0:
        if init_cov < 0:
            raise ValueError("init_cov must be nonnegative")
        return float(np.sqrt(init_cov)) * np.eye(dim)
    if init_cov.ndim == 1:
        if init_cov.shape[0] != dim or (init_cov < 0).any():
            raise ValueError("diagonal init_cov must be nonnegative with length dim")
        return np.diag(np.sqrt(init_cov))
    if init_cov.shape != (dim, dim):
        raise ValueError(f"init_cov must be {dim}x{dim}")
    return psd_sqrt(init_cov)


def _zero_sum_basis(n):
    """Orthonormal columns spanning the zero-sum subspace of R^n."""
    q = np.zeros((n, n - 1))
    for m in range(1, n):
        q[:m, m - 1] = 1.0
        q[m, m - 1] = -m
        q[:, m - 1] /= np.sqrt(m * (m + 1.0))
    return q


class SquareRootEnKF(ParamsMixin):
    """Ensemble transform Kalman filter over a flow map.

    Parameters
    ----------
    model : flow map
        Object with ``flow(u)`` advancing column-stacked states by one
        observation interval (truth dynamics or a surrogate).
    observation : ObservationSetup
        Observation operator, noise scale and shape.
    n_members : int
        Ensemble size N >= 2. Sizes below 6k log a warning (the
        long-time accuracy guarantees assume N >= 6k; smaller ensembles
        still run).
    inflation : float
        Amplitude a >= 0 of the covariance inflation a * H^T H.
    inflation_mode : {"stochastic", "deterministic"}
        Stochastic mode perturbs each member along the observed subspace;
        deterministic mode propagates noiselessly and adds the inflation
        to the empirical covariance at analysis time.
    init_mean, init_cov : scalar or ndarray
        Initial ensemble distribution N(m0, C0).
    ball : BallSpec or None
        Absorbing ball; members are projected onto it before propagation.
    seed : int or tuple
        Root of the filter's random streams.
    """

    def __init__(self, model, observation, n_members=50, inflation=1.0,
                 inflation_mode="stochastic", init_mean=0.0, init_cov=1.0,
                 ball=None, seed=0):
        self.model = model
        self.observation = observation
        self.n_members = n_members
        self.inflation = inflation
        self.inflation_mode = inflation_mode
        self.init_mean = init_mean
        self.init_cov = init_cov
        self.ball = ball
        self.seed = seed

    # -- configuration ----------------------------------------------------

    def _validate(self):
        obs = self.observation
        if self.n_members < 2:
            raise ValueError(f"need at least 2 members, got {self.n_members}")
        if self.inflation < 0:
            raise ValueError(f"inflation must be nonnegative, got {self.inflation}")
        if self.inflation_mode not in ("stochastic", "deterministic"):
            raise ValueError(f"unknown inflation_mode {self.inflation_mode!r}")
        if self.n_members < 6 * obs.n_obs:
            logger.warning(
                "ensemble size %d is below 6k = %d; accuracy guarantees assume N >= 6k",
                self.n_members, 6 * obs.n_obs,
            )

    @property
    def dim(self):
        return self.model.dim

    # -- one assimilation cycle -------------------------------------------

    def initial_ensemble(self):
        """Draw N members i.i.d. from N(init_mean, init_cov)."""
        self._validate()
        d, n = self.dim, self.n_members
        m0 = np.broadcast_to(np.atleast_1d(np.asarray(self.init_mean, dtype=float)), (d,))
        sqrt_c0 = _init_sqrt(self.init_cov, d)
        z = streams.stream(self.seed, streams.ENSEMBLE_INIT).standard_normal((d, n))
        return m0[:, None] + sqrt_c0 @ z

    def predict(self, members, step):
        """Projection, propagation and inflation of the ensemble.

        Returns the forecast members and their 1/N moments. In stochastic
        mode each member receives noise sqrt(a) H^T z with z standard
        normal in observation space, so the unobserved components of the
        noise vanish identically.
        """
        try:
            forecast = self.model.flow(project_to_ball(members, self.ball))
        except BlowUpError as exc:
            raise BlowUpError(f"ensemble propagation failed: {exc}", step=step) from exc
        a = self.inflation
        if self.inflation_mode == "stochastic" and a > 0 and self.observation.n_obs:
            z = streams.stream(self.seed, streams.INFLATION, step).standard_normal(
                (self.observation.n_obs, members.shape[1])
            )
            forecast = forecast + np.sqrt(a) * (self.observation.h.T @ z)
        mean = forecast.mean(axis=1)
        return forecast, PredictionMoments(mean, forecast - mean[:, None])

    def analyze(self, forecast, moments, y):
        """Transform the forecast ensemble to match the Kalman formulas.

        Returns (analysis members, analysis mean, trace of the analysis
        covariance).
        """
        obs = self.observation
        y = as_state(y, dim=obs.n_obs, name="observation")
        z_f = moments.anomalies
        n = z_f.shape[1]
        sigma = (z_f @ z_f.T) / n
        if self.inflation_mode == "deterministic" and self.inflation > 0:
            sigma = sigma + self.inflation * (obs.h.T @ obs.h)
        gain = kalman_gain(sigma, obs.h, obs.eps, obs.noise_cov)
        mean = moments.mean + gain @ (y - obs.h @ moments.mean)
        if self.inflation_mode == "deterministic" and self.inflation > 0:
            anomalies = self._anomalies_from_covariance(sigma, gain, n)
        else:
            anomalies = self._transform_anomalies(z_f)
        members = mean[:, None] + anomalies
        cov_trace = float((anomalies**2).sum()) / (n - 1)
        return members, mean, cov_trace

    def _transform_anomalies(self, z_f):
        """Right-multiply by the symmetric inverse square root of
        I_N + Y^T (eps^2 R)^{-1} Y / N.

        Evaluated as (I_N - Y^T W^{-1} Y / N)^{1/2} with W the k x k
        innovation matrix, which stays well defined down to eps = 0 as
        long as W is invertible; only a k x k eigendecomposition is
        needed, so the cost is independent of the ensemble size.
        """
        obs = self.observation
        n = z_f.shape[1]
        bridge = np.sqrt((n - 1.0) / n)
        if not obs.n_obs:
            return bridge * z_f
        y = obs.h @ z_f
        if not np.any(y):
            return bridge * z_f
        innov = (y @ y.T) / n + (obs.eps * obs.eps) * obs.noise_cov
        wv, qv = sym_eig(symmetrize(innov))
        if wv.min() <= 0.0:
            raise SingularMatrixError(
                "innovation matrix is singular in the ensemble transform "
                "(eps = 0 with a degenerate ensemble)"
            )
        w_isqrt = symmetrize((qv / np.sqrt(wv)) @ qv.T)
        s = (w_isqrt @ y) / np.sqrt(n)
        lam, u = sym_eig(symmetrize(s @ s.T))
        lam = np.clip(lam, 0.0, 1.0)
        safe = np.where(lam > 1e-14, lam, 1.0)
        f = np.where(lam > 1e-14, (np.sqrt(1.0 - lam) - 1.0) / safe, -0.5)
        correction = (z_f @ s.T) @ ((u * f) @ (u.T @ s))
        return bridge * (z_f + correction)

    def _anomalies_from_covariance(self, sigma, gain, n):
        """Deterministic-inflation analysis ensemble.

        The target covariance (I - KH)(Sigma + aP) generally has rank
        above the ensemble span, so the ensemble is rebuilt from its
        leading min(N-1, d) eigenmodes on a fixed zero-sum basis; the
        covariance identity is exact whenever the rank fits.
        """
        target = clamp_psd(symmetrize(sigma - gain @ (self.observation.h @ sigma)),
                           name="analysis covariance")
        w, v = sym_eig(target)
        order = np.argsort(w)[::-1]
        keep = order[: min(n - 1, len(w))]
        scales = np.sqrt(np.clip(w[keep], 0.0, None) * (n - 1.0))
        q = _zero_sum_basis(n)[:, : len(keep)]
        return (v[:, keep] * scales) @ q.T

    # -- full runs ----------------------------------------------------------

    def fit(self, ys, truth=None):
        """Assimilate an observation sequence.

        Parameters
        ----------
        ys : ndarray (n_steps, k)
            Observations y_j for steps j = 1..n_steps.
        truth : ndarray (n_steps, d), optional
            True states u_j; enables per-step error reporting.

        Sets ``members_``, ``means_``, ``cov_traces_`` and ``run_``, and
        returns the estimator.
        """
        ys = np.atleast_2d(np.asarray(ys, dtype=float))
        n_steps = ys.shape[0]
        members = self.initial_ensemble()
        dt = getattr(self.model, "dt_obs", 1.0)
        means = np.empty((n_steps, self.dim))
        traces = np.empty(n_steps)
        errors = np.full(n_steps, np.nan)
        obs_errors = np.full(n_steps, np.nan)
        for j in range(1, n_steps + 1):
            forecast, moments = self.predict(members, j)
            members, mean, trace = self.analyze(forecast, moments, ys[j - 1])
            means[j - 1] = mean
            traces[j - 1] = trace
            if truth is not None:
                diff = mean - truth[j - 1]
                errors[j - 1] = np.linalg.norm(diff)
                obs_errors[j - 1] = np.linalg.norm(self.observation.h @ diff)
        self.members_ = members
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
