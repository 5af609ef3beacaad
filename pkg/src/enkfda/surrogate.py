"""Surrogate flow maps and empirical one-step model-error estimation.

Three surrogate families run without any learned component (coarse
integration, perturbed forcing, local quadratic ridge regression); the
fourth executes a convolutional network from a weight file. Each exposes
``flow(u)`` over one observation interval, interchangeable with the
truth dynamics inside the filters.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import network as network_io
from . import rng as streams
from .base import ParamsMixin
from .validation import BlowUpError, SingularMatrixError, as_states

__all__ = [
    "CoarseStepSurrogate",
    "PerturbedForcingSurrogate",
    "RidgeQuadraticSurrogate",
    "NeuralSurrogate",
    "train_ridge_quadratic",
    "fit_ridge_substep_surrogate",
    "sample_attractor",
    "estimate_model_error",
    "ModelErrorEstimate",
]


class CoarseStepSurrogate(ParamsMixin):
    """Truth dynamics integrated with fewer internal RK4 substeps."""

    kind = "coarse_step"

    def __init__(self, base_model, substeps):
        self.base_model = base_model
        self.substeps = int(substeps)
        self._coarse = base_model.with_substeps(self.substeps)

    @property
    def dim(self):
        return self.base_model.dim

    @property
    def dt_obs(self):
        return self.base_model.dt_obs

    def flow(self, u):
        return self._coarse.flow(u)


class PerturbedForcingSurrogate(ParamsMixin):
    """Truth dynamics with the constant forcing offset by ``forcing_offset``."""

    kind = "perturbed_forcing"

    def __init__(self, base_model, forcing_offset):
        if not hasattr(base_model, "with_forcing"):
            raise ValueError(
                f"{type(base_model).__name__} has no constant forcing to perturb"
            )
        self.base_model = base_model
        self.forcing_offset = float(forcing_offset)
        self._perturbed = base_model.with_forcing(base_model.forcing + self.forcing_offset)

    @property
    def dim(self):
        return self.base_model.dim

    @property
    def dt_obs(self):
        return self.base_model.dt_obs

    def flow(self, u):
        return self._perturbed.flow(u)


def _window_features(states, window):
    """Per-coordinate feature rows shared across the cyclic coordinates.

    states: (n, d). Features per coordinate: constant, the 2w+1 window
    values, and all distinct pairwise products within the window.
    Returns (n * d, n_features).
    """
    n, d = states.shape
    nv = 2 * window + 1
    if nv > d:
        raise ValueError(f"window {window} too wide for dimension {d}")
    vals = np.stack([np.roll(states, -s, axis=1) for s in range(-window, window + 1)], axis=2)
    feats = [np.ones((n, d))]
    for a in range(nv):
        feats.append(vals[:, :, a])
    for a in range(nv):
        for b in range(a, nv):
            feats.append(vals[:, :, a] * vals[:, :, b])
    return np.stack(feats, axis=2).reshape(n * d, -1)


def _n_features(window):
    nv = 2 * window + 1
    return 1 + nv + nv * (nv + 1) // 2


class RidgeQuadraticSurrogate(ParamsMixin):
    """Cyclically shared quadratic map, applied ``applications`` times.

    The learned map advances states by dt_obs / applications; composing
    it recovers one observation interval. A quadratic map fit directly
    at the full interval cannot represent the flow composition and its
    error saturates, so surrogates trained on sub-interval pairs are
    markedly more accurate.
    """

    kind = "ridge_quadratic"

    def __init__(self, weights, window, dim, dt_obs, applications=1):
        self.weights = np.asarray(weights, dtype=float)
        self.window = int(window)
        self.dim = int(dim)
        self.dt_obs = float(dt_obs)
        self.applications = int(applications)
        if self.weights.shape != (_n_features(self.window),):
            raise ValueError(
                f"expected {_n_features(self.window)} weights for window {self.window}, "
                f"got {self.weights.shape}"
            )
        if self.applications < 1:
            raise ValueError("applications must be >= 1")

    def _apply_once(self, states_t):
        feats = _window_features(states_t, self.window)
        return (feats @ self.weights).reshape(states_t.shape)

    def flow(self, u):
        u, single = as_states(u, dim=self.dim, name="state")
        out = u.T
        for _ in range(self.applications):
            out = self._apply_once(out)
        if not np.all(np.isfinite(out)):
            raise BlowUpError("ridge surrogate produced a non-finite state")
        out = out.T
        return out[:, 0] if single else out


def train_ridge_quadratic(inputs, outputs, regularization, window=2, dt_obs=0.1,
                          applications=1):
    """Fit the shared per-coordinate quadratic map from (u, image) pairs.

    Parameters
    ----------
    inputs, outputs : ndarray (n_pairs, d)
        Input states and their images under the map being learned.
    regularization : float
        Ridge parameter; the normal equations are solved symmetrically
        and raise if singular (possible at regularization 0).
    window : int
        Half-width of the cyclic feature window.
    dt_obs : float
        Observation interval the resulting surrogate advances per flow.
    applications : int
        How many times the learned map is composed per flow call (use 1
        when the pairs span a full observation interval).
    """
    inputs = np.asarray(inputs, dtype=float)
    outputs = np.asarray(outputs, dtype=float)
    if inputs.shape != outputs.shape or inputs.ndim != 2:
        raise ValueError("inputs and outputs must be matching (n_pairs, d) arrays")
    n_pairs, d = inputs.shape
    n_feat = _n_features(window)
    if n_pairs * d < 10 * n_feat:
        raise ValueError(
            f"need at least {10 * n_feat} per-coordinate rows "
            f"(10x the {n_feat} features), got {n_pairs * d}"
        )
    phi = _window_features(inputs, window)
    penalty = np.eye(n_feat)
    penalty[0, 0] = 0.0  # leave the constant feature unpenalized
    gram = phi.T @ phi + regularization * penalty
    rhs = phi.T @ outputs.reshape(-1)
    try:
        c, low = scipy.linalg.cho_factor(gram, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"ridge normal equations are singular: {exc}") from exc
    weights = scipy.linalg.cho_solve((c, low), rhs)
    return RidgeQuadraticSurrogate(weights, window, d, dt_obs, applications)


def fit_ridge_substep_surrogate(model, n_pairs=60_000, seed=0, regularization=1e-8,
                                window=2, substeps=20, n_trajectories=30):
    """Train the ridge surrogate on sub-interval pairs of the given model.

    Pairs (u_t, u_{t+h}) with h = dt_obs / substeps are collected along
    trajectories started from standard normal draws; the fitted map is
    composed ``substeps`` times per observation interval.
    """
    h_model = model.with_substeps(max(1, model.substeps // substeps))
    h_model.dt_obs = model.dt_obs / substeps
    gen = streams.stream(seed, streams.TRAINING)
    u = gen.standard_normal((model.dim, n_trajectories))
    steps = int(np.ceil(n_pairs / n_trajectories))
    xs, ys = [], []
    for _ in range(steps):
        v = h_model.flow(u)
        xs.append(u.T.copy())
        ys.append(v.T.copy())
        u = v
    inputs = np.concatenate(xs)[:n_pairs]
    outputs = np.concatenate(ys)[:n_pairs]
    return train_ridge_quadratic(
        inputs, outputs, regularization, window=window,
        dt_obs=model.dt_obs, applications=substeps,
    )


class NeuralSurrogate(ParamsMixin):
    """Flow map executed from a network weight file."""

    kind = "neural_net"

    def __init__(self, weights, dt_obs=0.1):
        if isinstance(weights, (str, bytes)):
            weights = network_io.load_weights(weights)
        self.weights = weights
        self.dt_obs = float(dt_obs)

    @property
    def dim(self):
        return self.weights.spatial_dim

    def flow(self, u):
        out = network_io.forward(self.weights, u)
        if not np.all(np.isfinite(out)):
            raise BlowUpError("network surrogate produced a non-finite state")
        return out


def sample_attractor(model, n, burn_in=500, stride=3, seed=0):
    """Collect n decorrelated states along one long post-burn-in run.

    ``burn_in`` and ``stride`` count observation intervals. Returns an
    (n, dim) array; fixed seeds give identical sample sets.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    if stride < 1:
        raise ValueError(f"stride must be a positive step count, got {stride}")
    if burn_in < 0:
        raise ValueError("burn_in must be nonnegative")
    gen = streams.stream(seed, streams.ATTRACTOR)
    u = gen.standard_normal(model.dim)
    for j in range(burn_in):
        try:
            u = model.flow(u)
        except BlowUpError as exc:
            raise BlowUpError(str(exc), step=j) from exc
    out = np.empty((n, model.dim))
    for i in range(n):
        for _ in range(stride):
            u = model.flow(u)
        out[i] = u
    return out


@dataclass
class ModelErrorEstimate:
    """Worst-case one-step surrogate errors over a sample set.

    ``kappa_hat`` is the full-state maximum, ``delta_hat`` the maximum of
    the unobserved component; the projection is a contraction so
    delta_hat <= kappa_hat always.
    """

    kappa_hat: float
    delta_hat: float
    n_samples: int


def estimate_model_error(truth_model, surrogate, samples, h):
    """Maximum surrogate-vs-truth one-step errors over attractor samples.

    Parameters
    ----------
    truth_model, surrogate : flow maps
    samples : ndarray (n, d)
        Evaluation states (typically from ``sample_attractor``).
    h : ndarray (k, d)
        Observation matrix; the unobserved error removes the H*H
        projection of the difference.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[0] == 0:
        raise ValueError("samples must be a nonempty (n, d) array")
    cols = samples.T
    diff = surrogate.flow(cols) - truth_model.flow(cols)
    kappa = float(np.linalg.norm(diff, axis=0).max())
    if h is not None and h.shape[0]:
        diff_unobs = diff - h.T @ (h @ diff)
    else:
        diff_unobs = diff
    delta = float(np.linalg.norm(diff_unobs, axis=0).max())
    return ModelErrorEstimate(kappa_hat=kappa, delta_hat=delta, n_samples=samples.shape[0])
