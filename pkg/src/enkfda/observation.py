"""Observation operators with orthonormal selection rows and noise streams."""
import csv

import numpy as np

from . import rng as streams
from .base import ParamsMixin
from .linalg import psd_sqrt
from .validation import as_state, check_obs_matrix, check_sym

__all__ = [
    "selection_matrix",
    "every_third_removed",
    "first_coordinate",
    "ObservationSetup",
]


def selection_matrix(dim, indices):
    """Observation matrix whose rows select the given state indices."""
    indices = np.asarray(indices, dtype=int)
    if indices.size and (indices.min() < 0 or indices.max() >= dim):
        raise ValueError(f"observation indices out of range for dimension {dim}")
    if len(np.unique(indices)) != len(indices):
        raise ValueError("observation indices must be distinct")
    h = np.zeros((len(indices), dim))
    h[np.arange(len(indices)), indices] = 1.0
    return h


def every_third_removed(dim):
    """Identity with every third row removed: observe 2 of every 3 components.

    Rows select indices {0, 1, 3, 4, 6, ...}; k = 2 dim / 3.
    """
    if dim % 3 != 0:
        raise ValueError(f"dimension must be divisible by 3, got {dim}")
    kept = [i for i in range(dim) if i % 3 != 2]
    return selection_matrix(dim, kept)


def first_coordinate(dim=3):
    """Observe only the first state component (1 x dim selection row)."""
    return selection_matrix(dim, [0])


class ObservationSetup(ParamsMixin):
    """Linear observations y = H u + eps * eta with Cov[eta] = R.

    Parameters
    ----------
    h : ndarray (k, d)
        Observation matrix with orthonormal rows (H H* = I_k).
    eps : float
        Noise scale, > 0 for filtering (0 allowed for noiseless data).
    noise_cov : ndarray (k, k), optional
        Noise shape R; defaults to the identity.
    seed : int or tuple
        Seed for the per-step observation noise stream.
    """

    def __init__(self, h, eps, noise_cov=None, seed=0):
        self.h = check_obs_matrix(h)
        self.eps = float(eps)
        if self.eps < 0:
            raise ValueError(f"eps must be nonnegative, got {self.eps}")
        k = self.h.shape[0]
        if noise_cov is None:
            noise_cov = np.eye(k)
        self.noise_cov = check_sym(noise_cov, name="noise_cov")
        if self.noise_cov.shape[0] != k:
            raise ValueError(
                f"noise_cov is {self.noise_cov.shape[0]}x{self.noise_cov.shape[0]}, "
                f"expected {k}x{k}"
            )
        if k and np.linalg.eigvalsh(self.noise_cov).min() <= 0:
            raise ValueError("noise_cov must be positive definite")
        self.seed = seed
        self._sqrt_r = psd_sqrt(self.noise_cov)

    @property
    def n_obs(self):
        return self.h.shape[0]

    @property
    def dim(self):
        return self.h.shape[1]

    def project(self, u):
        """Apply H."""
        return self.h @ u

    def observe(self, u, step):
        """Noisy observation of state ``u`` at assimilation step ``step``.

        The noise is a pure function of (seed, step): repeated calls are
        bit-identical, and distinct steps use independent streams.
        """
        u = as_state(u, dim=self.dim)
        y = self.h @ u
        if self.eps > 0 and self.n_obs:
            z = streams.stream(self.seed, streams.OBS_NOISE, step).standard_normal(self.n_obs)
            y = y + self.eps * (self._sqrt_r @ z)
        return y

    def observe_sequence(self, truth):
        """Observations for a (n_steps, d) truth trajectory; steps count from 1."""
        return np.array([self.observe(u, j + 1) for j, u in enumerate(truth)])


def write_observations_csv(path, ys):
    """Observation sequence as CSV with columns step, y_1..y_k."""
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step"] + [f"y_{i + 1}" for i in range(ys.shape[1])])
        for j, row in enumerate(ys):
            writer.writerow([j + 1] + [repr(float(v)) for v in row])
