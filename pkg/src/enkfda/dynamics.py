"""Flow maps of the truth dynamics and the absorbing-ball projection.

A model advances states over one observation interval ``dt_obs`` with a
fixed number of internal RK4 substeps. All flows accept a single state
``(d,)`` or column-stacked states ``(d, n)`` and are deterministic.
"""
import numpy as np

from . import rng as streams
from ._kernels import rk4_lorenz63, rk4_lorenz96
from .base import ParamsMixin
from .validation import BlowUpError, as_states

__all__ = [
    "Lorenz63",
    "Lorenz96",
    "LinearODE",
    "LinearMap",
    "BallSpec",
    "project_to_ball",
    "estimate_ball_radius",
]


def _rk4(rhs, u, h, nsub):
    for _ in range(nsub):
        k1 = rhs(u)
        k2 = rhs(u + 0.5 * h * k1)
        k3 = rhs(u + 0.5 * h * k2)
        k4 = rhs(u + h * k3)
        u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return u


class DynamicsModel(ParamsMixin):
    """Base flow map: classical RK4 over ``substeps`` internal steps."""

    kind = "generic"

    def _check_steps(self):
        if self.dt_obs <= 0:
            raise ValueError(f"dt_obs must be positive, got {self.dt_obs}")
        if self.substeps < 1:
            raise ValueError(f"substeps must be >= 1, got {self.substeps}")

    @property
    def step_size(self):
        return self.dt_obs / self.substeps

    def rhs(self, u):
        raise NotImplementedError

    def _advance(self, u):
        return _rk4(self.rhs, u, self.step_size, self.substeps)

    def flow(self, u):
        """Advance state(s) by one observation interval."""
        self._check_steps()
        u, single = as_states(u, dim=self.dim, name="state")
        out = self._advance(u)
        if not np.all(np.isfinite(out)):
            raise BlowUpError(
                f"non-finite state after {self.substeps} internal steps of {self.kind}"
            )
        return out[:, 0] if single else out


class Lorenz96(DynamicsModel):
    """Cyclic Lorenz-96 system du_i/dt = (u_{i+1} - u_{i-2}) u_{i-1} - u_i + F.

    Parameters
    ----------
    dim : int
        State dimension, >= 4.
    forcing : float
        Constant forcing F (8 gives chaos).
    dt_obs : float
        Time between observations.
    substeps : int
        Internal RK4 steps per observation interval.
    """

    kind = "lorenz96"

    def __init__(self, dim=60, forcing=8.0, dt_obs=0.1, substeps=100):
        self.dim = int(dim)
        self.forcing = float(forcing)
        self.dt_obs = float(dt_obs)
        self.substeps = int(substeps)
        if self.dim < 4:
            raise ValueError(f"lorenz96 needs dim >= 4, got {self.dim}")

    def rhs(self, u):
        u, single = as_states(u, dim=self.dim, name="state")
        out = (np.roll(u, -1, axis=0) - np.roll(u, 2, axis=0)) * np.roll(u, 1, axis=0)
        out += self.forcing - u
        return out[:, 0] if single else out

    def _advance(self, u):
        return rk4_lorenz96(u, self.forcing, self.step_size, self.substeps)

    def with_substeps(self, substeps):
        return Lorenz96(self.dim, self.forcing, self.dt_obs, substeps)

    def with_forcing(self, forcing):
        return Lorenz96(self.dim, forcing, self.dt_obs, self.substeps)


class Lorenz63(DynamicsModel):
    """Lorenz-63 in coordinates shifted so the quadratic term conserves energy.

    The third coordinate is the classical z minus (rho + sigma); with the
    standard parameters (10, 8/3, 28) the vector field is

        du1/dt = sigma (u2 - u1)
        du2/dt = -sigma u1 - u2 - u1 u3
        du3/dt = u1 u2 - b u3 - b (rho + sigma)
    """

    kind = "lorenz63"
    dim = 3

    def __init__(self, sigma=10.0, b=8.0 / 3.0, rho=28.0, dt_obs=0.1, substeps=100):
        self.sigma = float(sigma)
        self.b = float(b)
        self.rho = float(rho)
        self.dt_obs = float(dt_obs)
        self.substeps = int(substeps)

    def rhs(self, u):
        u, single = as_states(u, dim=3, name="state")
        x, y, z = u[0], u[1], u[2]
        out = np.stack(
            [
                self.sigma * (y - x),
                -self.sigma * x - y - x * z,
                x * y - self.b * z - self.b * (self.rho + self.sigma),
            ]
        )
        return out[:, 0] if single else out

    def _advance(self, u):
        return rk4_lorenz63(u, self.sigma, self.b, self.rho, self.step_size, self.substeps)

    def with_substeps(self, substeps):
        return Lorenz63(self.sigma, self.b, self.rho, self.dt_obs, substeps)


class LinearODE(DynamicsModel):
    """Test system du/dt = M u, integrated with the same RK4 scheme."""

    kind = "linear_ode"

    def __init__(self, matrix, dt_obs=0.1, substeps=100):
        self.matrix = np.asarray(matrix, dtype=float)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise ValueError("matrix must be square")
        self.dt_obs = float(dt_obs)
        self.substeps = int(substeps)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def rhs(self, u):
        u, single = as_states(u, dim=self.dim, name="state")
        out = self.matrix @ u
        return out[:, 0] if single else out

    def with_substeps(self, substeps):
        return LinearODE(self.matrix, self.dt_obs, substeps)


class LinearMap(DynamicsModel):
    """Exact discrete-time map u -> A u (linear-Gaussian oracle runs)."""

    kind = "linear_map"

    def __init__(self, matrix, dt_obs=1.0):
        self.matrix = np.asarray(matrix, dtype=float)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise ValueError("matrix must be square")
        self.dt_obs = float(dt_obs)
        self.substeps = 1

    @property
    def dim(self):
        return self.matrix.shape[0]

    def rhs(self, u):
        raise NotImplementedError("linear_map is a discrete map, not an ODE")

    def _advance(self, u):
        return self.matrix @ u


class BallSpec(ParamsMixin):
    """Absorbing ball {||u|| <= radius} with the projection metric.

    ``beta`` and ``obs_matrix`` define the weighted norm in which states
    outside the ball are projected back onto it.
    """

    def __init__(self, radius, beta=0.0, obs_matrix=None):
        self.radius = float(radius)
        self.beta = float(beta)
        self.obs_matrix = None if obs_matrix is None else np.asarray(obs_matrix, dtype=float)
        if self.radius < 0:
            raise ValueError(f"radius must be nonnegative, got {self.radius}")
        if self.beta < 0:
            raise ValueError(f"beta must be nonnegative, got {self.beta}")


def _ball_scalings(p_sq, q_sq, beta, radius, tol_rel=1e-12, max_iter=200):
    """Solve ||v(lam)|| = radius for the per-column multipliers.

    v(lam) scales the observed block by (1+beta)/(1+beta+lam) and the rest
    by 1/(1+lam); the column norm is strictly decreasing in lam, so a
    safeguarded Newton iteration from a bracketing interval always lands.
    """
    r_sq = radius * radius
    cb = 1.0 + beta

    def value(lam):
        return (cb / (cb + lam)) ** 2 * p_sq + (1.0 / (1.0 + lam)) ** 2 * q_sq - r_sq

    def slope(lam):
        return (
            -2.0 * cb**2 / (cb + lam) ** 3 * p_sq
            - 2.0 / (1.0 + lam) ** 3 * q_sq
        )

    lo = np.zeros_like(p_sq)
    hi = np.ones_like(p_sq)
    for _ in range(200):
        bad = value(hi) > 0.0
        if not bad.any():
            break
        hi = np.where(bad, 2.0 * hi, hi)
    else:
        raise BlowUpError("ball projection failed to bracket the multiplier")

    lam = 0.5 * (lo + hi)
    for _ in range(max_iter):
        g = value(lam)
        lo = np.where(g > 0.0, lam, lo)
        hi = np.where(g <= 0.0, lam, hi)
        step = g / slope(lam)
        cand = lam - step
        inside = (cand > lo) & (cand < hi)
        lam = np.where(inside, cand, 0.5 * (lo + hi))
        norm = np.sqrt(np.maximum(value(lam) + r_sq, 0.0))
        if np.all(np.abs(norm - radius) <= tol_rel * radius):
            return lam
    raise BlowUpError("ball projection multiplier search did not converge")


def project_to_ball(u, ball):
    """Project state(s) onto the ball in the observation-weighted norm.

    States with ``||u|| <= radius`` pass through unchanged. Otherwise the
    unique closest point of the ball in the weighted norm is returned; it
    is computed in closed form per projection block with a scalar root
    solve for the multiplier, accurate to ``| ||v|| - r | <= 1e-12 r``.
    """
    if ball is None:
        return u
    u, single = as_states(u, name="state")
    norms_sq = np.einsum("ij,ij->j", u, u)
    r = ball.radius
    outside = norms_sq > r * r
    if not outside.any():
        return u[:, 0].copy() if single else u.copy()
    if r == 0.0:
        out = u.copy()
        out[:, outside] = 0.0
        return out[:, 0] if single else out

    h = ball.obs_matrix
    sub = u[:, outside]
    if ball.beta > 0.0 and h is not None and h.shape[0]:
        pu = h.T @ (h @ sub)
    else:
        pu = np.zeros_like(sub)
    qu = sub - pu
    p_sq = np.einsum("ij,ij->j", pu, pu)
    q_sq = np.einsum("ij,ij->j", qu, qu)
    beta = ball.beta if (h is not None and h.shape[0]) else 0.0
    lam = _ball_scalings(p_sq, q_sq, beta, r)
    cb = 1.0 + beta
    proj = (cb / (cb + lam)) * pu + (1.0 / (1.0 + lam)) * qu
    out = u.copy()
    out[:, outside] = proj
    return out[:, 0] if single else out


def estimate_ball_radius(model, horizon=500.0, seed=0):
    """Empirical absorbing-ball radius: 1.1 x max ||u_t|| after burn-in.

    Integrates one trajectory of length ``horizon`` (time units) from a
    standard normal start drawn from the (seed, ball) stream; the first
    10% is discarded as burn-in.
    """
    if horizon < 100.0 * model.dt_obs:
        raise ValueError(
            f"horizon {horizon} too short; need at least 100 observation intervals"
        )
    n_steps = int(round(horizon / model.dt_obs))
    burn = n_steps // 10
    gen = streams.stream(seed, streams.BALL)
    u = gen.standard_normal(model.dim)
    max_norm = 0.0
    for j in range(n_steps):
        try:
            u = model.flow(u)
        except BlowUpError as exc:
            raise BlowUpError(str(exc), step=j) from exc
        if j >= burn:
            max_norm = max(max_norm, float(np.linalg.norm(u)))
    return 1.1 * max_norm
