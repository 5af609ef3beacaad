"""Input validation helpers and package exceptions."""
import numpy as np

__all__ = [
    "EnkfdaError",
    "ConfigError",
    "BlowUpError",
    "SingularMatrixError",
    "WeightSchemaError",
    "as_state",
    "as_states",
    "check_sym",
    "check_obs_matrix",
    "check_psd_tolerance",
]

# Eigenvalues of an empirical covariance may dip slightly negative from
# round-off; anything below -PSD_CLAMP_REL * trace is treated as genuinely
# indefinite rather than noise.
PSD_CLAMP_REL = 1e-10
SYM_TOL = 1e-12


class EnkfdaError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(EnkfdaError):
    """Invalid configuration (CLI exit code 2)."""


class BlowUpError(EnkfdaError):
    """Non-finite state encountered during integration (CLI exit code 3)."""

    def __init__(self, message, step=None):
        if step is not None:
            message = f"{message} (step {step})"
        super().__init__(message)
        self.step = step


class SingularMatrixError(EnkfdaError):
    """A matrix that must be invertible (or PSD) is not."""


class WeightSchemaError(EnkfdaError):
    """Network weight file violates the interchange schema."""


def as_state(u, dim=None, name="state"):
    """Coerce `u` to a finite 1-D float array, optionally of length `dim`."""
    u = np.asarray(u, dtype=float)
    if u.ndim != 1:
        raise ValueError(f"{name} must be a 1-D vector, got shape {u.shape}")
    if dim is not None and u.shape[0] != dim:
        raise ValueError(f"{name} has length {u.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(u)):
        raise ValueError(f"{name} contains non-finite entries")
    return u


def as_states(u, dim=None, name="states"):
    """Coerce to a (d, n) column-stacked array; a single vector becomes (d, 1).

    Returns (array, was_single) so callers can undo the promotion.
    """
    u = np.asarray(u, dtype=float)
    single = u.ndim == 1
    if single:
        u = u[:, None]
    if u.ndim != 2:
        raise ValueError(f"{name} must be 1-D or 2-D, got shape {u.shape}")
    if dim is not None and u.shape[0] != dim:
        raise ValueError(f"{name} has row dimension {u.shape[0]}, expected {dim}")
    return u, single


def check_sym(m, name="matrix", tol=SYM_TOL):
    """Validate symmetry of a square matrix within `tol` (relative)."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    scale = max(1.0, np.abs(m).max()) if m.size else 1.0
    if np.abs(m - m.T).max() > tol * scale:
        raise ValueError(f"{name} is not symmetric within tolerance {tol}")
    return m


def check_obs_matrix(h, dim=None):
    """Validate an observation matrix with orthonormal rows (H H* = I_k).

    Accepts k = 0 (no observations). Also checks that P = H*H is an
    orthogonal projection.
    """
    h = np.asarray(h, dtype=float)
    if h.ndim != 2:
        raise ValueError(f"observation matrix must be 2-D, got shape {h.shape}")
    k, d = h.shape
    if dim is not None and d != dim:
        raise ValueError(f"observation matrix has {d} columns, expected {dim}")
    if k > d:
        raise ValueError(f"more observation rows ({k}) than state dimension ({d})")
    if k:
        hht = h @ h.T
        if np.abs(hht - np.eye(k)).max() > 1e-12:
            raise ValueError("observation matrix rows are not orthonormal (HH* != I)")
        p = h.T @ h
        if np.abs(p @ p - p).max() > 1e-12:
            raise ValueError("H*H is not an orthogonal projection")
    return h


def check_psd_tolerance(eigenvalues, trace, name="matrix"):
    """Reject eigenvalues materially below zero (beyond round-off clamp)."""
    floor = -PSD_CLAMP_REL * max(abs(trace), 1e-300)
    lam_min = eigenvalues.min() if len(eigenvalues) else 0.0
    if lam_min < floor:
        raise SingularMatrixError(
            f"{name} has eigenvalue {lam_min:.3e}, below clamp threshold {floor:.3e}"
        )
