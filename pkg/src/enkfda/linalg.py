"""Dense symmetric linear algebra sized for moderate state dimensions.

Everything here is a pure function; matrices are plain ndarrays. The
eigendecomposition is the single factorization primitive: PSD square
roots are obtained by clamping small negative eigenvalues (round-off on
rank-deficient empirical covariances), never by Cholesky.
"""
import numpy as np
import scipy.linalg

from .validation import (
    PSD_CLAMP_REL,
    SingularMatrixError,
    as_states,
    check_obs_matrix,
    check_sym,
)

__all__ = [
    "obs_weighted_norm",
    "sym_eig",
    "psd_sqrt",
    "kalman_gain",
    "symmetrize",
    "clamp_psd",
]


def obs_weighted_norm(u, beta, h=None):
    """Norm sqrt(||u||^2 + beta * ||Pu||^2) weighting observed components.

    P = H*H is the orthogonal projector onto the observed subspace; since
    the rows of H are orthonormal, ||Pu|| = ||Hu||. With ``beta = 0`` (or
    no observation matrix) this is the Euclidean norm.

    Parameters
    ----------
    u : ndarray, shape (d,) or (d, n)
        State vector, or states stacked as columns.
    beta : float
        Nonnegative weight on the observed part.
    h : ndarray, shape (k, d), optional
        Observation matrix with orthonormal rows.

    Returns
    -------
    float or ndarray of shape (n,)
    """
    if beta < 0:
        raise ValueError(f"beta must be nonnegative, got {beta}")
    u, single = as_states(u, name="u")
    total = np.einsum("ij,ij->j", u, u)
    if beta > 0 and h is not None and h.shape[0]:
        if h.shape[1] != u.shape[0]:
            raise ValueError(
                f"observation matrix acts on dimension {h.shape[1]}, state has {u.shape[0]}"
            )
        hu = h @ u
        total = total + beta * np.einsum("ij,ij->j", hu, hu)
    out = np.sqrt(total)
    return float(out[0]) if single else out


def symmetrize(m):
    """Return (M + M^T) / 2."""
    m = np.asarray(m, dtype=float)
    return 0.5 * (m + m.T)


def sym_eig(s):
    """Eigendecomposition of a symmetric matrix.

    Returns
    -------
    eigenvalues : ndarray, ascending
    eigenvectors : ndarray, orthonormal columns, S = V diag(w) V^T

    Raises
    ------
    SingularMatrixError
        If the iterative solver fails to converge (ill-conditioned input).
    """
    s = check_sym(s, name="sym_eig input")
    try:
        w, v = np.linalg.eigh(s)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"eigendecomposition did not converge: {exc}") from exc
    return w, v


def clamp_psd(s, name="matrix"):
    """Project a nearly-PSD symmetric matrix onto the PSD cone.

    Negative eigenvalues within ``-1e-10 * trace`` are treated as round-off
    and clamped to zero; anything lower raises.
    """
    s = symmetrize(s)
    w, v = sym_eig(s)
    trace = max(abs(np.trace(s)), 1e-300)
    if w.min() < -PSD_CLAMP_REL * trace:
        raise SingularMatrixError(
            f"{name} has eigenvalue {w.min():.3e} below clamp threshold "
            f"{-PSD_CLAMP_REL * trace:.3e}; not PSD"
        )
    if w.min() >= 0.0:
        return s
    w = np.clip(w, 0.0, None)
    return symmetrize((v * w) @ v.T)


def psd_sqrt(s):
    """Symmetric square root M with M @ M = S, for S PSD within round-off."""
    s = check_sym(s, name="psd_sqrt input")
    w, v = sym_eig(s)
    trace = max(abs(np.trace(s)), 1e-300)
    if w.min() < -PSD_CLAMP_REL * trace:
        raise SingularMatrixError(
            f"psd_sqrt input has eigenvalue {w.min():.3e}, materially negative"
        )
    w = np.clip(w, 0.0, None)
    return symmetrize((v * np.sqrt(w)) @ v.T)


def kalman_gain(sigma, h, eps, r):
    """Gain Sigma H^T (H Sigma H^T + eps^2 R)^{-1}.

    The k x k innovation system is solved by Cholesky (the observation
    noise covariance of scale ``eps`` is ``eps^2 R``, positive definite
    for eps > 0), never by explicit inversion.

    Parameters
    ----------
    sigma : ndarray (d, d)
        PSD forecast covariance.
    h : ndarray (k, d)
        Observation matrix with orthonormal rows.
    eps : float
        Observation noise scale, > 0.
    r : ndarray (k, k)
        Symmetric positive definite noise shape.

    Returns
    -------
    ndarray (d, k)
    """
    sigma = check_sym(sigma, name="sigma")
    h = check_obs_matrix(h, dim=sigma.shape[0])
    r = check_sym(r, name="r")
    k = h.shape[0]
    if k == 0:
        return np.zeros((sigma.shape[0], 0))
    hs = h @ sigma
    if not np.any(hs):
        # collapsed covariance: zero gain regardless of the noise scale
        return np.zeros((sigma.shape[0], k))
    innov = hs @ h.T + (eps * eps) * r
    try:
        c, low = scipy.linalg.cho_factor(symmetrize(innov), lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"innovation matrix is singular: {exc}") from exc
    # gain = (innov^{-1} H Sigma)^T since both factors are symmetric
    return scipy.linalg.cho_solve((c, low), hs).T
