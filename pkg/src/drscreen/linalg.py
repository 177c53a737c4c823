"""Dense symmetric eigendecomposition and linear optimization over an L2 ball."""

from typing import NamedTuple

import numpy as np

from . import _kernels

_MAX_SWEEPS = 100
_OFFDIAG_TOL = 1e-12
_PSD_CLIP = -1e-10


class LinalgError(ValueError):
    """Raised for invalid matrix input or eigensolver non-convergence."""


class EigenDecomposition(NamedTuple):
    """Eigendecomposition ``a = q.T @ diag(phi) @ q`` with orthogonal ``q``.

    ``phi`` is returned in no particular order; callers sort when they
    need to.  Rows of ``q`` are the eigenvectors.
    """

    q: np.ndarray
    phi: np.ndarray


class BallExtrema(NamedTuple):
    min_value: float
    max_value: float
    argmin: np.ndarray
    argmax: np.ndarray


def _as_matrix(a):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise LinalgError(f"expected a 2-d array, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise LinalgError("matrix contains non-finite entries")
    return a


def sym_eigendecompose(a, check_psd=True):
    """Diagonalize a symmetric PSD matrix by cyclic Jacobi rotations.

    The off-diagonal Frobenius norm is driven below ``1e-12 * max(1, |a|_F)``
    within at most 100 sweeps; failure to converge raises LinalgError.
    Eigenvalues in ``(-1e-10, 0)`` are clipped to zero; anything more
    negative is rejected for PSD-declared input.
    """
    a = _as_matrix(a)
    n, m = a.shape
    if n != m:
        raise LinalgError(f"matrix is not square: shape {a.shape}")
    scale = np.max(np.abs(a)) if n else 0.0
    if np.max(np.abs(a - a.T)) > 1e-12 * (1.0 + scale):
        raise LinalgError("matrix is not symmetric within tolerance")
    sym = 0.5 * (a + a.T)
    tol = _OFFDIAG_TOL * max(1.0, float(np.linalg.norm(sym)))
    phi, v, sweeps = _kernels.jacobi_eigh(sym, tol, _MAX_SWEEPS)
    if sweeps < 0:
        raise LinalgError(
            f"Jacobi sweeps did not converge within {_MAX_SWEEPS} iterations"
        )
    if check_psd:
        bad = phi < _PSD_CLIP
        if np.any(bad):
            raise LinalgError(
                "matrix declared PSD has eigenvalue "
                f"{phi[bad].min():.3e} < {_PSD_CLIP:.0e}"
            )
        phi = np.where(phi < 0.0, 0.0, phi)
    return EigenDecomposition(q=v.T.copy(), phi=phi)


def ball_linear_extrema(a, center, radius):
    """Closed-form extrema of ``a @ v`` over ``|v - center|_2 <= radius``.

    min = a@center - radius*|a|, max = a@center + radius*|a|, attained at
    center -/+ (radius/|a|) * a.  A zero direction gives 0 for both with
    the center as argument point.
    """
    a = np.asarray(a, dtype=np.float64)
    center = np.asarray(center, dtype=np.float64)
    if a.shape != center.shape or a.ndim != 1:
        raise LinalgError(
            f"direction and center shapes differ: {a.shape} vs {center.shape}"
        )
    if radius < 0.0:
        raise LinalgError(f"negative radius {radius}")
    norm = float(np.linalg.norm(a))
    if norm == 0.0:
        return BallExtrema(0.0, 0.0, center.copy(), center.copy())
    mid = float(a @ center)
    step = (radius / norm) * a
    return BallExtrema(
        mid - radius * norm,
        mid + radius * norm,
        center - step,
        center + step,
    )
