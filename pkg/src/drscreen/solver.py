"""Training to a prescribed duality gap, primal/dual conversion, lambda_max."""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels, models
from .models import ModelError, ModelSpec

MAX_EPOCHS = 100_000

_L2L1_FEAS_TOL = 1e-10


class ConvergenceError(RuntimeError):
    """Solver failed to reach the requested gap; carries the best iterate."""

    def __init__(self, message, beta, alpha, gap, epochs):
        super().__init__(message)
        self.beta = beta
        self.alpha = alpha
        self.gap = gap
        self.epochs = epochs


@dataclass(frozen=True)
class PrimalDualSolution:
    beta: np.ndarray
    alpha: np.ndarray
    gap: float
    weights: np.ndarray
    spec: ModelSpec = field(repr=False)


def default_gap_tol(spec, dataset, w):
    """1e-10 * max(1, P_w(0)), the stopping rule used when none is given."""
    p0 = models.primal_objective(spec, dataset, w, np.zeros(dataset.d))
    return 1e-10 * max(1.0, p0)


def _checked_weights(dataset, w):
    w = np.ascontiguousarray(w, dtype=np.float64)
    if w.shape != (dataset.n,):
        raise ModelError(f"weights shape {w.shape} != ({dataset.n},)")
    if np.any(w < 0.0) or not np.all(np.isfinite(w)):
        raise ModelError("weights must be finite and nonnegative")
    return w


def train_hinge_l2(dataset, weights, lam, gap_tol=None, seed=0,
                   max_epochs=MAX_EPOCHS):
    """Train the hinge-loss L2-regularized model by dual coordinate ascent.

    Per-coordinate exact maximization with clipping to [0, 1], random
    permutation each epoch (seed-controlled), duality gap checked every
    epoch.  Returns a solution whose alpha lies in the box exactly and
    whose beta is recovered as (1 / lam) * (w x Xcheck).T @ alpha.
    """
    spec = ModelSpec.hinge_l2(lam, dataset.n)
    w = _checked_weights(dataset, weights)
    if gap_tol is None:
        gap_tol = default_gap_tol(spec, dataset, w)
    if gap_tol <= 0.0:
        raise ModelError(f"gap_tol must be positive, got {gap_tol}")
    xck = np.ascontiguousarray(dataset.xcheck)
    alpha = np.zeros(dataset.n)
    v = np.zeros(dataset.d)
    total_epochs = 0
    tol = gap_tol
    for _ in range(3):
        _, epochs, status = _kernels.hinge_l2_cd(
            xck, w, lam, alpha, v, int(seed), max_epochs - total_epochs, tol
        )
        total_epochs += epochs
        beta = v / lam
        gap = models.duality_gap(spec, dataset, w, beta, alpha)
        if gap <= gap_tol:
            return PrimalDualSolution(beta, alpha, gap, w.copy(), spec)
        if status != _kernels.STATUS_OK:
            break
        tol *= 0.5
    raise ConvergenceError(
        f"hinge+L2 training reached gap {gap:.3e} > {gap_tol:.3e} "
        f"after {total_epochs} epochs",
        beta, alpha, gap, total_epochs,
    )


def train_squared_hinge_l1(dataset, weights, lam, gap_tol=None,
                           max_epochs=MAX_EPOCHS):
    """Train the squared-hinge L1-regularized model by cyclic proximal CD.

    Soft-threshold steps on penalized coordinates, exact Newton
    minimization of the unpenalized intercept.  The returned alpha is
    computed from beta as (2 / lam) * relu(1 - Xcheck @ beta) and is
    dual-feasible to well under 1e-9.
    """
    spec = ModelSpec.squared_hinge_l1(lam, dataset.n)
    w = _checked_weights(dataset, weights)
    if gap_tol is None:
        gap_tol = default_gap_tol(spec, dataset, w)
    if gap_tol <= 0.0:
        raise ModelError(f"gap_tol must be positive, got {gap_tol}")
    xck = np.ascontiguousarray(dataset.xcheck)
    beta = np.zeros(dataset.d)
    m = np.zeros(dataset.n)
    total_epochs = 0
    tol = gap_tol
    for _ in range(3):
        _, epochs, status = _kernels.sqhinge_l1_cd(
            xck, w, lam, beta, m, max_epochs - total_epochs, tol,
            _L2L1_FEAS_TOL,
        )
        total_epochs += epochs
        alpha = dual_from_primal(spec, dataset, w, beta)
        gap = models.duality_gap(spec, dataset, w, beta, alpha)
        if gap <= gap_tol:
            return PrimalDualSolution(beta.copy(), alpha, gap, w.copy(), spec)
        if status != _kernels.STATUS_OK:
            break
        tol *= 0.5
    raise ConvergenceError(
        f"squared-hinge+L1 training reached gap {gap:.3e} > {gap_tol:.3e} "
        f"after {total_epochs} epochs",
        beta, alpha, gap, total_epochs,
    )


def primal_from_dual(spec, dataset, weights, alpha):
    """beta = (1 / lam) * (w x Xcheck).T @ alpha (hinge+L2)."""
    if spec.loss != models.HINGE:
        raise ModelError("primal recovery from alpha applies to hinge+L2")
    w = _checked_weights(dataset, weights)
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape != (dataset.n,):
        raise ModelError(f"alpha shape {alpha.shape} != ({dataset.n},)")
    return dataset.xcheck.T @ (w * alpha) / spec.lam


def dual_from_primal(spec, dataset, weights, beta):
    """alpha_i = (2 / lam) * relu(1 - Xcheck_i @ beta) (squared-hinge+L1)."""
    if spec.loss != models.SQUARED_HINGE:
        raise ModelError("dual recovery from beta applies to squared-hinge+L1")
    _checked_weights(dataset, weights)
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (dataset.d,):
        raise ModelError(f"beta shape {beta.shape} != ({dataset.d},)")
    margins = dataset.xcheck @ beta
    return (2.0 / spec.lam) * np.maximum(0.0, 1.0 - margins)


def lambda_max(dataset, weights):
    """Smallest L1 strength at which every non-intercept coefficient is zero.

    Closed form: solve the intercept-only problem, recover the scaled dual
    point, and take the largest weighted column correlation.
    """
    w = _checked_weights(dataset, weights)
    if dataset.d < 2:
        raise ModelError("lambda_max needs at least one non-intercept feature")
    if not np.all(dataset.x[:, -1] == 1.0):
        raise ModelError("lambda_max requires the all-ones intercept column")
    wsum = float(np.sum(w))
    if wsum <= 0.0:
        raise ModelError("lambda_max requires positive total weight")
    pos = dataset.y > 0
    beta_d = (float(np.sum(w[pos])) - float(np.sum(w[~pos]))) / wsum
    margins = dataset.xcheck[:, -1] * beta_d
    a_scaled = 2.0 * np.maximum(0.0, 1.0 - margins)
    corr = dataset.xcheck[:, :-1].T @ (w * a_scaled)
    return float(np.max(np.abs(corr)))
