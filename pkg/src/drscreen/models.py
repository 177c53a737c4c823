"""Loss/regularizer families, their convex-analysis data, and the objectives.

Two pairings are supported: hinge loss with L2 regularization (sample-sparse,
lambda-strongly-convex primal) and squared hinge loss with L1 regularization
(feature-sparse, 2-smooth loss, intercept unpenalized).
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

HINGE = "hinge"
SQUARED_HINGE = "squared_hinge"
L2 = "l2"
L1 = "l1"

FEAS_TOL = 1e-9


class ModelError(ValueError):
    pass


class DualInfeasibleError(ModelError):
    """Gap requested at a dual point outside the feasible region."""


@dataclass(frozen=True)
class Interval:
    """Extended-real interval with open/closed endpoints.

    Used for subgradient ranges and for the zero-subgradient sets whose
    containment tests drive every screening rule.
    """

    lower: float
    upper: float
    lower_open: bool = False
    upper_open: bool = False

    def __post_init__(self):
        if self.lower > self.upper:
            raise ModelError(f"empty interval [{self.lower}, {self.upper}]")

    def contains_interval(self, lo, hi):
        """Whether the closed interval [lo, hi] is a subset of this set."""
        if self.lower_open:
            if not lo > self.lower:
                return False
        elif not lo >= self.lower:
            return False
        if self.upper_open:
            if not hi < self.upper:
                return False
        elif not hi <= self.upper:
            return False
        return True


@dataclass(frozen=True)
class ModelSpec:
    """Loss family, regularizer family, strength, and the dual scaling vector.

    Only hinge+L2 (gamma = 1, kappa = lam) and squared-hinge+L1
    (gamma = lam * 1, mu = 2) are meaningful pairings; anything else is
    rejected.
    """

    loss: str
    regularizer: str
    lam: float
    gamma: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.lam <= 0.0 or not math.isfinite(self.lam):
            raise ModelError(f"lambda must be positive, got {self.lam}")
        gamma = np.asarray(self.gamma, dtype=np.float64)
        if gamma.ndim != 1 or np.any(gamma <= 0.0):
            raise ModelError("gamma must be a positive vector")
        object.__setattr__(self, "gamma", gamma)
        if (self.loss, self.regularizer) == (HINGE, L2):
            if not np.all(gamma == 1.0):
                raise ModelError("hinge+L2 requires gamma = 1")
        elif (self.loss, self.regularizer) == (SQUARED_HINGE, L1):
            if not np.all(gamma == self.lam):
                raise ModelError("squared-hinge+L1 requires gamma = lambda")
        else:
            raise ModelError(
                f"unsupported pairing {self.loss!r} + {self.regularizer!r}"
            )

    @classmethod
    def hinge_l2(cls, lam, n):
        return cls(HINGE, L2, float(lam), np.ones(n))

    @classmethod
    def squared_hinge_l1(cls, lam, n):
        return cls(SQUARED_HINGE, L1, float(lam), np.full(n, float(lam)))

    @property
    def kappa(self):
        """Strong-convexity modulus of the primal (hinge+L2 only)."""
        if self.regularizer != L2:
            raise ModelError("kappa is defined for the L2-regularized model")
        return self.lam

    @property
    def mu(self):
        """Smoothness modulus of the loss (squared hinge only)."""
        if self.loss != SQUARED_HINGE:
            raise ModelError("mu is defined for the squared-hinge model")
        return 2.0


class LossProps(NamedTuple):
    value: float
    subgradient: Interval
    conjugate: float
    zero_set: Interval


def loss_props(kind, y, t):
    """Value, subgradient, conjugate value, and zero-subgradient set at t.

    The conjugate field evaluates the convex conjugate at the same
    argument t (+inf outside its domain).  Both losses have
    zero-subgradient set (1, +inf), open at 1.
    """
    if y not in (-1.0, 1.0, -1, 1):
        raise ModelError(f"label must be -1 or +1, got {y!r}")
    zero_set = Interval(1.0, math.inf, lower_open=True, upper_open=True)
    if kind == HINGE:
        value = max(0.0, 1.0 - t)
        if t < 1.0:
            sub = Interval(-1.0, -1.0)
        elif t == 1.0:
            sub = Interval(-1.0, 0.0)
        else:
            sub = Interval(0.0, 0.0)
        conj = t if -1.0 <= t <= 0.0 else math.inf
        return LossProps(value, sub, conj, zero_set)
    if kind == SQUARED_HINGE:
        u = max(0.0, 1.0 - t)
        g = -2.0 * u
        conj = (t * t + 4.0 * t) / 4.0 if t <= 0.0 else math.inf
        return LossProps(u * u, Interval(g, g), conj, zero_set)
    raise ModelError(f"unknown loss kind {kind!r}")


def loss_values(spec, margins):
    margins = np.asarray(margins)
    u = np.maximum(0.0, 1.0 - margins)
    return u if spec.loss == HINGE else u * u


class RegProps(NamedTuple):
    value: float
    conjugate_grad: object
    zero_sets: object


def reg_value(spec, beta):
    beta = np.asarray(beta)
    if spec.regularizer == L2:
        return 0.5 * spec.lam * float(beta @ beta)
    return spec.lam * float(np.sum(np.abs(beta[:-1])))


def reg_zero_set(spec, j, d):
    """Zero set of the j-th conjugate-subgradient coordinate (0-based j)."""
    if spec.regularizer != L1:
        raise ModelError("per-coordinate zero sets exist for the L1 model only")
    if j == d - 1:
        return Interval(0.0, 0.0)
    return Interval(-spec.lam, spec.lam, lower_open=True, upper_open=True)


def reg_props(spec, beta):
    """Regularizer value plus conjugate data.

    For L2 the conjugate gradient map is v -> v / lam; for L1 the
    per-coordinate zero sets of the conjugate subgradient are returned,
    with the intercept pinned to the single point {0}.
    """
    beta = np.asarray(beta, dtype=np.float64)
    value = reg_value(spec, beta)
    if spec.regularizer == L2:
        return RegProps(value, lambda v: np.asarray(v) / spec.lam, None)
    d = beta.shape[0]
    return RegProps(value, None, [reg_zero_set(spec, j, d) for j in range(d)])


def _check_weights(dataset, w):
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (dataset.n,):
        raise ModelError(f"weights shape {w.shape} != ({dataset.n},)")
    if np.any(w < 0.0):
        raise ModelError("weights must be nonnegative")
    return w


def primal_objective(spec, dataset, w, beta):
    w = _check_weights(dataset, w)
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (dataset.d,):
        raise ModelError(f"beta shape {beta.shape} != ({dataset.d},)")
    margins = dataset.xcheck @ beta
    return float(w @ loss_values(spec, margins)) + reg_value(spec, beta)


def dual_objective(spec, dataset, w, alpha):
    """Dual value, or -inf when alpha violates the constraints.

    hinge+L2: sum(w*alpha) - (1/2 lam)|(w x X).T alpha|^2 on the box
    [0, 1]^n.  squared-hinge+L1: -lam * sum(w_i (lam a_i^2 - 4 a_i) / 4)
    subject to alpha >= 0, |(w * Xcol_j).T alpha| <= 1 for non-intercept
    columns, and (w * y).T alpha = 0.  Constraints are checked to 1e-9
    absolute.
    """
    w = _check_weights(dataset, w)
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape != (dataset.n,):
        raise ModelError(f"alpha shape {alpha.shape} != ({dataset.n},)")
    if spec.loss == HINGE:
        if np.any(alpha < -FEAS_TOL) or np.any(alpha > 1.0 + FEAS_TOL):
            return -math.inf
        v = dataset.xcheck.T @ (w * alpha)
        return float(w @ alpha) - 0.5 * float(v @ v) / spec.lam
    if np.any(alpha < -FEAS_TOL):
        return -math.inf
    corr = dataset.xcheck.T @ (w * alpha)
    if np.any(np.abs(corr[:-1]) > 1.0 + FEAS_TOL):
        return -math.inf
    if abs(corr[-1]) > FEAS_TOL:
        return -math.inf
    la = spec.lam * alpha
    return float(w @ (la - 0.25 * la * la))


def duality_gap(spec, dataset, w, beta, alpha):
    """P_w(beta) - D_w(alpha), clipped to zero from below.

    Raises DualInfeasibleError when alpha is infeasible (gap undefined)
    and ModelError if weak duality is violated beyond roundoff.
    """
    d = dual_objective(spec, dataset, w, alpha)
    if d == -math.inf:
        raise DualInfeasibleError("dual point is infeasible; gap undefined")
    gap = primal_objective(spec, dataset, w, beta) - d
    if gap < -FEAS_TOL:
        raise ModelError(f"weak duality violated: gap {gap:.3e}")
    return max(gap, 0.0)
