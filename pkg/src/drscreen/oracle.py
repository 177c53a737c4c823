"""Empirical verification of screening certificates by retraining.

Weights are sampled from the ball (half on the boundary sphere, half in
the interior with radius proportional to U^(1/n)), the model is retrained
from scratch at each, and any screened index that comes back active is a
violation.  This is the ground-truth check for every robust rule.
"""

from dataclasses import dataclass

import numpy as np

from . import solver

ACTIVE_TOL = 1e-7


@dataclass(frozen=True)
class OracleReport:
    checked: int
    violations: int
    max_screened_magnitude: float


def sample_ball_weights(ball, count, rng):
    """Draw ``count`` weight vectors from the ball, boundary-first."""
    n = ball.center.shape[0]
    out = np.empty((count, n))
    n_boundary = (count + 1) // 2
    for k in range(count):
        direction = rng.standard_normal(n)
        nrm = float(np.linalg.norm(direction))
        while nrm == 0.0:
            direction = rng.standard_normal(n)
            nrm = float(np.linalg.norm(direction))
        if k < n_boundary:
            r = ball.radius
        else:
            r = ball.radius * float(rng.uniform()) ** (1.0 / n)
        out[k] = ball.center + (r / nrm) * direction
    # clamp roundoff excursions below zero (radius <= min center)
    np.maximum(out, 0.0, out=out)
    return out


def verify_sample_screening(dataset, lam, ball, screened, count=200,
                            retrain_gap_tol=1e-11, seed=0):
    """Retrain hinge+L2 at sampled weights; screened alphas must stay zero."""
    rng = np.random.default_rng(seed)
    weights = sample_ball_weights(ball, count, rng)
    idx = np.flatnonzero(screened)
    violations = 0
    worst = 0.0
    for w in weights:
        sol = solver.train_hinge_l2(dataset, w, lam, gap_tol=retrain_gap_tol,
                                    seed=int(rng.integers(2**62)))
        if idx.size:
            mags = np.abs(sol.alpha[idx])
            worst = max(worst, float(np.max(mags)))
            violations += int(np.sum(mags > ACTIVE_TOL))
    return OracleReport(count, violations, worst)


def verify_feature_screening(dataset, lam, ball, screened, count=200,
                             retrain_gap_tol=1e-11, seed=0):
    """Retrain squared-hinge+L1 at sampled weights; screened betas must stay zero."""
    rng = np.random.default_rng(seed)
    weights = sample_ball_weights(ball, count, rng)
    idx = np.flatnonzero(screened)
    violations = 0
    worst = 0.0
    for w in weights:
        sol = solver.train_squared_hinge_l1(dataset, w, lam,
                                            gap_tol=retrain_gap_tol)
        if idx.size:
            mags = np.abs(sol.beta[idx])
            worst = max(worst, float(np.max(mags)))
            violations += int(np.sum(mags > ACTIVE_TOL))
    return OracleReport(count, violations, worst)
