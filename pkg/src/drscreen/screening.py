"""Gap screening rules: at fixed new weights, and robust over a weight ball.

A reference solution trained at weights w_tilde certifies, through its
duality gap evaluated at other weights, that certain samples (hinge+L2) or
features (squared-hinge+L1) cannot enter any retrained optimum.  The
robust variants maximize the certificate radius over every weight vector
in an L2 ball, which reduces to linear and convex-quadratic maximizations
over the ball.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import models
from .ballmax import (
    BallmaxError,
    QuadBallProblem,
    max_quadratic_over_ball,
    min_weight_over_ball,
)
from .linalg import LinalgError, ball_linear_extrema

SAMPLE = "sample"
FEATURE = "feature"

_NEG_GAP_TOL = 1e-9


class ScreeningError(ValueError):
    pass


@dataclass(frozen=True)
class WeightBall:
    """Ball of admissible weight vectors, kept inside the nonneg orthant."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.asarray(self.center, dtype=np.float64)
        if center.ndim != 1 or not np.all(np.isfinite(center)):
            raise ScreeningError("ball center must be a finite vector")
        if np.any(center < 0.0):
            raise ScreeningError("ball center must be nonnegative")
        if not (0.0 <= self.radius and math.isfinite(self.radius)):
            raise ScreeningError(f"invalid ball radius {self.radius}")
        if self.radius > float(np.min(center)):
            raise ScreeningError(
                f"radius {self.radius} exceeds min weight "
                f"{np.min(center)}: ball leaves the nonnegative orthant"
            )
        object.__setattr__(self, "center", center)


@dataclass(frozen=True)
class ScreeningReport:
    mode: str
    screened: np.ndarray
    radius_bound: float
    bounds: np.ndarray = field(repr=False)
    reference_gap: float

    @property
    def rate(self):
        return float(np.mean(self.screened)) if self.screened.size else 0.0


def gap_radius_sample(kappa, gap):
    """Primal certificate radius sqrt((2 / kappa) * gap)."""
    if kappa <= 0.0:
        raise ScreeningError(f"kappa must be positive, got {kappa}")
    if gap < -_NEG_GAP_TOL:
        raise ScreeningError(f"negative gap {gap}")
    return math.sqrt(2.0 * max(gap, 0.0) / kappa)


def gap_radius_feature(mu, min_weight_gamma_sq, gap):
    """Dual certificate radius sqrt((2 mu / min_i w_i gamma_i^2) * gap)."""
    if mu <= 0.0 or min_weight_gamma_sq <= 0.0:
        raise ScreeningError("mu and min weighted gamma^2 must be positive")
    if gap < -_NEG_GAP_TOL:
        raise ScreeningError(f"negative gap {gap}")
    return math.sqrt(2.0 * mu * max(gap, 0.0) / min_weight_gamma_sq)


def _gap_formula_l2l1(spec, dataset, w, beta, alpha):
    """P_w(beta) minus the closed-form dual expression at alpha.

    The weight-dependent support constraints of the exact dual are not
    enforced here; this is the expression every feature rule bounds.
    """
    la = spec.lam * alpha
    dval = float(w @ (la - 0.25 * la * la))
    return models.primal_objective(spec, dataset, w, beta) - dval


def _sample_rule(dataset, margins, radius):
    norms = np.sqrt(np.einsum("ij,ij->i", dataset.xcheck, dataset.xcheck))
    half = norms * radius
    bounds = np.column_stack([margins - half, margins + half])
    screened = bounds[:, 0] > 1.0
    return screened, bounds


def screen_at_weights(solution, dataset, w_new, mode):
    """Screening rule at one specific new weight vector (reference at w_tilde).

    Sample mode checks margin intervals against (1, inf); feature mode
    checks weighted column-correlation intervals against (-lam, lam), with
    the intercept never a candidate.
    """
    w_new = np.asarray(w_new, dtype=np.float64)
    if np.any(w_new < 0.0):
        raise ScreeningError("new weights must be nonnegative")
    spec = solution.spec
    if mode == SAMPLE:
        if spec.loss != models.HINGE:
            raise ScreeningError("sample screening applies to the hinge+L2 model")
        gap = models.duality_gap(spec, dataset, w_new, solution.beta,
                                 solution.alpha)
        radius = gap_radius_sample(spec.kappa, gap)
        margins = dataset.xcheck @ solution.beta
        screened, bounds = _sample_rule(dataset, margins, radius)
        return ScreeningReport(SAMPLE, screened, radius, bounds, gap)
    if mode != FEATURE:
        raise ScreeningError(f"unknown screening mode {mode!r}")
    if spec.loss != models.SQUARED_HINGE:
        raise ScreeningError("feature screening applies to the squared-hinge+L1 model")
    if np.any(solution.alpha < -models.FEAS_TOL):
        raise ScreeningError("reference alpha violates the sign constraint")
    gap = _gap_formula_l2l1(spec, dataset, w_new, solution.beta, solution.alpha)
    minw = float(np.min(w_new * spec.gamma**2))
    if gap < -_NEG_GAP_TOL or minw <= 0.0:
        # away from the training weights the closed-form dual expression can
        # exceed the primal (the reference alpha is not dual-feasible there);
        # the certificate is then vacuous and screens nothing
        radius = math.inf
        gap = max(gap, 0.0)
    else:
        gap = max(gap, 0.0)
        radius = gap_radius_feature(spec.mu, minw, gap)
    d = dataset.d
    wcols = spec.gamma[:, None] * w_new[:, None] * dataset.xcheck[:, : d - 1]
    centers = wcols.T @ solution.alpha
    norms = np.sqrt(np.einsum("ij,ij->j", wcols, wcols))
    if math.isfinite(radius):
        half = norms * radius
    else:
        half = np.full(d - 1, math.inf)
    bounds = np.column_stack([centers - half, centers + half])
    lam = spec.lam
    screened = (bounds[:, 0] > -lam) & (bounds[:, 1] < lam)
    return ScreeningReport(FEATURE, screened, radius, bounds, gap)


def _check_reference(solution, ball):
    if not np.array_equal(np.asarray(solution.weights), ball.center):
        raise ScreeningError(
            "ball center must equal the weights the reference was trained at"
        )


def robust_screen_samples(solution, dataset, ball):
    """Samples certified out of every retrained model with weights in the ball.

    The gap as a function of w is linear plus PSD-quadratic; its exact
    maximum over the ball gives the worst-case radius R, and a sample is
    screened when its margin clears |x_i| * R past 1.
    """
    spec = solution.spec
    if spec.loss != models.HINGE:
        raise ScreeningError("robust sample screening needs the hinge+L2 model")
    _check_reference(solution, ball)
    if ball.radius == 0.0:
        return screen_at_weights(solution, dataset, ball.center, SAMPLE)
    margins = dataset.xcheck @ solution.beta
    losses = np.maximum(0.0, 1.0 - margins)
    lin = losses - solution.alpha
    const = 0.5 * spec.lam * float(solution.beta @ solution.beta)
    if np.all(solution.alpha == 0.0):
        maxgap = ball_linear_extrema(lin, ball.center, ball.radius).max_value
    else:
        factor = (solution.alpha[:, None] * dataset.xcheck) / math.sqrt(
            2.0 * spec.lam
        )
        res = max_quadratic_over_ball(
            QuadBallProblem(b=0.5 * lin, center=ball.center,
                            radius=ball.radius, factor=factor)
        )
        maxgap = res.value
    maxgap += const
    if maxgap < -_NEG_GAP_TOL:
        raise ScreeningError(f"negative maximized gap {maxgap}")
    radius = gap_radius_sample(spec.kappa, max(maxgap, 0.0))
    screened, bounds = _sample_rule(dataset, margins, radius)
    return ScreeningReport(SAMPLE, screened, radius, bounds, max(maxgap, 0.0))


def robust_screen_features(solution, dataset, ball):
    """Features certified zero in every retrained model with weights in the ball.

    The gap expression is linear in w, so its maximum and the extrema of
    the per-feature correlations come from the linear-over-ball lemma; the
    worst-case column norm N is a diagonal convex quadratic maximized
    exactly.  Both strict inequalities against (-lam, lam) must hold.
    """
    spec = solution.spec
    if spec.loss != models.SQUARED_HINGE:
        raise ScreeningError("robust feature screening needs the squared-hinge+L1 model")
    _check_reference(solution, ball)
    if ball.radius >= float(np.min(ball.center)):
        raise ScreeningError(
            "feature screening needs radius strictly below the smallest weight"
        )
    if ball.radius == 0.0:
        return screen_at_weights(solution, dataset, ball.center, FEATURE)
    if np.any(solution.alpha < -models.FEAS_TOL):
        raise ScreeningError("reference alpha violates the sign constraint")
    lam = spec.lam
    margins = dataset.xcheck @ solution.beta
    losses = np.maximum(0.0, 1.0 - margins) ** 2
    la = lam * solution.alpha
    lin = losses - (la - 0.25 * la * la)
    maxgap = (
        ball_linear_extrema(lin, ball.center, ball.radius).max_value
        + models.reg_value(spec, solution.beta)
    )
    if maxgap < -_NEG_GAP_TOL:
        raise ScreeningError(f"negative maximized gap {maxgap}")
    minw = min_weight_over_ball(ball.center, spec.gamma, ball.radius)
    rbar = gap_radius_feature(spec.mu, minw, max(maxgap, 0.0))
    d = dataset.d
    lo = np.empty(d - 1)
    hi = np.empty(d - 1)
    for j in range(d - 1):
        col = dataset.xcheck[:, j]
        ext = ball_linear_extrema(col * solution.alpha, ball.center, ball.radius)
        lmin, lmax = lam * ext.min_value, lam * ext.max_value
        qdiag = col * col
        if not np.any(qdiag):
            norm_max = 0.0
        else:
            res = max_quadratic_over_ball(
                QuadBallProblem(b=np.zeros(dataset.n), center=ball.center,
                                radius=ball.radius, diagonal=qdiag)
            )
            norm_max = lam * math.sqrt(max(res.value, 0.0))
        lo[j] = lmin - norm_max * rbar
        hi[j] = lmax + norm_max * rbar
    screened = (lo > -lam) & (hi < lam)
    bounds = np.column_stack([lo, hi])
    return ScreeningReport(FEATURE, screened, rbar, bounds, max(maxgap, 0.0))


def kernel_robust_screen_samples(gram, y, alpha, weights, lam, ball):
    """Robust sample screening from kernel values only.

    ``gram`` holds the sign-folded kernel matrix with entries
    y_i y_j K(x_i, x_j); margins, row norms, and the quadratic gap matrix
    (1 / 2 lam) diag(alpha) gram diag(alpha) are all read off it, with the
    eigendecomposition taken densely.
    """
    gram = np.asarray(gram, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    n = gram.shape[0]
    if gram.shape != (n, n):
        raise ScreeningError(f"gram must be square, got {gram.shape}")
    scale = float(np.max(np.abs(gram))) if n else 0.0
    if np.max(np.abs(gram - gram.T)) > 1e-8 * (1.0 + scale):
        raise ScreeningError("gram matrix is not symmetric")
    if np.any(np.diag(gram) < -1e-10):
        raise ScreeningError("gram matrix has a negative diagonal; not PSD")
    if y.shape != (n,) or not np.all(np.isin(y, (-1.0, 1.0))):
        raise ScreeningError("labels must be a length-n vector of -1/+1")
    if alpha.shape != (n,) or weights.shape != (n,):
        raise ScreeningError("alpha and weights must be length-n vectors")
    if np.any(alpha < -models.FEAS_TOL) or np.any(alpha > 1.0 + models.FEAS_TOL):
        raise ScreeningError("alpha violates the dual box constraints")
    if not isinstance(ball, WeightBall):
        ball = WeightBall(np.asarray(ball[0]), float(ball[1]))
    if not np.array_equal(np.asarray(weights), ball.center):
        raise ScreeningError(
            "ball center must equal the weights the reference was trained at"
        )
    if lam <= 0.0:
        raise ScreeningError(f"lambda must be positive, got {lam}")

    wa = weights * alpha
    margins = gram @ wa / lam
    norms = np.sqrt(np.maximum(np.diag(gram), 0.0))
    losses = np.maximum(0.0, 1.0 - margins)
    lin = losses - alpha
    beta_sq = float(wa @ gram @ wa) / (lam * lam)
    const = 0.5 * lam * beta_sq

    if ball.radius == 0.0:
        a_mat = (alpha[:, None] * alpha[None, :]) * gram / (2.0 * lam)
        maxgap = (
            float(lin @ ball.center)
            + float(ball.center @ a_mat @ ball.center)
            + const
        )
    elif np.all(alpha == 0.0):
        maxgap = (
            ball_linear_extrema(lin, ball.center, ball.radius).max_value + const
        )
    else:
        a_mat = (alpha[:, None] * alpha[None, :]) * gram / (2.0 * lam)
        try:
            res = max_quadratic_over_ball(
                QuadBallProblem(b=0.5 * lin, center=ball.center,
                                radius=ball.radius, a=a_mat)
            )
        except (BallmaxError, LinalgError) as exc:
            raise ScreeningError(f"gram matrix rejected: {exc}") from exc
        maxgap = res.value + const
    if maxgap < -_NEG_GAP_TOL:
        raise ScreeningError(f"negative maximized gap {maxgap}")
    maxgap = max(maxgap, 0.0)
    radius = gap_radius_sample(lam, maxgap)
    half = norms * radius
    bounds = np.column_stack([margins - half, margins + half])
    screened = bounds[:, 0] > 1.0
    return ScreeningReport(SAMPLE, screened, radius, bounds, maxgap)
