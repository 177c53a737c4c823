"""Certified screening of SVM samples/features under weight uncertainty.

Train a weighted SVM once, then certify which training samples (hinge
loss, L2 regularizer) or features (squared hinge, L1 regularizer) cannot
enter any retrained optimum while the per-sample weights move inside an
L2 ball.  Certificates come from duality-gap radii maximized exactly over
the ball via a secular-equation solver.
"""

from ._kernels import BACKEND
from .ballmax import (
    BallmaxError,
    MaxQuadResult,
    QuadBallProblem,
    SecularProblem,
    max_quadratic_over_ball,
    min_weight_over_ball,
    secular_eval,
    secular_roots,
)
from .data import (
    DataError,
    Dataset,
    LibsvmParseError,
    RawSample,
    load_dense_features,
    parse_libsvm,
    prepare_dataset,
    serialize_libsvm,
    write_dense_csv,
)
from .linalg import (
    BallExtrema,
    EigenDecomposition,
    LinalgError,
    ball_linear_extrema,
    sym_eigendecompose,
)
from .models import (
    Interval,
    ModelError,
    ModelSpec,
    dual_objective,
    duality_gap,
    loss_props,
    primal_objective,
    reg_props,
    reg_zero_set,
)
from .oracle import (
    OracleReport,
    sample_ball_weights,
    verify_feature_screening,
    verify_sample_screening,
)
from .screening import (
    ScreeningError,
    ScreeningReport,
    WeightBall,
    gap_radius_feature,
    gap_radius_sample,
    kernel_robust_screen_samples,
    robust_screen_features,
    robust_screen_samples,
    screen_at_weights,
)
from .solver import (
    ConvergenceError,
    PrimalDualSolution,
    dual_from_primal,
    lambda_max,
    primal_from_dual,
    train_hinge_l2,
    train_squared_hinge_l1,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BallExtrema",
    "BallmaxError",
    "ConvergenceError",
    "DataError",
    "Dataset",
    "EigenDecomposition",
    "Interval",
    "LibsvmParseError",
    "LinalgError",
    "MaxQuadResult",
    "ModelError",
    "ModelSpec",
    "OracleReport",
    "PrimalDualSolution",
    "QuadBallProblem",
    "RawSample",
    "ScreeningError",
    "ScreeningReport",
    "SecularProblem",
    "WeightBall",
    "ball_linear_extrema",
    "dual_from_primal",
    "dual_objective",
    "duality_gap",
    "gap_radius_feature",
    "gap_radius_sample",
    "kernel_robust_screen_samples",
    "lambda_max",
    "load_dense_features",
    "loss_props",
    "max_quadratic_over_ball",
    "min_weight_over_ball",
    "parse_libsvm",
    "prepare_dataset",
    "primal_from_dual",
    "primal_objective",
    "reg_props",
    "reg_zero_set",
    "robust_screen_features",
    "robust_screen_samples",
    "sample_ball_weights",
    "screen_at_weights",
    "secular_eval",
    "secular_roots",
    "serialize_libsvm",
    "sym_eigendecompose",
    "train_hinge_l2",
    "train_squared_hinge_l1",
    "verify_feature_screening",
    "verify_sample_screening",
    "write_dense_csv",
]
