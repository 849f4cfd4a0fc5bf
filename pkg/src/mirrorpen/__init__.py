"""Stochastic mirror descent on exact beta-norm penalty functions.

A numpy toolkit for constrained non-convex problems: the smooth beta-norm
exact penalty and its gradient calculus, the adaptive multiplicative
penalty-parameter rule, the SMD/dual-averaging iteration with Euclidean
mirror maps, and a reproducible benchmark harness.
"""

from .mirror import EuclideanRegularizer, Regularizer, conjugate, fenchel, mirror
from .penalty import (
    FeasiblePointError,
    FormulationError,
    PenaltyConfig,
    PenaltyGradient,
    delta,
    dir_derivative,
    l1_subgradient,
    penalty_gradient,
    penalty_terms,
    penalty_value,
    xi,
    zeta,
)
from .problem import (
    AllSpace,
    Ball,
    Box,
    ConstraintBlock,
    ConstraintSystem,
    DomainError,
    EvaluationError,
    FeasibleDomain,
    ViolationSnapshot,
    active_index_sets,
    as_point,
    project,
    residual_norm,
    residuals,
    violation,
    scalar_constraint,
)
from .solver import (
    Constant,
    DivergenceError,
    GradientSample,
    InverseK,
    Normalized,
    Objective,
    PenaltyUpdateResult,
    ProblemBundle,
    RunConfig,
    RunReport,
    SolverState,
    StepSchedule,
    dual_averaging_step,
    penalty_update,
    run,
    smd_step,
    step_size,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
