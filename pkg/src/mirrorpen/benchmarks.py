"""Benchmark problems: 2-D trajectory studies, stochastic Rosenbrock with a
sphere penalty, the 1-D adaptive-penalty demo, the smooth-vs-l1 comparison,
and the discrete-recovery regression task.

The trajectory boxes, start points, schedules, and noise level are fixed
versioned defaults (the source figures carry no coordinates); override any
of them through the experiment configs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .penalty import PenaltyConfig
from .problem import (
    AllSpace,
    Array,
    Ball,
    Box,
    ConstraintBlock,
    ConstraintSystem,
    violation,
)
from .solver import (
    GradientSample,
    InverseK,
    Normalized,
    Objective,
    ProblemBundle,
    RunConfig,
    StepSchedule,
)


# ---------------------------------------------------------------------------
# 2-D test functions (minima: b -> (0,-1), f=3; c -> (-10,1), f=0;
# d -> (3, 0.5), f=0; a vanishes on both axes)

def quadratic_product(x: Array) -> float:
    return float(x[0] ** 2 * x[1] ** 2)


def quadratic_product_grad(x: Array) -> Array:
    return np.array([2.0 * x[0] * x[1] ** 2, 2.0 * x[0] ** 2 * x[1]])


def goldstein_price(x: Array) -> float:
    x1, x2 = float(x[0]), float(x[1])
    q = 19 - 14 * x1 + 3 * x1 ** 2 - 14 * x2 + 6 * x1 * x2 + 3 * x2 ** 2
    r = 18 - 32 * x1 + 12 * x1 ** 2 + 48 * x2 - 36 * x1 * x2 + 27 * x2 ** 2
    return float((1 + (x1 + x2 + 1) ** 2 * q) * (30 + (2 * x1 - 3 * x2) ** 2 * r))


def goldstein_price_grad(x: Array) -> Array:
    x1, x2 = float(x[0]), float(x[1])
    s = x1 + x2 + 1
    t = 2 * x1 - 3 * x2
    q = 19 - 14 * x1 + 3 * x1 ** 2 - 14 * x2 + 6 * x1 * x2 + 3 * x2 ** 2
    r = 18 - 32 * x1 + 12 * x1 ** 2 + 48 * x2 - 36 * x1 * x2 + 27 * x2 ** 2
    dq = -14 + 6 * x1 + 6 * x2  # dq/dx1 == dq/dx2
    dr1 = -32 + 24 * x1 - 36 * x2
    dr2 = 48 - 36 * x1 + 54 * x2
    a = 1 + s ** 2 * q
    b = 30 + t ** 2 * r
    da = 2 * s * q + s ** 2 * dq
    db1 = 4 * t * r + t ** 2 * dr1
    db2 = -6 * t * r + t ** 2 * dr2
    return np.array([da * b + a * db1, da * b + a * db2])


def bukin(x: Array) -> float:
    return float(100.0 * np.sqrt(abs(x[1] - 0.01 * x[0] ** 2))
                 + 0.01 * abs(x[0] + 10.0))


def bukin_grad(x: Array) -> Array:
    # Clarke selection 0 for the square-root term on its kink curve.
    x1, x2 = float(x[0]), float(x[1])
    u = x2 - 0.01 * x1 ** 2
    g = np.zeros(2)
    if u != 0.0:
        c = 100.0 * np.sign(u) / (2.0 * np.sqrt(abs(u)))
        g[0] += c * (-0.02 * x1)
        g[1] += c
    g[0] += 0.01 * np.sign(x1 + 10.0)
    return g


def beale(x: Array) -> float:
    x1, x2 = float(x[0]), float(x[1])
    return float((1.5 - x1 + x1 * x2) ** 2
                 + (2.25 - x1 + x1 * x2 ** 2) ** 2
                 + (2.625 - x1 + x1 * x2 ** 3) ** 2)


def beale_grad(x: Array) -> Array:
    x1, x2 = float(x[0]), float(x[1])
    r1 = 1.5 - x1 + x1 * x2
    r2 = 2.25 - x1 + x1 * x2 ** 2
    r3 = 2.625 - x1 + x1 * x2 ** 3
    d1 = 2 * r1 * (x2 - 1) + 2 * r2 * (x2 ** 2 - 1) + 2 * r3 * (x2 ** 3 - 1)
    d2 = 2 * r1 * x1 + 4 * r2 * x1 * x2 + 6 * r3 * x1 * x2 ** 2
    return np.array([d1, d2])


TEST_FUNCTIONS = {
    "a": (quadratic_product, quadratic_product_grad),
    "b": (goldstein_price, goldstein_price_grad),
    "c": (bukin, bukin_grad),
    "d": (beale, beale_grad),
}

REFERENCE_MINIMA = {
    "a": (np.array([0.0, 0.0]), 0.0),
    "b": (np.array([0.0, -1.0]), 3.0),
    "c": (np.array([-10.0, 1.0]), 0.0),
    "d": (np.array([3.0, 0.5]), 0.0),
}


def eval_test_function(name: str, x: Array) -> float:
    """Value of trajectory-study objective ``name`` in {a, b, c, d}."""
    return TEST_FUNCTIONS[name][0](np.asarray(x, dtype=float))


def eval_test_gradient(name: str, x: Array) -> Array:
    return TEST_FUNCTIONS[name][1](np.asarray(x, dtype=float))


def trajectory_constraints(name: str) -> ConstraintSystem:
    """Constraint system of trajectory case ``name``.

    a: equality x1 = x2; b: equality x2 = -0.5; c: three inequalities
    bounding the target wedge; d: equality x1^2 + x2^2 = 4.
    """
    if name == "a":
        return ConstraintSystem(
            equalities=[(lambda x: x[0] - x[1], lambda x: np.array([1.0, -1.0]))])
    if name == "b":
        return ConstraintSystem(
            equalities=[(lambda x: x[1] + 0.5, lambda x: np.array([0.0, 1.0]))])
    if name == "c":
        return ConstraintSystem(inequalities=[
            (lambda x: -x[1] + 0.3, lambda x: np.array([0.0, -1.0])),
            (lambda x: -(x[0] + x[1] + 1.0), lambda x: np.array([-1.0, -1.0])),
            (lambda x: x[0] - x[1] - 1.0, lambda x: np.array([1.0, -1.0])),
        ])
    if name == "d":
        return ConstraintSystem(
            equalities=[(lambda x: x[0] ** 2 + x[1] ** 2 - 4.0,
                         lambda x: np.array([2.0 * x[0], 2.0 * x[1]]))])
    raise KeyError(f"unknown trajectory case {name!r}")


def eval_penalty_function(name: str, x: Array) -> float:
    """Displayed composite penalty of case ``name``: sum of |h_i| and (g_j)_+."""
    return violation(trajectory_constraints(name), np.asarray(x, dtype=float), 1.0)


def noisy_oracle(grad_fn, sigma: float):
    """Additive-Gaussian gradient oracle: grad(x) + sigma * N(0, I)."""
    def sample(x: Array, rng: np.random.Generator) -> GradientSample:
        return GradientSample(grad_fn(x) + sigma * rng.standard_normal(x.size))
    return sample


@dataclass(frozen=True)
class BenchmarkCase:
    """A ready-to-run problem: bundle plus its tuned default run configuration."""
    name: str
    bundle: ProblemBundle
    config: RunConfig
    reference_x: Array | None = None
    reference_f: float | None = None


# Versioned trajectory defaults; tuned so the shipped seeds converge into
# the feasible set despite the sigma = 0.5 gradient noise. Cases a/d start
# with a deliberately small p so the runs exercise the adaptive updates;
# b/c have kink- or ravine-dominated objectives whose subgradient norm
# stays large (the stall test cannot see those landscapes), so they ship
# with a penalty parameter that is already sufficient -- still small
# against objective scales of 1e3..1e5.
TRAJECTORY_DEFAULTS: dict[str, dict] = {
    "a": dict(box=(-2.0, 2.0), start=(-1.5, 1.2), schedule=("inverse_k", 0.25),
              p_init=0.05, kappa=2.0, iterations=4000, sigma=0.5, seed=7),
    "b": dict(box=(-2.0, 2.0), start=(1.5, 1.5), schedule=("normalized", 1.0),
              p_init=200.0, kappa=2.0, iterations=6000, sigma=0.5, seed=11),
    "c": dict(box=(-3.0, 3.0), start=(2.0, -2.0), schedule=("normalized", 1.0),
              p_init=300.0, kappa=2.0, iterations=6000, sigma=0.5, seed=13),
    "d": dict(box=(-3.0, 3.0), start=(-1.0, -2.0), schedule=("normalized", 0.5),
              p_init=0.1, kappa=2.0, iterations=6000, sigma=0.5, seed=17),
}


def _make_schedule(spec) -> StepSchedule:
    kind, coeff = spec
    if kind == "inverse_k":
        return InverseK(coeff)
    if kind == "normalized":
        return Normalized(coeff)
    raise KeyError(f"unknown schedule kind {kind!r}")


def trajectory_case(name: str, **overrides) -> BenchmarkCase:
    """Trajectory study ``name`` with shipped defaults (override any key)."""
    d = dict(TRAJECTORY_DEFAULTS[name])
    d.update(overrides)
    lo, hi = d["box"]
    fn, grad = TEST_FUNCTIONS[name]
    sigma = d["sigma"]
    objective = Objective(
        value=fn,
        gradient=grad,
        sample_gradient=noisy_oracle(grad, sigma) if sigma > 0 else None,
    )
    bundle = ProblemBundle(
        objective=objective,
        constraints=trajectory_constraints(name),
        domain=Box([lo, lo], [hi, hi]),
        start=np.asarray(d["start"], dtype=float),
        name=f"trajectory-{name}",
    )
    config = RunConfig(
        iterations=int(d["iterations"]),
        schedule=_make_schedule(d["schedule"]),
        penalty=PenaltyConfig(beta=2.0, p_init=d["p_init"], kappa=d["kappa"]),
        seed=int(d["seed"]),
        record_every=int(d.get("record_every", 1)),
    )
    ref_x, ref_f = REFERENCE_MINIMA[name]
    return BenchmarkCase(f"trajectory-{name}", bundle, config, ref_x, ref_f)


# ---------------------------------------------------------------------------
# Rosenbrock with sphere penalty |x'x - n| and ball domain of radius 2*sqrt(n)

def rosenbrock(x: Array) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


def rosenbrock_grad(x: Array) -> Array:
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    d = x[1:] - x[:-1] ** 2
    g[:-1] += -400.0 * x[:-1] * d - 2.0 * (1.0 - x[:-1])
    g[1:] += 200.0 * d
    return g


def rosenbrock_term_gradient(x: Array, i: int) -> Array:
    """Gradient of summand ``i`` (0-based, couples coordinates i and i+1)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if not 0 <= i < n - 1:
        raise IndexError(f"term index {i} outside 0..{n - 2}")
    g = np.zeros(n)
    d = x[i + 1] - x[i] ** 2
    g[i] = -400.0 * x[i] * d - 2.0 * (1.0 - x[i])
    g[i + 1] = 200.0 * d
    return g


def rosenbrock_oracle(x: Array, rng: np.random.Generator) -> GradientSample:
    """Single-term oracle: uniform term index, scaled by n-1 for unbiasedness."""
    n = x.size
    i = int(rng.integers(0, n - 1))
    return GradientSample((n - 1) * rosenbrock_term_gradient(x, i), meta=i)


def sphere_constraint(n: int) -> ConstraintSystem:
    return ConstraintSystem(
        equalities=[(lambda x: float(x @ x) - float(n),
                     lambda x: 2.0 * np.asarray(x, dtype=float))])


# Normalized steps: the harmonic travel budget of gamma0/k steps cannot cross
# the valley in the iteration budget, and raw steps blow up on the 1e4-scale
# valley walls through the accumulated dual state.
ROSENBROCK_DEFAULTS = dict(alpha0=0.5, p_init=1.0, kappa=2.0,
                           iterations=200_000, seed=23, record_every=100)


def rosenbrock_case(n: int = 4, **overrides) -> BenchmarkCase:
    """Stochastic Rosenbrock in R^n, projected onto the ball of radius 2*sqrt(n)."""
    d = dict(ROSENBROCK_DEFAULTS)
    d.update(overrides)
    objective = Objective(value=rosenbrock, gradient=None,
                          sample_gradient=rosenbrock_oracle)
    bundle = ProblemBundle(
        objective=objective,
        constraints=sphere_constraint(n),
        domain=Ball(np.zeros(n), 2.0 * np.sqrt(n)),
        start=0.5 * np.ones(n),
        name=f"rosenbrock-{n}",
    )
    config = RunConfig(
        iterations=int(d["iterations"]),
        schedule=Normalized(d["alpha0"]),
        penalty=PenaltyConfig(beta=2.0, p_init=d["p_init"], kappa=d["kappa"]),
        seed=int(d["seed"]),
        variant="dual_averaging",
        record_every=int(d["record_every"]),
    )
    return BenchmarkCase(f"rosenbrock-{n}", bundle, config,
                         reference_x=np.ones(n), reference_f=0.0)


# ---------------------------------------------------------------------------
# 1-D adaptive-penalty demo: f(x) = x^2 subject to 1 - x <= 0

PENALTY_DEMO_DEFAULTS = dict(gamma0=0.3, p_init=0.1, kappa=2.0,
                             iterations=5000, seed=0, record_every=1)


def penalty_demo_case(**overrides) -> BenchmarkCase:
    """Quadratic objective with its unconstrained minimum outside x >= 1."""
    d = dict(PENALTY_DEMO_DEFAULTS)
    d.update(overrides)
    objective = Objective(value=lambda x: float(x[0] ** 2),
                          gradient=lambda x: np.array([2.0 * x[0]]))
    cs = ConstraintSystem(
        inequalities=[(lambda x: 1.0 - x[0], lambda x: np.array([-1.0]))])
    bundle = ProblemBundle(objective, cs, AllSpace(), np.array([0.2]),
                           name="penalty-demo-1d")
    config = RunConfig(
        iterations=int(d["iterations"]),
        schedule=InverseK(d["gamma0"]),
        penalty=PenaltyConfig(beta=2.0, p_init=d["p_init"], kappa=d["kappa"]),
        seed=int(d["seed"]),
        record_every=int(d["record_every"]),
    )
    return BenchmarkCase("penalty-demo-1d", bundle, config,
                         reference_x=np.array([1.0]), reference_f=1.0)


# ---------------------------------------------------------------------------
# Smooth-vs-l1 comparison: f(x) = x1 + x2 subject to x1 <= 0, x2 - x1 <= 0.
# Matched budget/seed/start; (p_init, gamma0) are tuned per arm because the
# two penalty geometries shed violation at the same per-step rate here.

BETA_VS_L1_DEFAULTS = dict(start=(0.2, 0.2), iterations=2000, seed=0,
                           kappa=2.0, record_every=1,
                           beta_p_init=1e-3, beta_gamma0=0.05,
                           l1_p_init=0.1, l1_gamma0=0.01)


def linear_wedge_constraints() -> ConstraintSystem:
    return ConstraintSystem(inequalities=[
        (lambda x: x[0], lambda x: np.array([1.0, 0.0])),
        (lambda x: x[1] - x[0], lambda x: np.array([-1.0, 1.0])),
    ])


def beta_vs_l1_cases(**overrides) -> tuple[BenchmarkCase, BenchmarkCase]:
    """The two comparison arms: smooth beta=2 penalty and l1 selection."""
    d = dict(BETA_VS_L1_DEFAULTS)
    d.update(overrides)
    objective = Objective(value=lambda x: float(x[0] + x[1]),
                          gradient=lambda x: np.array([1.0, 1.0]))
    start = np.asarray(d["start"], dtype=float)

    def make(kind: str, p_init: float, gamma0: float) -> BenchmarkCase:
        bundle = ProblemBundle(objective, linear_wedge_constraints(), AllSpace(),
                               start, name=f"beta-vs-l1-{kind}")
        config = RunConfig(
            iterations=int(d["iterations"]),
            schedule=InverseK(gamma0),
            penalty=PenaltyConfig(beta=2.0, p_init=p_init, kappa=d["kappa"]),
            seed=int(d["seed"]),
            penalty_kind=kind,
            record_every=int(d["record_every"]),
        )
        return BenchmarkCase(f"beta-vs-l1-{kind}", bundle, config)

    return (make("beta", d["beta_p_init"], d["beta_gamma0"]),
            make("l1", d["l1_p_init"], d["l1_gamma0"]))


# ---------------------------------------------------------------------------
# Binary regression with discrete recovery

@dataclass(frozen=True)
class RegressionDataset:
    """Gaussian-feature regression data with a discrete ground-truth weight vector."""
    X_train: Array
    y_train: Array
    X_test: Array
    y_test: Array
    w_star: Array
    seed: int
    n_samples: int
    p_features: int
    noise_std: float = 0.1


def make_regression(seed: int, n_samples: int, p_features: int,
                    noise_std: float = 0.1) -> RegressionDataset:
    """y = X w* + eps with w*_i in {-1, +1} (P(+1) = 0.3), eps ~ N(0, noise_std^2).

    Standard-normal features; deterministic 80/20 split by row order.
    """
    if n_samples < 5 or p_features < 1:
        raise ValueError("need n_samples >= 5 and p_features >= 1")
    rng = np.random.default_rng(seed)
    w_star = np.where(rng.random(p_features) < 0.3, 1.0, -1.0)
    X = rng.standard_normal((n_samples, p_features))
    y = X @ w_star + noise_std * rng.standard_normal(n_samples)
    n_train = (4 * n_samples) // 5
    return RegressionDataset(
        X_train=X[:n_train], y_train=y[:n_train],
        X_test=X[n_train:], y_test=y[n_train:],
        w_star=w_star, seed=seed, n_samples=n_samples,
        p_features=p_features, noise_std=noise_std,
    )


def regression_objective(dataset: RegressionDataset) -> tuple[Objective, ConstraintSystem]:
    """Full-batch least squares ||Xw - y||^2 with equalities w_i^2 = 1."""
    X, y = dataset.X_train, dataset.y_train
    p = dataset.p_features

    def value(w: Array) -> float:
        r = X @ w - y
        return float(r @ r)

    def gradient(w: Array) -> Array:
        return 2.0 * (X.T @ (X @ w - y))

    block = ConstraintBlock(
        values=lambda w: w * w - 1.0,
        jacobian=lambda w: np.diag(2.0 * np.asarray(w, dtype=float)),
        size=p,
        name="discrete-states",
    )
    return Objective(value=value, gradient=gradient), ConstraintSystem(equalities=[block])


def support_recovery(w_hat: Array, w_star: Array) -> float:
    """Fraction of coordinates whose sign matches w*; sign(0) counts as a miss."""
    return float(np.mean(np.sign(w_hat) == w_star))


def test_mse(w_hat: Array, dataset: RegressionDataset) -> float:
    r = dataset.X_test @ w_hat - dataset.y_test
    return float(r @ r) / dataset.y_test.size


# (category, n_samples, p_features, reported test MSE) for the reference table
REGRESSION_TABLE = [
    ("small", 80, 20, 0.00692),
    ("small", 80, 50, 0.08650),
    ("small", 160, 20, 0.01040),
    ("medium", 400, 50, 0.01450),
    ("medium", 400, 100, 0.02500),
    ("medium", 640, 50, 0.01070),
    ("large", 800, 200, 0.03310),
    ("large", 800, 500, 0.40700),
    ("large", 1200, 200, 0.02500),
]

REGRESSION_DEFAULTS = dict(iterations=30000, p_init=1e-3, kappa=1.1,
                           seed=101, record_every=200)


def regression_case(n_samples: int, p_features: int, **overrides) -> tuple[BenchmarkCase, RegressionDataset]:
    """Regression bundle for one table row; gamma0 defaults to 6 / n_train.

    The default scale clears the transient of the raw least-squares gradient
    within a few dozen harmonic steps and still contracts the weak spectral
    directions far enough for the penalty cascade to snap the weights onto
    the discrete states within the iteration budget.
    """
    d = dict(REGRESSION_DEFAULTS)
    d.update(overrides)
    dataset = make_regression(int(d["seed"]), n_samples, p_features)
    objective, cs = regression_objective(dataset)
    gamma0 = d.get("gamma0")
    if gamma0 is None:
        gamma0 = 6.0 / dataset.X_train.shape[0]
    bundle = ProblemBundle(objective, cs, AllSpace(),
                           np.zeros(p_features),
                           name=f"regression-{n_samples}x{p_features}")
    config = RunConfig(
        iterations=int(d["iterations"]),
        schedule=InverseK(float(gamma0)),
        penalty=PenaltyConfig(beta=2.0, p_init=d["p_init"], kappa=d["kappa"]),
        seed=int(d["seed"]),
        record_every=int(d["record_every"]),
    )
    case = BenchmarkCase(bundle.name, bundle, config)
    return case, dataset
