"""Stochastic mirror descent on exact penalty functions with adaptive p.

One iteration mirrors the dual state to the primal point, evaluates the
objective and penalty gradients, runs the multiplicative penalty-parameter
test (while the descent test fails at an infeasible point, p <- kappa*p),
then takes the dual step Y <- Y - gamma_k * (G_f + p * g_pen).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from .mirror import EuclideanRegularizer, Regularizer, mirror
from .penalty import (
    FormulationError,
    PenaltyConfig,
    PenaltyTerms,
    penalty_terms,
)
from .problem import Array, ConstraintSystem, FeasibleDomain, as_point

DUAL_NORM_CAP = 1e100


class DivergenceError(RuntimeError):
    """The dual iterate left the representable range."""

    def __init__(self, k: int, grad_norm: float, report: "RunReport | None" = None):
        self.k = k
        self.grad_norm = grad_norm
        self.report = report
        super().__init__(
            f"solver diverged at iteration {k} (gradient norm {grad_norm:.3e})")


@dataclass(frozen=True)
class InverseK:
    """gamma_k = gamma0 / k (Robbins-Monro: summable squares, divergent sum)."""
    gamma0: float


@dataclass(frozen=True)
class Normalized:
    """gamma_k = (alpha0 / k) / max(||G_k||, floor): unit step length alpha0/k."""
    alpha0: float
    floor: float = 1e-12


@dataclass(frozen=True)
class Constant:
    """gamma_k = gamma; diagnostics only (violates the step-size assumption)."""
    gamma: float


StepSchedule = InverseK | Normalized | Constant


def step_size(schedule: StepSchedule, k: int, grad_norm: float = 0.0) -> float:
    """Step size at iteration k >= 1 under the given schedule."""
    if k < 1:
        raise ValueError("iteration index starts at 1")
    if isinstance(schedule, InverseK):
        return schedule.gamma0 / k
    if isinstance(schedule, Normalized):
        return (schedule.alpha0 / k) / max(grad_norm, schedule.floor)
    return schedule.gamma


@dataclass(frozen=True)
class GradientSample:
    """One stochastic (or exact) sample of the objective-gradient oracle."""
    vector: Array
    meta: Any = None


@dataclass(frozen=True)
class Objective:
    """Objective oracle: value, optional exact gradient, optional stochastic oracle.

    When ``gradient`` is None the penalty-update test falls back to the
    sampled gradient (recorded in the run summary). ``sample_gradient``
    receives the evaluation point and a per-iteration RNG stream.
    """

    value: Callable[[Array], float]
    gradient: Optional[Callable[[Array], Array]] = None
    sample_gradient: Optional[Callable[[Array, np.random.Generator], GradientSample]] = None


@dataclass(frozen=True)
class SolverState:
    """Iteration counter, dual point, mirrored primal point, current penalty."""
    k: int
    Y: Array
    X: Array
    p: float


@dataclass(frozen=True)
class PenaltyUpdateResult:
    p: float
    multiplications: int
    capped: bool = False


def _constraint_part(terms: PenaltyTerms, config: PenaltyConfig, kind: str) -> Array:
    if kind == "l1":
        if terms.m(1.0) <= config.feasibility_tol:
            return np.zeros(terms.x.size)
        return terms.l1_selection()
    return terms.beta_gradient(np.zeros(terms.x.size), config.beta,
                               config.feasibility_tol).constraint_part


def penalty_update(x: Array, p_in: float, grad_f: Array, config: PenaltyConfig,
                   cs: ConstraintSystem, kind: str = "beta",
                   terms: PenaltyTerms | None = None) -> PenaltyUpdateResult:
    """Multiplicative penalty-parameter update at an iterate.

    While the test DP_p(x; -grad_f - p*g_pen) + M(x)/p stays positive at an
    infeasible x, multiply p by kappa (direction and derivative recomputed
    with the candidate p each round). Stops on test failure, at p_max, or at
    the per-step multiplication cap; the last two set ``capped``.
    """
    if kind not in ("beta", "l1"):
        raise ValueError(f"unknown penalty kind {kind!r}")
    if kind == "beta" and not 1.0 < config.beta < np.inf:
        raise FormulationError("the adaptive test needs 1 < beta < inf "
                               "for the smooth penalty formulation")
    if terms is None:
        terms = penalty_terms(cs, x)
    beta_eff = 1.0 if kind == "l1" else config.beta
    m = terms.m(beta_eff)
    if m <= config.feasibility_tol:
        return PenaltyUpdateResult(p_in, 0)
    grad_f = np.asarray(grad_f, dtype=float)
    gpen = _constraint_part(terms, config, kind)
    p = float(p_in)
    mults = 0
    # Branch selection at exact zeros only: with the active-set tolerance a
    # barely-infeasible iterate (residual inside the tolerance band) would get
    # the kink-bottom |<grad, d>| branch, whose one-sided derivative is
    # positive in every direction and cascades p straight to the cap.
    while True:
        d = -(grad_f + p * gpen)
        test = (float(np.dot(grad_f, d))
                + p * terms.delta(d, beta_eff, 0.0, config.feasibility_tol)
                + m / p)
        if test <= 0.0:
            return PenaltyUpdateResult(p, mults)
        if p >= config.p_max or mults >= config.max_multiplications_per_step:
            return PenaltyUpdateResult(p, mults, capped=True)
        p = min(p * config.kappa, config.p_max)
        mults += 1


def _advance(state: SolverState, vector: Array, schedule: StepSchedule,
             reg: Regularizer, domain: FeasibleDomain, scale: float) -> SolverState:
    grad_norm = float(np.linalg.norm(vector))
    gamma = step_size(schedule, state.k, grad_norm)
    y_next = state.Y - gamma * vector
    if not np.all(np.isfinite(y_next)) or float(np.linalg.norm(y_next)) > DUAL_NORM_CAP:
        raise DivergenceError(state.k, grad_norm)
    x_next = mirror(scale * y_next if scale != 1.0 else y_next, reg, domain)
    return SolverState(state.k + 1, y_next, x_next, state.p)


def smd_step(state: SolverState, sample: GradientSample, schedule: StepSchedule,
             reg: Regularizer, domain: FeasibleDomain) -> SolverState:
    """One SMD update: Y' = Y - gamma_k G, X' = mirror(Y'); p is left alone."""
    return _advance(state, sample.vector, schedule, reg, domain, 1.0)


def dual_averaging_step(state: SolverState, sample: GradientSample,
                        schedule: StepSchedule, reg: Regularizer,
                        domain: FeasibleDomain,
                        scaling: Callable[[int], float] | None = None) -> SolverState:
    """Weighted dual-averaging update with weights w_k = gamma_k.

    The dual state accumulates the weighted negative gradients; the primal
    point is mirror(s_k * Ybar). With the default scaling s_k = 1 this
    coincides with the lazy SMD step.
    """
    scale = 1.0 if scaling is None else float(scaling(state.k + 1))
    return _advance(state, sample.vector, schedule, reg, domain, scale)


@dataclass(frozen=True)
class TraceRow:
    k: int
    x: Array
    f: float
    m: float
    penalty: float
    p: float
    gamma: float
    grad_norm: float


@dataclass(frozen=True)
class PenaltyUpdateEvent:
    k: int
    multiplications: int
    p_before: float
    p_after: float
    capped: bool


@dataclass
class RunSummary:
    final_x: Array
    final_f: float
    final_m: float
    final_p: float
    iterations: int
    seed: int
    n_penalty_updates: int
    n_multiplications: int
    n_capped_updates: int
    min_objective: float
    sampled_gradient_in_update: bool
    diverged: bool = False
    wall_clock_s: float = 0.0


@dataclass
class RunReport:
    """Per-iteration trace rows plus run summary.

    Rows: one initial row at k = 0 (the mirrored start point) and one row
    per recorded iteration at the pre-step iterate; the post-step final
    iterate is reported in the summary.
    """

    rows: list[TraceRow] = field(default_factory=list)
    events: list[PenaltyUpdateEvent] = field(default_factory=list)
    summary: RunSummary | None = None

    def column(self, name: str) -> np.ndarray:
        if name == "x":
            return np.array([row.x for row in self.rows])
        return np.array([getattr(row, name) for row in self.rows])


@dataclass(frozen=True)
class ProblemBundle:
    """Everything a run needs: oracle, constraints, domain, start point."""
    objective: Objective
    constraints: ConstraintSystem
    domain: FeasibleDomain
    start: Array
    name: str = ""


@dataclass(frozen=True)
class RunConfig:
    """Solver-level run configuration (the CLI resolves user configs into this)."""
    iterations: int
    schedule: StepSchedule
    penalty: PenaltyConfig
    seed: int = 0
    variant: str = "plain"  # "plain" | "dual_averaging"
    penalty_kind: str = "beta"  # "beta" | "l1"
    record_every: int = 1
    da_scaling: Callable[[int], float] | None = None
    debug_checks: bool = False

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.variant not in ("plain", "dual_averaging"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.penalty_kind not in ("beta", "l1"):
            raise ValueError(f"unknown penalty kind {self.penalty_kind!r}")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")


def _iteration_rng(seed: int, k: int) -> np.random.Generator:
    # Stream derived from (seed, k): rerunning any prefix reproduces it.
    return np.random.default_rng([seed, k])


def run(bundle: ProblemBundle, config: RunConfig,
        reg: Regularizer | None = None) -> RunReport:
    """Run the full adaptive-penalty SMD loop and record a trace.

    Deterministic for a fixed (bundle, config): stochastic oracles draw from
    a per-iteration stream keyed by (seed, k). Raises
    :class:`DivergenceError` (carrying the partial report) if the dual
    iterate blows up.
    """
    reg = reg or EuclideanRegularizer()
    obj = bundle.objective
    cs = bundle.constraints
    pen = config.penalty
    beta_eff = 1.0 if config.penalty_kind == "l1" else pen.beta
    t_start = time.perf_counter()

    y = as_point(bundle.start).copy()
    x = mirror(y, reg, bundle.domain)
    state = SolverState(1, y, x, pen.p_init)

    report = RunReport()
    f0 = float(obj.value(x))
    m0 = penalty_terms(cs, x).m(beta_eff)
    report.rows.append(TraceRow(0, x.copy(), f0, m0, f0 + state.p * m0,
                                state.p, 0.0, 0.0))
    min_f = f0
    n_mults = 0
    n_capped = 0
    uses_sample_for_update = obj.gradient is None

    def finish(diverged: bool) -> RunReport:
        fx = float(obj.value(state.X))
        mx = penalty_terms(cs, state.X).m(beta_eff)
        report.summary = RunSummary(
            final_x=state.X.copy(),
            final_f=fx,
            final_m=mx,
            final_p=state.p,
            iterations=state.k - 1,
            seed=config.seed,
            n_penalty_updates=len(report.events),
            n_multiplications=n_mults,
            n_capped_updates=n_capped,
            min_objective=min(min_f, fx),
            sampled_gradient_in_update=uses_sample_for_update,
            diverged=diverged,
            wall_clock_s=time.perf_counter() - t_start,
        )
        return report

    for k in range(1, config.iterations + 1):
        x = state.X
        fx = float(obj.value(x))
        min_f = min(min_f, fx)
        terms = penalty_terms(cs, x)
        m = terms.m(beta_eff)

        g_exact = np.asarray(obj.gradient(x), dtype=float) if obj.gradient else None
        if obj.sample_gradient is not None:
            sample = obj.sample_gradient(x, _iteration_rng(config.seed, k))
        else:
            sample = GradientSample(g_exact)
        update_grad = g_exact if g_exact is not None else sample.vector

        upd = penalty_update(x, state.p, update_grad, pen, cs,
                             kind=config.penalty_kind, terms=terms)
        if upd.multiplications:
            report.events.append(PenaltyUpdateEvent(
                k, upd.multiplications, state.p, upd.p, upd.capped))
            n_mults += upd.multiplications
            n_capped += int(upd.capped)
        p = upd.p

        gpen = _constraint_part(terms, pen, config.penalty_kind)
        total = sample.vector + p * gpen
        grad_norm = float(np.linalg.norm(total))
        gamma = step_size(config.schedule, k, grad_norm)

        if (k - 1) % config.record_every == 0 or k == config.iterations:
            report.rows.append(TraceRow(k, x.copy(), fx, m, fx + p * m,
                                        p, gamma, grad_norm))

        state = SolverState(state.k, state.Y, state.X, p)
        try:
            if config.variant == "dual_averaging":
                state = dual_averaging_step(state, GradientSample(total),
                                            config.schedule, reg, bundle.domain,
                                            config.da_scaling)
            else:
                state = smd_step(state, GradientSample(total), config.schedule,
                                 reg, bundle.domain)
        except DivergenceError as err:
            raise DivergenceError(err.k, err.grad_norm, finish(diverged=True)) from None

        if config.debug_checks:
            scale = (1.0 if config.variant == "plain" or config.da_scaling is None
                     else float(config.da_scaling(state.k)))
            expect = mirror(scale * state.Y if scale != 1.0 else state.Y,
                            reg, bundle.domain)
            assert np.array_equal(state.X, expect), "mirror-state invariant broken"

    return finish(diverged=False)
