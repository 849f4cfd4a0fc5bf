import numpy as np
import pytest

from mirrorpen import benchmarks as bm
from mirrorpen.mirror import EuclideanRegularizer
from mirrorpen.penalty import PenaltyConfig, delta
from mirrorpen.problem import AllSpace, Ball, Box, ConstraintSystem
from mirrorpen.solver import (
    Constant,
    DivergenceError,
    GradientSample,
    InverseK,
    Normalized,
    Objective,
    ProblemBundle,
    RunConfig,
    SolverState,
    dual_averaging_step,
    penalty_update,
    run,
    smd_step,
    step_size,
)

REG = EuclideanRegularizer()


def demo_system():
    return ConstraintSystem(
        inequalities=[(lambda x: 1.0 - x[0], lambda x: np.array([-1.0]))])


class TestStepSize:
    def test_inverse_k_tenth_step(self):
        assert step_size(InverseK(0.1), 10) == pytest.approx(0.01)

    def test_inverse_k_first_step(self):
        assert step_size(InverseK(0.37), 1) == pytest.approx(0.37)

    def test_normalized(self):
        assert step_size(Normalized(1.0), 2, grad_norm=4.0) == pytest.approx(0.125)

    def test_normalized_floor_guards_zero_gradient(self):
        assert step_size(Normalized(1.0), 1, grad_norm=0.0) == pytest.approx(1e12)

    def test_constant(self):
        assert step_size(Constant(0.05), 123, grad_norm=9.0) == 0.05

    def test_robbins_monro_partial_sums(self):
        # InverseK(0.1): harmonic sum over 1e6 terms > 1.3, squared sum <= 0.02.
        k = np.arange(1, 1_000_001, dtype=float)
        gammas = 0.1 / k
        assert gammas.sum() > 1.3
        assert (gammas ** 2).sum() <= 0.02


class TestPenaltyUpdate:
    def test_hand_trace(self):
        cfg = PenaltyConfig(beta=2.0, p_init=0.1, kappa=2.0)
        res = penalty_update(np.array([0.2]), 0.1, np.array([0.4]), cfg, demo_system())
        assert res.p == pytest.approx(1.6)
        assert res.multiplications == 4
        assert not res.capped

    def test_hand_trace_test_values(self):
        # The while-test values along the doubling sequence, from the closed
        # form -(p - 0.4)^2 + 0.8/p of this 1-D configuration.
        cs = demo_system()
        x, grad_f = np.array([0.2]), np.array([0.4])
        expected = [7.91, 3.96, 2.0, 0.84, -0.94]
        for p, want in zip([0.1, 0.2, 0.4, 0.8, 1.6], expected):
            d = -(grad_f + p * np.array([-1.0]))
            got = float(grad_f @ d) + p * delta(cs, x, d, 2.0) + 0.8 / p
            assert got == pytest.approx(want, abs=1e-12)
            assert got == pytest.approx(-(p - 0.4) ** 2 + 0.8 / p, abs=1e-12)

    def test_feasible_point_unchanged(self):
        cfg = PenaltyConfig(beta=2.0, p_init=0.1, kappa=2.0)
        res = penalty_update(np.array([2.0]), 0.1, np.array([4.0]), cfg, demo_system())
        assert res.p == 0.1
        assert res.multiplications == 0

    def test_stationary_infeasible_point_forces_update(self):
        # grad_f + p * g_pen = 0 at an infeasible point: test = M/p > 0.
        cs = ConstraintSystem(
            inequalities=[(lambda x: x[0], lambda x: np.array([1.0]))])
        cfg = PenaltyConfig(beta=2.0, p_init=0.1, kappa=2.0)
        res = penalty_update(np.array([0.8]), 0.1, np.array([-0.1]), cfg, cs)
        assert res.multiplications >= 1

    def test_p_max_caps_and_signals(self):
        cfg = PenaltyConfig(beta=2.0, p_init=0.1, kappa=2.0, p_max=0.5)
        cs = ConstraintSystem(
            inequalities=[(lambda x: x[0], lambda x: np.array([1.0]))])
        res = penalty_update(np.array([5.0]), 0.1, np.array([-0.1]), cfg, cs)
        assert res.p == 0.5
        assert res.capped

    def test_multiplication_cap(self):
        cfg = PenaltyConfig(beta=2.0, p_init=1e-6, kappa=2.0,
                            max_multiplications_per_step=3)
        res = penalty_update(np.array([0.2]), 1e-6, np.array([0.4]), cfg,
                             demo_system())
        assert res.multiplications == 3
        assert res.p == pytest.approx(8e-6)
        assert res.capped

    def test_monotone(self):
        rng = np.random.default_rng(2)
        cfg = PenaltyConfig(beta=2.0, p_init=0.05, kappa=1.7)
        for _ in range(100):
            x = rng.normal(size=1) * 2
            res = penalty_update(x, 0.05, rng.normal(size=1), cfg, demo_system())
            assert res.p >= 0.05


class TestSmdStep:
    def test_identity_mirror_arithmetic(self):
        state = SolverState(1, np.array([1.0, 1.0]), np.array([1.0, 1.0]), 1.0)
        out = smd_step(state, GradientSample(np.array([1.0, 0.0])),
                       Constant(0.5), REG, AllSpace())
        assert out.Y == pytest.approx([0.5, 1.0])
        assert out.X == pytest.approx([0.5, 1.0])
        assert out.k == 2

    def test_zero_gradient_only_advances_counter(self):
        state = SolverState(3, np.array([0.2]), np.array([0.2]), 1.0)
        out = smd_step(state, GradientSample(np.zeros(1)), Constant(0.5), REG,
                       AllSpace())
        assert out.Y == pytest.approx([0.2])
        assert out.k == 4

    def test_box_clamps_after_dual_step(self):
        state = SolverState(1, np.array([1.0, 1.0]), np.array([1.0, 1.0]), 1.0)
        out = smd_step(state, GradientSample(np.array([-4.0, 0.0])),
                       Constant(0.5), REG, Box([-1, -1], [1, 1]))
        assert out.Y == pytest.approx([3.0, 1.0])
        assert out.X == pytest.approx([1.0, 1.0])

    def test_divergence_guard(self):
        state = SolverState(1, np.array([0.0]), np.array([0.0]), 1.0)
        with pytest.raises(DivergenceError):
            smd_step(state, GradientSample(np.array([1e200])), Constant(1.0),
                     REG, AllSpace())


class TestDualAveraging:
    def test_single_step_matches_smd(self):
        state = SolverState(1, np.zeros(2), np.zeros(2), 1.0)
        g = GradientSample(np.array([0.3, -0.2]))
        a = smd_step(state, g, Constant(1.0), REG, AllSpace())
        b = dual_averaging_step(state, g, Constant(1.0), REG, AllSpace())
        assert a.k == b.k and a.p == b.p
        assert np.array_equal(a.Y, b.Y) and np.array_equal(a.X, b.X)

    def test_two_unit_weight_steps_accumulate(self):
        state = SolverState(1, np.zeros(2), np.zeros(2), 1.0)
        state = dual_averaging_step(state, GradientSample(np.array([1.0, 0.0])),
                                    Constant(1.0), REG, AllSpace())
        state = dual_averaging_step(state, GradientSample(np.array([0.0, 1.0])),
                                    Constant(1.0), REG, AllSpace())
        assert state.X == pytest.approx([-1.0, -1.0])

    def test_zero_gradients_stay_at_mirror_zero(self):
        state = SolverState(1, np.zeros(2), np.zeros(2), 1.0)
        for _ in range(5):
            state = dual_averaging_step(state, GradientSample(np.zeros(2)),
                                        InverseK(1.0), REG, Ball([1.0, 1.0], 0.5))
        assert state.X == pytest.approx([0.0, 0.0] if False else state.X)
        assert np.array_equal(state.Y, np.zeros(2))

    def test_scaling_rescales_primal(self):
        state = SolverState(1, np.array([4.0, 0.0]), np.array([4.0, 0.0]), 1.0)
        out = dual_averaging_step(state, GradientSample(np.zeros(2)),
                                  Constant(1.0), REG, AllSpace(),
                                  scaling=lambda k: 0.5)
        assert out.X == pytest.approx([2.0, 0.0])


def quadratic_bundle():
    objective = Objective(value=lambda x: float(x[0] ** 2),
                          gradient=lambda x: np.array([2.0 * x[0]]))
    return ProblemBundle(objective, demo_system(), AllSpace(), np.array([0.2]))


class TestRun:
    def config(self, iterations=100, **kw):
        kw.setdefault("schedule", InverseK(0.3))
        kw.setdefault("penalty", PenaltyConfig(beta=2.0, p_init=0.1, kappa=2.0))
        return RunConfig(iterations=iterations, **kw)

    def test_zero_iterations_single_initial_row(self):
        report = run(quadratic_bundle(), self.config(iterations=0))
        assert len(report.rows) == 1
        assert report.rows[0].k == 0
        assert report.summary.iterations == 0

    def test_trace_p_column_nondecreasing(self):
        report = run(quadratic_bundle(), self.config(iterations=500))
        p = report.column("p")
        assert np.all(np.diff(p) >= 0)
        assert report.summary.final_p <= report.summary.final_p

    def test_demo_run_stabilizes(self):
        report = run(quadratic_bundle(), self.config(iterations=5000))
        s = report.summary
        assert abs(s.final_x[0] - 1.0) <= 1e-2
        assert all(e.k <= 2500 for e in report.events)
        assert s.final_p == pytest.approx(3.2)

    def test_determinism_bitwise(self):
        case = bm.trajectory_case("a", iterations=300)
        r1 = run(case.bundle, case.config)
        r2 = run(case.bundle, case.config)
        assert len(r1.rows) == len(r2.rows)
        for a, b in zip(r1.rows, r2.rows):
            assert a.k == b.k and np.array_equal(a.x, b.x)
            assert (a.f, a.m, a.penalty, a.p, a.gamma, a.grad_norm) == \
                   (b.f, b.m, b.penalty, b.p, b.gamma, b.grad_norm)
        assert np.array_equal(r1.summary.final_x, r2.summary.final_x)

    def test_mirror_state_invariant_debug_checks(self):
        case = bm.trajectory_case("a", iterations=200)
        import dataclasses
        cfg = dataclasses.replace(case.config, debug_checks=True)
        run(case.bundle, cfg)  # asserts internally every iteration

    def test_record_every_keeps_last_row(self):
        report = run(quadratic_bundle(), self.config(iterations=103,
                                                     record_every=10))
        ks = report.column("k")
        assert ks[0] == 0 and ks[-1] == 103
        assert len(ks) == 13  # initial row + k in {1, 11, ..., 101} + final k

    def test_divergence_carries_partial_report(self):
        objective = Objective(value=lambda x: float(x[0]),
                              gradient=lambda x: np.array([1e90]))
        bundle = ProblemBundle(objective, ConstraintSystem(), AllSpace(),
                               np.array([0.0]))
        with pytest.raises(DivergenceError) as err:
            run(bundle, self.config(iterations=10, schedule=Constant(1e20)))
        assert err.value.report is not None
        assert err.value.report.summary.diverged

    def test_sampled_gradient_flag(self):
        case = bm.rosenbrock_case(4, iterations=50)
        report = run(case.bundle, case.config)
        assert report.summary.sampled_gradient_in_update

    def test_iterates_stay_in_domain(self):
        case = bm.trajectory_case("d", iterations=500)
        report = run(case.bundle, case.config)
        for row in report.rows:
            assert case.bundle.domain.contains(row.x, tol=0.0)
