import numpy as np
import pytest

from _fd import fd_gradient, rel_err
from mirrorpen import benchmarks as bm
from mirrorpen.penalty import (
    FeasiblePointError,
    FormulationError,
    PenaltyConfig,
    delta,
    dir_derivative,
    l1_subgradient,
    penalty_gradient,
    penalty_value,
    xi,
    zeta,
)
from mirrorpen.problem import ConstraintSystem, residual_norm, residuals


def line_system():
    return ConstraintSystem(
        equalities=[(lambda x: x[0] - x[1], lambda x: np.array([1.0, -1.0]))])


def circle_system():
    return ConstraintSystem(
        equalities=[(lambda x: x[0] ** 2 + x[1] ** 2 - 4.0,
                     lambda x: np.array([2 * x[0], 2 * x[1]]))])


def one_inequality():
    # g(x) = 1 - x <= 0 in 1-D
    return ConstraintSystem(
        inequalities=[(lambda x: 1.0 - x[0], lambda x: np.array([-1.0]))])


def wedge_system():
    return bm.linear_wedge_constraints()


def mixed_system():
    return ConstraintSystem(
        equalities=[(lambda x: x[0] - x[1], lambda x: np.array([1.0, -1.0])),
                    (lambda x: x[0] ** 2 + x[1] ** 2 - 4.0,
                     lambda x: np.array([2 * x[0], 2 * x[1]]))],
        inequalities=[(lambda x: x[0] + x[1] - 1.0, lambda x: np.array([1.0, 1.0])),
                      (lambda x: -x[1] + 0.3, lambda x: np.array([0.0, -1.0]))])


class TestPenaltyValue:
    def test_feasible_point_penalty_vanishes(self):
        snap = residuals(line_system(), np.array([1.0, 1.0]), 2.0)
        assert penalty_value(2.0, snap, 10.0) == pytest.approx(2.0)

    def test_direct_arithmetic(self):
        snap = residuals(circle_system(), np.zeros(2), 2.0)  # m = 4
        assert penalty_value(0.0, snap, 0.5) == pytest.approx(2.0)

    def test_two_constraint_example(self):
        cs = ConstraintSystem(equalities=[
            (lambda x: 3.0, lambda x: np.zeros(2)),
            (lambda x: 4.0, lambda x: np.zeros(2))])
        snap = residuals(cs, np.zeros(2), 2.0)
        assert penalty_value(1.0, snap, 1.0) == pytest.approx(6.0)


class TestPenaltyGradient:
    def test_circle_single_constraint(self):
        pg = penalty_gradient(circle_system(), np.zeros(2), np.array([3.0, 0.0]),
                              PenaltyConfig(beta=2.0, p_init=1.0))
        assert pg.sigma == pytest.approx([1.0])
        assert pg.constraint_part == pytest.approx([6.0, 0.0])

    @pytest.mark.parametrize("beta", [1.2, 2.0, 5.0])
    def test_single_equality_collapse(self, beta):
        # For one equality the coefficient algebra collapses to sgn(h) grad h.
        rng = np.random.default_rng(5)
        for cs in (line_system(), circle_system()):
            for _ in range(50):
                x = rng.normal(size=2) * 2
                snap = residuals(cs, x, beta)
                if snap.m_beta < 1e-6:
                    continue
                pg = penalty_gradient(cs, np.zeros(2), x,
                                      PenaltyConfig(beta=beta, p_init=1.0))
                h = snap.h_values[0]
                want = np.sign(h) * cs.equality_jacobian(x)[0]
                assert np.max(np.abs(pg.constraint_part - want)) <= 1e-12

    def test_feasible_point_selects_zero(self):
        pg = penalty_gradient(line_system(), np.array([1.0, 2.0]),
                              np.array([0.7, 0.7]), PenaltyConfig(beta=2.0, p_init=1.0))
        assert pg.constraint_part == pytest.approx([0.0, 0.0])
        assert pg.total(5.0) == pytest.approx([1.0, 2.0])

    @pytest.mark.parametrize("beta", [1.0, np.inf])
    def test_rejects_nonsmooth_betas(self, beta):
        with pytest.raises((FormulationError, ValueError)):
            penalty_gradient(line_system(), np.zeros(2), np.array([1.0, 0.0]),
                             PenaltyConfig(beta=beta, p_init=1.0))

    @pytest.mark.parametrize("beta", [1.5, 2.0, 3.0])
    def test_dual_norm_normalization(self, beta):
        rng = np.random.default_rng(8)
        cs = mixed_system()
        q = beta / (beta - 1.0)
        checked = 0
        while checked < 100:
            x = rng.normal(size=2) * 3
            if residuals(cs, x, beta).m_beta < 1e-3:
                continue
            pg = penalty_gradient(cs, np.zeros(2), x,
                                  PenaltyConfig(beta=beta, p_init=1.0))
            coeff = np.concatenate([pg.sigma, pg.eta])
            assert residual_norm(coeff, q) == pytest.approx(1.0, abs=1e-10)
            checked += 1


class TestDirectionalOperators:
    def test_xi_positive_branch(self):
        assert xi(line_system(), 0, np.array([1.0, 0.0]),
                  np.array([-1.0, 1.0])) == pytest.approx(-2.0)

    def test_xi_zero_branch_absolute_value(self):
        assert xi(line_system(), 0, np.array([0.0, 0.0]),
                  np.array([-1.0, 1.0])) == pytest.approx(2.0)

    def test_xi_negative_branch(self):
        assert xi(line_system(), 0, np.array([0.0, 1.0]),
                  np.array([-1.0, 1.0])) == pytest.approx(2.0)

    def test_zeta_violated_branch(self):
        cs = ConstraintSystem(
            inequalities=[(lambda x: x[0], lambda x: np.array([1.0, 0.0]))])
        assert zeta(cs, 0, np.array([2.0, 0.0]),
                    np.array([-1.0, 0.0])) == pytest.approx(-1.0)

    def test_zeta_satisfied_branch_is_zero(self):
        cs = ConstraintSystem(
            inequalities=[(lambda x: x[0], lambda x: np.array([1.0, 0.0]))])
        for d in ([3.0, -2.0], [-1.0, 5.0]):
            assert zeta(cs, 0, np.array([-1.0, 0.0]), np.array(d)) == 0.0

    def test_zeta_boundary_clips_descent(self):
        cs = ConstraintSystem(
            inequalities=[(lambda x: x[0], lambda x: np.array([3.0, 0.0]))])
        assert zeta(cs, 0, np.array([0.0, 0.0]),
                    np.array([-1.0, 0.0])) == pytest.approx(0.0)


class TestDelta:
    def test_single_equality_beta2(self):
        got = delta(circle_system(), np.array([3.0, 0.0]), np.array([-1.0, 0.0]), 2.0)
        assert got == pytest.approx(-6.0)

    def test_beta1_single_violated_inequality(self):
        got = delta(one_inequality(), np.array([0.2]), np.array([1.0]), 1.0)
        assert got == pytest.approx(-1.0)

    def test_beta_inf_max_over_active(self):
        cs = ConstraintSystem(equalities=[
            (lambda x: 2.0, lambda x: np.array([1.0, 0.0])),
            (lambda x: -2.0, lambda x: np.array([0.0, 1.0]))])
        got = delta(cs, np.zeros(2), np.array([-1.0, -1.0]), np.inf)
        assert got == pytest.approx(1.0)

    def test_feasible_point_rejected(self):
        with pytest.raises(FeasiblePointError):
            delta(line_system(), np.array([1.0, 1.0]), np.array([1.0, 0.0]), 2.0)

    @pytest.mark.parametrize("beta", [1.0, 2.0, np.inf])
    def test_positive_homogeneity(self, beta):
        rng = np.random.default_rng(21)
        cs = mixed_system()
        for _ in range(200):
            x = rng.normal(size=2) * 3
            snap = residuals(cs, x, 2.0)
            if snap.m_inf < 1e-6:
                continue
            d = rng.normal(size=2)
            c = float(rng.uniform(0.1, 10.0))
            assert delta(cs, x, c * d, beta) == pytest.approx(
                c * delta(cs, x, d, beta), rel=1e-12)


class TestDirDerivative:
    def test_hand_trace(self):
        got = dir_derivative(np.array([0.4]), one_inequality(), np.array([0.2]),
                             np.array([-0.3]), 0.1, 2.0)
        assert got == pytest.approx(-0.09)

    def test_zero_direction(self):
        assert dir_derivative(np.array([0.4]), one_inequality(), np.array([0.2]),
                              np.array([0.0]), 0.1, 2.0) == 0.0

    @pytest.mark.parametrize("beta", [1.5, 2.0, 3.0])
    def test_matches_gradient_inner_product(self, beta):
        rng = np.random.default_rng(31)
        cs = mixed_system()
        cfg = PenaltyConfig(beta=beta, p_init=1.0)
        checked = 0
        while checked < 100:
            x = rng.normal(size=2) * 3
            snap = residuals(cs, x, beta)
            # keep clear of active boundaries so the smooth branch applies
            if snap.m_inf < 1e-2 or np.any(np.abs(snap.g_values) < 1e-3):
                continue
            grad_f = rng.normal(size=2)
            d = rng.normal(size=2)
            p = float(rng.uniform(0.1, 10.0))
            pg = penalty_gradient(cs, grad_f, x, cfg)
            want = float(np.dot(pg.total(p), d))
            got = dir_derivative(grad_f, cs, x, d, p, beta)
            assert got == pytest.approx(want, rel=1e-8, abs=1e-10)
            checked += 1


class TestL1Subgradient:
    def test_sum_of_violated_gradients(self):
        got = l1_subgradient(wedge_system(), np.array([1.0, 2.0]))
        assert got == pytest.approx([0.0, 1.0])

    def test_feasible_point_gives_zero(self):
        got = l1_subgradient(wedge_system(), np.array([-1.0, -2.0]))
        assert got == pytest.approx([0.0, 0.0])

    def test_kink_selection_bounded_away_from_zero(self):
        got = l1_subgradient(wedge_system(), np.array([1.0, 1.0]))
        assert got == pytest.approx([1.0, 0.0])
        assert np.linalg.norm(got) >= 1.0


def _benchmark_systems():
    systems = [("line", line_system(), 2),
               ("circle", circle_system(), 2),
               ("wedge", wedge_system(), 2),
               ("demo-1d", one_inequality(), 1),
               ("trajectory-c", bm.trajectory_constraints("c"), 2),
               ("sphere-4", bm.sphere_constraint(4), 4)]
    ds = bm.make_regression(0, 20, 5)
    _, reg_cs = bm.regression_objective(ds)
    systems.append(("regression-5", reg_cs, 5))
    return systems


class TestGradientFiniteDifferences:
    @pytest.mark.parametrize("beta", [1.5, 2.0, 3.0])
    @pytest.mark.parametrize("p", [0.1, 1.0, 10.0])
    def test_penalty_gradient_matches_fd(self, beta, p):
        rng = np.random.default_rng(77)
        cfg = PenaltyConfig(beta=beta, p_init=p)
        for name, cs, n in _benchmark_systems():
            checked = 0
            while checked < 20:
                x = rng.normal(size=n) * 1.5
                snap = residuals(cs, x, beta)
                residual = np.concatenate([snap.g_values, snap.h_values])
                # strictly infeasible, away from kinks of the max() operator
                if snap.m_inf < 5e-2 or np.any(np.abs(residual) < 5e-3):
                    continue
                pg = penalty_gradient(cs, np.zeros(n), x, cfg)
                analytic = p * pg.constraint_part

                def pen(z):
                    return p * residuals(cs, z, beta).m_beta

                assert rel_err(analytic, fd_gradient(pen, x)) <= 1e-5, name
                checked += 1
