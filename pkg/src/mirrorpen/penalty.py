"""Exact-penalty calculus for the beta-norm penalty P_p(x) = f(x) + p*M(x).

For 1 < beta < inf the penalty term M(x) = ||(g_plus(x), h(x))||_beta is
continuously differentiable at strictly infeasible points; this module
provides its gradient (with the sigma/eta coefficient vectors), one-sided
directional operators for the equality/inequality components, the
directional-derivative forms for beta in {1, (1,inf), inf}, and the fixed
l1 subgradient selection used by the differentiability-comparison study.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problem import (
    Array,
    ConstraintSystem,
    as_point,
    residual_norm,
)


class FormulationError(ValueError):
    """Requested a gradient formula outside its validity range."""


class FeasiblePointError(ValueError):
    """Directional penalty forms are defined at infeasible points only."""


@dataclass(frozen=True)
class PenaltyConfig:
    """Penalty-parameter state and safety caps for the adaptive update.

    ``beta`` must lie in (1, inf) for gradient-based paths; beta = 1 and
    beta = inf are accepted only for directional-derivative analysis.
    ``p_init`` is the initial penalty parameter p_1 > 0; ``kappa`` > 1 is
    the multiplicative update factor.
    """

    beta: float = 2.0
    p_init: float = 1.0
    kappa: float = 2.0
    p_max: float = 1e12
    max_multiplications_per_step: int = 60
    feasibility_tol: float = 1e-12
    active_tol: float = 1e-9

    def __post_init__(self):
        if not self.beta >= 1.0:
            raise ValueError(f"beta must be >= 1, got {self.beta}")
        if not self.p_init > 0:
            raise ValueError("initial penalty parameter must be positive")
        if not self.kappa > 1.0:
            raise ValueError("kappa must exceed 1")
        if not self.p_max >= self.p_init:
            raise ValueError("p_max must be >= the initial penalty parameter")
        if self.max_multiplications_per_step < 1:
            raise ValueError("multiplication cap must be >= 1")


@dataclass(frozen=True)
class PenaltyGradient:
    """Decomposed gradient of P_p at a point: objective part and p-scaled part.

    ``constraint_part`` is the beta-norm term's gradient selection
    (zero vector at feasible points); ``sigma``/``eta`` are its equality
    and inequality coefficients.
    """

    objective_part: Array
    constraint_part: Array
    sigma: Array
    eta: Array

    def total(self, p: float) -> Array:
        return self.objective_part + p * self.constraint_part


class PenaltyTerms:
    """Cached constraint values/Jacobians at one point.

    Built once per solver iteration so the adaptive-update loop can
    re-evaluate directional derivatives along changing directions without
    touching the constraint oracles again.
    """

    def __init__(self, cs: ConstraintSystem, x: Array):
        x = as_point(x)
        self.x = x
        self.h = cs.equality_values(x)
        self.g = cs.inequality_values(x)
        self.g_plus = np.maximum(self.g, 0.0)
        self.jac_h = cs.equality_jacobian(x)
        self.jac_g = cs.inequality_jacobian(x)
        self._stacked = np.concatenate([self.g_plus, self.h])
        self.m_inf = residual_norm(self._stacked, np.inf)
        self._norms: dict[float, float] = {np.inf: self.m_inf}

    def m(self, beta: float) -> float:
        got = self._norms.get(beta)
        if got is None:
            got = residual_norm(self._stacked, beta)
            self._norms[beta] = got
        return got

    def xi_values(self, d: Array, tol: float) -> Array:
        """One-sided equality operators xi_i(x, d), vectorized over i."""
        if self.h.size == 0:
            return np.empty(0)
        dots = self.jac_h @ d
        return np.where(self.h > tol, dots,
                        np.where(self.h < -tol, -dots, np.abs(dots)))

    def zeta_values(self, d: Array, tol: float) -> Array:
        """One-sided inequality operators zeta_j(x, d), vectorized over j."""
        if self.g.size == 0:
            return np.empty(0)
        dots = self.jac_g @ d
        return np.where(self.g > tol, dots,
                        np.where(self.g < -tol, 0.0, np.maximum(dots, 0.0)))

    def _weights(self, beta: float):
        # Scale-free ratio form of m^(1-beta) * r^(beta-1): never under/overflows
        # and makes the dual-norm identity ||(sigma, eta)||_{beta/(beta-1)} = 1 exact.
        m = self.m(beta)
        wh = np.power(np.abs(self.h) / m, beta - 1.0) if self.h.size else np.empty(0)
        wg = np.power(self.g_plus / m, beta - 1.0) if self.g.size else np.empty(0)
        return wh, wg

    def delta(self, d: Array, beta: float, active_tol: float,
              feasibility_tol: float = 1e-12) -> float:
        """Penalty directional-derivative component for the requested norm."""
        if self.m_inf <= feasibility_tol:
            raise FeasiblePointError(
                "penalty directional derivative requires a strictly infeasible point")
        xi = self.xi_values(d, active_tol)
        zeta = self.zeta_values(d, active_tol)
        if beta == 1.0:
            return float(xi.sum() + zeta.sum())
        if np.isinf(beta):
            cut = self.m_inf - active_tol
            vals = []
            if xi.size:
                act = np.abs(self.h) >= cut
                if act.any():
                    vals.append(float(xi[act].max()))
            if zeta.size:
                act = self.g_plus >= cut
                if act.any():
                    vals.append(float(zeta[act].max()))
            return max(vals)
        wh, wg = self._weights(beta)
        return float(wh @ xi if xi.size else 0.0) + float(wg @ zeta if zeta.size else 0.0)

    def beta_gradient(self, grad_f: Array, beta: float,
                      feasibility_tol: float = 1e-12) -> PenaltyGradient:
        """Gradient decomposition of P_p for 1 < beta < inf."""
        if not 1.0 < beta < np.inf:
            raise FormulationError(
                f"the penalty gradient is defined for 1 < beta < inf, got {beta}; "
                "use delta()/dir_derivative() for beta = 1 or inf")
        grad_f = np.asarray(grad_f, dtype=float)
        n = self.x.size
        if self.m(beta) <= feasibility_tol:
            # 0 is a valid Clarke selection at feasible points.
            return PenaltyGradient(grad_f, np.zeros(n),
                                   np.zeros(self.h.size), np.zeros(self.g.size))
        wh, wg = self._weights(beta)
        sigma = wh * np.sign(self.h) if self.h.size else wh
        eta = wg
        part = np.zeros(n)
        if sigma.size:
            part += self.jac_h.T @ sigma
        if eta.size:
            part += self.jac_g.T @ eta
        return PenaltyGradient(grad_f, part, sigma, eta)

    def l1_selection(self) -> Array:
        """Fixed l1-penalty subgradient: sgn(h_i) grads plus violated-g grads.

        sgn(0) = 0 and boundary inequalities (g_j = 0) contribute nothing,
        so the selection is deterministic at kinks.
        """
        n = self.x.size
        out = np.zeros(n)
        if self.h.size:
            out += self.jac_h.T @ np.sign(self.h)
        if self.g.size:
            out += self.jac_g.T @ (self.g > 0.0).astype(float)
        return out


def penalty_terms(cs: ConstraintSystem, x: Array) -> PenaltyTerms:
    """Evaluate and cache the constraint data needed by the penalty calculus."""
    return PenaltyTerms(cs, x)


def penalty_value(f_value: float, snapshot, p: float) -> float:
    """P_p(x) = f(x) + p * M(x) from a precomputed violation snapshot."""
    return float(f_value) + float(p) * snapshot.m_beta


def penalty_gradient(cs: ConstraintSystem, grad_f: Array, x: Array,
                     config: PenaltyConfig) -> PenaltyGradient:
    """Gradient of P_p at ``x`` for the smooth formulation 1 < beta < inf.

    At strictly infeasible points the coefficients are
    ``sigma_i = M^(1-beta) |h_i|^(beta-1) sgn(h_i)`` and
    ``eta_j = M^(1-beta) (g_j)_+^(beta-1)``; at (tol-)feasible points the
    constraint part is the zero selection.
    """
    return penalty_terms(cs, x).beta_gradient(
        grad_f, config.beta, config.feasibility_tol)


def xi(cs: ConstraintSystem, i: int, x: Array, d: Array, tol: float = 1e-9) -> float:
    """Directional operator for equality constraint ``i`` along ``d``."""
    t = penalty_terms(cs, x)
    return float(t.xi_values(np.asarray(d, dtype=float), tol)[i])


def zeta(cs: ConstraintSystem, j: int, x: Array, d: Array, tol: float = 1e-9) -> float:
    """Directional operator for inequality constraint ``j`` along ``d``."""
    t = penalty_terms(cs, x)
    return float(t.zeta_values(np.asarray(d, dtype=float), tol)[j])


def delta(cs: ConstraintSystem, x: Array, d: Array, beta: float,
          active_tol: float = 1e-9, feasibility_tol: float = 1e-12) -> float:
    """Penalty directional-derivative component Delta^beta(x, d).

    beta = 1 sums the directional operators; 1 < beta < inf weights them by
    the normalized residual powers; beta = inf maximizes over the active
    max-attaining sets. Requires a strictly infeasible ``x``.
    """
    return penalty_terms(cs, x).delta(np.asarray(d, dtype=float), beta,
                                      active_tol, feasibility_tol)


def dir_derivative(grad_f: Array, cs: ConstraintSystem, x: Array, d: Array,
                   p: float, beta: float, active_tol: float = 1e-9) -> float:
    """Directional derivative of P_p: <grad_f, d> + p * Delta^beta(x, d)."""
    d = np.asarray(d, dtype=float)
    return float(np.dot(grad_f, d)) + float(p) * delta(cs, x, d, beta, active_tol)


def l1_subgradient(cs: ConstraintSystem, x: Array) -> Array:
    """Fixed subgradient selection of the l1 penalty term at ``x``."""
    return penalty_terms(cs, x).l1_selection()
