"""Constrained-problem primitives: constraint systems, feasible domains, violations.

A problem instance is ``min f(x)`` subject to ``h_i(x) = 0`` (equalities),
``g_j(x) <= 0`` (inequalities), and ``x`` in a simple convex domain that
supports exact Euclidean projection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

Array = np.ndarray


class EvaluationError(RuntimeError):
    """A constraint returned a non-finite value or gradient."""

    def __init__(self, kind: str, index: int, what: str):
        self.kind = kind
        self.index = index
        super().__init__(f"{kind} constraint {index}: {what}")


class DomainError(ValueError):
    """A point violates a domain precondition."""


def as_point(x, dim: int | None = None) -> Array:
    """Validate and return ``x`` as a finite 1-D float array."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.ndim != 1 or x.size < 1:
        raise DomainError(f"expected a 1-D point, got shape {x.shape}")
    if dim is not None and x.size != dim:
        raise DomainError(f"expected dimension {dim}, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DomainError("point has non-finite coordinates")
    return x


def residual_norm(v: Array, beta: float) -> float:
    """Overflow-safe beta-norm of a residual vector, beta in [1, inf]."""
    if beta < 1.0:
        raise ValueError(f"beta must be >= 1, got {beta}")
    if v.size == 0:
        return 0.0
    a = np.abs(v)
    m = float(a.max())
    if m == 0.0 or np.isinf(beta):
        return m
    if beta == 1.0:
        return float(a.sum())
    return m * float(np.power(a / m, beta).sum()) ** (1.0 / beta)


@dataclass(frozen=True)
class ConstraintBlock:
    """A vector-valued group of scalar constraints with an analytic Jacobian.

    ``values(x)`` returns shape ``(size,)``; ``jacobian(x)`` returns
    ``(size, n)``. Scalar constraints are one-row blocks (see
    :func:`scalar_constraint`).
    """

    values: Callable[[Array], Array]
    jacobian: Callable[[Array], Array]
    size: int
    name: str = ""


def scalar_constraint(fn: Callable[[Array], float],
                      grad: Callable[[Array], Array],
                      name: str = "") -> ConstraintBlock:
    """Wrap a scalar constraint and its gradient into a one-row block."""
    return ConstraintBlock(
        values=lambda x: np.atleast_1d(np.asarray(fn(x), dtype=float)),
        jacobian=lambda x: np.asarray(grad(x), dtype=float).reshape(1, -1),
        size=1,
        name=name,
    )


def _normalize(blocks) -> tuple[ConstraintBlock, ...]:
    out = []
    for b in blocks:
        if isinstance(b, ConstraintBlock):
            out.append(b)
        else:
            fn, grad = b
            out.append(scalar_constraint(fn, grad))
    return tuple(out)


class ConstraintSystem:
    """Differentiable equality (h_i = 0) and inequality (g_j <= 0) constraints.

    Constraints may be supplied as ``(fn, grad)`` pairs or as
    :class:`ConstraintBlock` instances; index sets are fixed at construction
    and evaluation is pure.
    """

    def __init__(self, equalities: Sequence = (), inequalities: Sequence = ()):
        self.equalities = _normalize(equalities)
        self.inequalities = _normalize(inequalities)
        self.n_equalities = sum(b.size for b in self.equalities)
        self.n_inequalities = sum(b.size for b in self.inequalities)

    def _values(self, blocks, x: Array, kind: str) -> Array:
        if not blocks:
            return np.empty(0)
        vals = np.concatenate([np.asarray(b.values(x), dtype=float).ravel()
                               for b in blocks])
        bad = np.flatnonzero(~np.isfinite(vals))
        if bad.size:
            raise EvaluationError(kind, int(bad[0]), "non-finite value")
        return vals

    def _jacobian(self, blocks, x: Array, kind: str) -> Array:
        if not blocks:
            return np.empty((0, x.size))
        rows = np.vstack([np.asarray(b.jacobian(x), dtype=float).reshape(b.size, x.size)
                          for b in blocks])
        bad = np.flatnonzero(~np.isfinite(rows).all(axis=1))
        if bad.size:
            raise EvaluationError(kind, int(bad[0]), "non-finite gradient")
        return rows

    def equality_values(self, x: Array) -> Array:
        return self._values(self.equalities, x, "equality")

    def inequality_values(self, x: Array) -> Array:
        return self._values(self.inequalities, x, "inequality")

    def equality_jacobian(self, x: Array) -> Array:
        return self._jacobian(self.equalities, x, "equality")

    def inequality_jacobian(self, x: Array) -> Array:
        return self._jacobian(self.inequalities, x, "inequality")


@dataclass(frozen=True)
class ViolationSnapshot:
    """Constraint residuals at a point, plus their beta- and inf-norms."""

    h_values: Array
    g_values: Array
    g_plus: Array
    beta: float
    m_beta: float
    m_inf: float

    @property
    def residual_vector(self) -> Array:
        return np.concatenate([self.g_plus, self.h_values])


def residuals(cs: ConstraintSystem, x: Array, beta: float = 2.0) -> ViolationSnapshot:
    """Evaluate all constraint residuals of ``cs`` at ``x``.

    ``m_beta`` is the beta-norm of the stacked vector ``(g_plus, h)`` with
    ``g_plus = max(g, 0)`` componentwise; ``m_inf`` is its max-norm.
    """
    x = as_point(x)
    h = cs.equality_values(x)
    g = cs.inequality_values(x)
    g_plus = np.maximum(g, 0.0)
    stacked = np.concatenate([g_plus, h])
    return ViolationSnapshot(
        h_values=h,
        g_values=g,
        g_plus=g_plus,
        beta=beta,
        m_beta=residual_norm(stacked, beta),
        m_inf=residual_norm(stacked, np.inf),
    )


def violation(cs: ConstraintSystem, x: Array, beta: float = 2.0) -> float:
    """Constraint-violation measure M(x) = ||(g_plus(x), h(x))||_beta."""
    return residuals(cs, x, beta).m_beta


def active_index_sets(cs: ConstraintSystem, x: Array, tol: float = 1e-9):
    """Active max-attaining index sets at ``x``.

    Returns ``(E_active, I_active, I_plus)`` as integer arrays:
    equalities with ``|h_i| >= m_inf - tol``, inequalities with
    ``(g_j)_+ >= m_inf - tol``, and strictly violated inequalities
    ``g_j > tol``. The first two are empty at (tol-)feasible points.
    """
    snap = residuals(cs, x, np.inf)
    i_plus = np.flatnonzero(snap.g_values > tol)
    if snap.m_inf <= tol:
        empty = np.empty(0, dtype=int)
        return empty, empty.copy(), i_plus
    cut = snap.m_inf - tol
    e_active = np.flatnonzero(np.abs(snap.h_values) >= cut)
    i_active = np.flatnonzero(snap.g_plus >= cut)
    return e_active, i_active, i_plus


class FeasibleDomain:
    """Simple convex domain with exact Euclidean projection (sealed variants)."""

    def project(self, x: Array) -> Array:
        raise NotImplementedError

    def contains(self, x: Array, tol: float = 0.0) -> bool:
        raise NotImplementedError


class AllSpace(FeasibleDomain):
    """R^n; projection is the identity."""

    def project(self, x: Array) -> Array:
        return np.asarray(x, dtype=float)

    def contains(self, x: Array, tol: float = 0.0) -> bool:
        return bool(np.all(np.isfinite(x)))

    def __repr__(self):
        return "AllSpace()"


class Box(FeasibleDomain):
    """Axis-aligned box [lower, upper]; projection clamps componentwise."""

    def __init__(self, lower, upper):
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        if self.lower.shape != self.upper.shape:
            raise DomainError("box bounds must have matching shapes")
        if np.any(self.lower > self.upper):
            raise DomainError("box requires lower <= upper componentwise")

    def project(self, x: Array) -> Array:
        return np.clip(x, self.lower, self.upper)

    def contains(self, x: Array, tol: float = 0.0) -> bool:
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def __repr__(self):
        return f"Box({self.lower.tolist()}, {self.upper.tolist()})"


class Ball(FeasibleDomain):
    """Closed Euclidean ball; projection rescales radially."""

    def __init__(self, center, radius: float):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        if not self.radius > 0:
            raise DomainError("ball radius must be positive")

    def project(self, x: Array) -> Array:
        y = np.asarray(x, dtype=float)
        # Re-contract until the rounded result actually lies in the ball, so
        # projection is exactly idempotent despite boundary rounding.
        while True:
            d = y - self.center
            r = float(np.linalg.norm(d))
            if r <= self.radius:
                return y
            y = self.center + d * (self.radius / r)

    def contains(self, x: Array, tol: float = 0.0) -> bool:
        return float(np.linalg.norm(x - self.center)) <= self.radius + tol

    def __repr__(self):
        return f"Ball({self.center.tolist()}, {self.radius})"


def project(domain: FeasibleDomain, x: Array) -> Array:
    """Euclidean projection of ``x`` onto ``domain``."""
    return domain.project(as_point(x))
