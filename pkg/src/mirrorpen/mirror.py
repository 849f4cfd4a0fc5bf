"""Mirror maps, regularizer conjugates, and the Fenchel-coupling diagnostic.

Only the Euclidean regularizer R(x) = (K/2)||x||^2 ships (every experiment
uses the identity mirror); the class is an extension point, not a plugin
system. Its mirror map is the Euclidean projection of y/K.
"""

from __future__ import annotations

import numpy as np

from .problem import Array, DomainError, FeasibleDomain, as_point


class Regularizer:
    """K-strongly convex regularizer (sealed: Euclidean only)."""

    strong_convexity: float

    def value(self, x: Array) -> float:
        raise NotImplementedError


class EuclideanRegularizer(Regularizer):
    """R(x) = (K/2) ||x||_2^2, strongly convex with constant K."""

    def __init__(self, strong_convexity: float = 1.0):
        if not strong_convexity > 0:
            raise ValueError("strong convexity constant must be positive")
        self.strong_convexity = float(strong_convexity)

    def value(self, x: Array) -> float:
        return 0.5 * self.strong_convexity * float(np.dot(x, x))

    def __repr__(self):
        return f"EuclideanRegularizer(K={self.strong_convexity})"


def mirror(y: Array, reg: Regularizer, domain: FeasibleDomain) -> Array:
    """Mirror map: argmax over the domain of <y, x> - R(x).

    For the Euclidean regularizer this is the Euclidean projection of y/K,
    and the identity on all of R^n.
    """
    y = as_point(y)
    return domain.project(y / reg.strong_convexity)


def conjugate(y: Array, reg: Regularizer, domain: FeasibleDomain) -> float:
    """Restricted convex conjugate R*(y) = <y, mirror(y)> - R(mirror(y))."""
    y = as_point(y)
    xhat = mirror(y, reg, domain)
    return float(np.dot(y, xhat)) - reg.value(xhat)


def fenchel(x: Array, y: Array, reg: Regularizer, domain: FeasibleDomain,
            tol: float = 1e-9) -> float:
    """Fenchel coupling F(x, y) = R(x) + R*(y) - <y, x>; nonnegative on the domain."""
    x = as_point(x)
    if not domain.contains(x, tol):
        raise DomainError("fenchel coupling requires x inside the domain")
    return reg.value(x) + conjugate(y, reg, domain) - float(np.dot(y, x))
