"""Manufactured solutions for the two benchmark problems.

Both are derivative providers: objects answering derivative_values(beta,
points) for Cartesian multi-indices beta, which is all interpolation,
boundary data, and error measurement need.
"""

from __future__ import annotations

import math

import numpy as np
from gmpy2 import mpq

from .poly import Poly


class BoundaryEvaluationError(RuntimeError):
    """Raised when a derivative past the regularity of a provider is taken
    at its singular point."""


class PolySolution:
    """Exact Cartesian polynomial as a derivative provider."""

    def __init__(self, poly: Poly):
        self.poly = poly
        self._cache = {}

    @property
    def degree(self) -> int:
        return self.poly.degree()

    def derivative(self, beta) -> Poly:
        beta = tuple(beta)
        got = self._cache.get(beta)
        if got is None:
            p = self.poly
            for var, times in enumerate(beta):
                for _ in range(times):
                    p = p.diff(var)
            got = self._cache[beta] = p.to_float()
        return got

    def derivative_values(self, beta, pts) -> np.ndarray:
        return self.derivative(beta).evaluate(np.asarray(pts, dtype=float))


def _laplacian(p: Poly) -> Poly:
    out = Poly.zero(p.nvars)
    for var in range(p.nvars):
        out = out + p.diff(var).diff(var)
    return out


def example1_solution(m: int) -> PolySolution:
    """Tensor polynomial 2^(4m-6) (x - x^2)^m (y - y^2)^m on the unit square.

    All its derivatives of order below m vanish on the boundary, so the
    2m-th order Dirichlet problem it manufactures has homogeneous data.
    """
    x = Poly.monomial(2, (1, 0))
    y = Poly.monomial(2, (0, 1))
    px = x - x * x
    py = y - y * y
    u = Poly.constant(2, mpq(2) ** (4 * m - 6))
    for _ in range(m):
        u = u * px
    for _ in range(m):
        u = u * py
    return PolySolution(u)


def example1_load(m: int) -> PolySolution:
    """The m-th power of the negative Laplacian of the square's solution."""
    p = example1_solution(m).poly
    for _ in range(m):
        p = _laplacian(p)
    if m % 2:
        p = -p
    return PolySolution(p)


class CornerSingularSolution:
    """Imaginary part of z^(m - 1/2) around a reentrant corner at the origin.

    The function is m-harmonic with zero load; its derivatives follow from
    the holomorphic calculus, d^p_x d^q_y Im f = Im(i^q f^(p+q)).  At the
    origin, derivatives of order below m - 1/2 extend continuously by zero;
    asking for higher ones there raises BoundaryEvaluationError.
    """

    def __init__(self, m: int):
        self.m = m
        self.power = m - 0.5

    def derivative_values(self, beta, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        x = pts[..., 0]
        y = pts[..., 1]
        k = int(sum(beta))
        a = self.power
        c = 1.0
        for t in range(k):
            c *= a - t
        r = np.hypot(x, y)
        theta = np.arctan2(y, x)
        theta = np.where(theta < 0, theta + 2 * np.pi, theta)
        out = np.zeros_like(r)
        origin = r == 0
        if np.any(origin) and k >= self.m:
            raise BoundaryEvaluationError(
                f"derivative of order {k} of r^{a} at the corner")
        live = ~origin
        ang = (a - k) * theta[live] + beta[1] * (np.pi / 2)
        out[live] = c * r[live] ** (a - k) * np.sin(ang)
        return out
