"""Quadrature on reference simplices via collapsed Gauss-Legendre products.

Rules report barycentric points and weights summing to the reference
measure 1/n!.  For n >= 2 the simplex is the collapsed image of the unit
cube (each successive coordinate scaled by what is left of the first ones),
so a tensor Gauss rule with enough points per direction integrates any
polynomial of the requested degree exactly; the collapse raises the
per-direction degree by at most n - 1, which the point count accounts for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class UnsupportedDegreeError(ValueError):
    """Raised for exactness degrees beyond the supported table."""


MAX_DEGREE = 30


@dataclass(frozen=True)
class QuadratureRule:
    dim: int
    degree: int
    points: np.ndarray
    weights: np.ndarray


def _gauss01(npts: int):
    x, w = np.polynomial.legendre.leggauss(npts)
    return (x + 1) / 2, w / 2


@lru_cache(maxsize=None)
def simplex_quadrature(n: int, degree: int) -> QuadratureRule:
    """Rule on the reference n-simplex exact for total degree <= degree."""
    if n < 1 or degree < 0:
        raise UnsupportedDegreeError("dimension or degree out of range")
    if n == 1:
        x, w = _gauss01(degree // 2 + 1)
        pts = np.stack([1 - x, x], axis=1)
        return QuadratureRule(1, degree, pts, w)
    if n > 3:
        raise UnsupportedDegreeError("rules cover n <= 3")
    if degree > MAX_DEGREE:
        raise UnsupportedDegreeError(f"degree {degree} exceeds {MAX_DEGREE}")
    npts = -(-(degree + n) // 2)
    x, w = _gauss01(npts)
    if n == 2:
        u, v = np.meshgrid(x, x, indexing="ij")
        wu, wv = np.meshgrid(w, w, indexing="ij")
        x1 = u
        x2 = v * (1 - u)
        wt = wu * wv * (1 - u)
    else:
        u, v, s = np.meshgrid(x, x, x, indexing="ij")
        wu, wv, ws = np.meshgrid(w, w, w, indexing="ij")
        x1 = u
        x2 = v * (1 - u)
        x3 = s * (1 - u) * (1 - v)
        wt = wu * wv * ws * (1 - u) ** 2 * (1 - v)
    coords = [c.ravel() for c in ([x1, x2] if n == 2 else [x1, x2, x3])]
    pts = np.stack([1 - sum(coords)] + coords, axis=1)
    return QuadratureRule(n, degree, pts, wt.ravel())
