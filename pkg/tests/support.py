"""Cross-checks shared by test modules.

Functional values are recomputed here from scratch: the global frame is
expanded into cartesian derivative weights, the face mean is taken by
quadrature, and the cell polynomial is differentiated through the chain
rule.  None of this touches the exact evaluator inside the package, so
agreement is a genuine dual-route check.
"""

import math

import numpy as np

from hmfem.poly import Poly
from hmfem.quadrature import simplex_quadrature


def cell_polynomial(space, u, ci):
    """Float expansion of a coefficient vector on one cell."""
    cls = space.classes[space.cell_class[ci]]
    coeffs = u[space.cell_dofs[ci]] * space.cell_weights[ci]
    v = Poly.zero(space.n)
    for c, p in zip(coeffs, cls.nodal):
        v = v + float(c) * p
    return v


def _cartesian_dirs(cls):
    grad = cls.geometry.grad_bary
    n = len(grad)
    return [[float(grad[i][d]) for i in range(n)] for d in range(n)]


def dof_value_on_cell(space, u, gid, ci):
    """Global functional gid applied to the expansion on cell ci."""
    k, fid, _ = space.dof_keys[gid]
    n, d = space.n, space.n - k
    cls = space.classes[space.cell_class[ci]]
    if d == 0:
        bary = np.ones((1, 1))
        wts = np.ones(1)
    else:
        rule = simplex_quadrature(d, 2 * (space.m + 2))
        bary = rule.points
        wts = rule.weights * math.factorial(d)
    phys = bary @ space.face_points(k, fid)
    base = space.cell_coords[ci][0]
    G = np.array(_cartesian_dirs(cls)).T
    loc = (phys - base) @ G.T
    v = cell_polynomial(space, u, ci)
    dirs = _cartesian_dirs(cls)
    total = 0.0
    for beta, w in space.dof_expansion(gid).items():
        q = v
        for dd, times in enumerate(beta):
            for _ in range(times):
                q = q.directional_diff(dirs[dd])
        total += w * float(wts @ np.atleast_1d(q.evaluate(loc)))
    return total


def functional_spread(space, u, gid):
    """Values of one functional over every incident cell, with their spread."""
    k, fid, _ = space.dof_keys[gid]
    cells = space.mesh.face_cells[k][fid]
    vals = [dof_value_on_cell(space, u, gid, ci) for ci in cells]
    return vals, max(vals) - min(vals)
