"""Global spaces: numbering, congruence classes, weak continuity,
interpolation, and frame bookkeeping."""

import numpy as np
import pytest
from gmpy2 import mpq

from hmfem import (FrameMismatchError, build_space, error_norms, interpolate,
                   unit_interval_mesh, unit_square_mesh)
from hmfem.element import apply_dof
from hmfem.poly import Poly
from hmfem.problems import PolySolution
from hmfem.space import derivative_change_matrix
from support import dof_value_on_cell, functional_spread


def test_dimension_counts(element12, element22, element32):
    mesh = unit_square_mesh(1)
    assert build_space(element12, mesh).ndofs == 5
    assert build_space(element22, mesh).ndofs == 9
    assert build_space(element32, mesh).ndofs == 18


def test_boundary_functional_counts(element12, element22, element32):
    mesh = unit_square_mesh(1)
    assert build_space(element12, mesh).boundary_dofs.sum() == 4
    assert build_space(element22, mesh).boundary_dofs.sum() == 8
    assert build_space(element32, mesh).boundary_dofs.sum() == 16


def test_gluing_weights_are_identity(space32):
    assert (space32.cell_weights == 1).all()


def test_uniform_mesh_has_two_congruence_classes(space32):
    assert len(space32.classes) == 2
    sizes = sorted(len(ix) for ix in space32.cells_by_class())
    assert sizes == [4, 4]


def test_per_class_duality_is_exact(space32):
    for cls in space32.classes:
        for i, d in enumerate(cls.dofs):
            for j, p in enumerate(cls.nodal_exact):
                assert apply_dof(d, p, cls.geometry) == (1 if i == j else 0)


def test_every_cell_covers_every_global_functional_once(space32):
    seen = np.zeros(space32.ndofs, dtype=int)
    for row in space32.cell_dofs:
        assert len(set(row.tolist())) == len(row)
        seen[row] += 1
    assert (seen >= 1).all()


def test_weak_continuity_of_random_expansions(space32):
    rng = np.random.default_rng(3)
    u = rng.standard_normal(space32.ndofs)
    checked = 0
    for gid in range(space32.ndofs):
        k, fid, _ = space32.dof_keys[gid]
        if space32.mesh.face_boundary[k][fid]:
            continue
        vals, spread = functional_spread(space32, u, gid)
        assert len(vals) >= 2
        assert spread <= 1e-10
        assert abs(vals[0] - u[gid]) <= 1e-9
        checked += 1
    assert checked > 0


def test_boundary_functionals_vanish_after_reduction(space32):
    rng = np.random.default_rng(4)
    u = rng.standard_normal(space32.ndofs)
    u[space32.boundary_dofs] = 0.0
    for gid in np.flatnonzero(space32.boundary_dofs):
        vals, _ = functional_spread(space32, u, gid)
        assert max(abs(v) for v in vals) <= 1e-12


def test_interpolation_reproduces_the_polynomial_space(space32):
    rng = np.random.default_rng(5)
    terms = {}
    for e0 in range(4):
        for e1 in range(4 - e0):
            terms[(e0, e1)] = mpq(int(rng.integers(-3, 4)))
    provider = PolySolution(Poly(2, terms))
    u = interpolate(space32, provider)
    errs = error_norms(space32, u, provider)
    assert all(e <= 1e-10 for e in errs.values())


def test_interpolation_subset_matches_full(space32):
    provider = PolySolution(Poly(2, {(2, 1): mpq(1), (0, 0): mpq(2)}))
    full = interpolate(space32, provider)
    sel = np.flatnonzero(space32.boundary_dofs)
    part = interpolate(space32, provider, dofs=sel)
    assert np.allclose(part, full[sel], atol=1e-13)


def test_functional_expansions(space32):
    mesh = space32.mesh
    # a vertex functional differentiates along the coordinate axes
    for gid, (k, fid, alpha) in enumerate(space32.dof_keys):
        if k == 2 and alpha == (1, 0):
            assert space32.dof_expansion(gid) == {(1, 0): 1.0, (0, 1): 0.0} \
                or space32.dof_expansion(gid) == {(1, 0): 1.0}
            break
    # the diagonal edge from (0,0) to (1/2,1/2) carries the frame (1/2,-1/2)
    fid = mesh.face_index[1][(0, 4)]
    gid = space32.dof_gid[(1, fid, (2, 0))]
    w = space32.dof_expansion(gid)
    assert w[(2, 0)] == pytest.approx(0.25)
    assert w[(1, 1)] == pytest.approx(-0.5)
    assert w[(0, 2)] == pytest.approx(0.25)


def test_dimension_mismatch_raises(element32):
    with pytest.raises(ValueError):
        build_space(element32, unit_interval_mesh(2))


def test_derivative_change_matrix_relates_frames():
    frame_a = ((1.0, 0.0), (0.0, 1.0))
    frame_b = ((1.0, 1.0), (0.0, 2.0))
    order = 2
    M = derivative_change_matrix(frame_a, frame_b, order)
    p = Poly(2, {(2, 1): mpq(1), (1, 0): mpq(-2)})
    pt = np.array([[0.3, 0.4]])

    def frame_derivs(frame):
        from hmfem.poly import multiindices
        out = []
        for beta in multiindices(2, order):
            q = p
            for v, times in zip(frame, beta):
                for _ in range(times):
                    q = q.directional_diff(list(v))
            out.append(float(q.to_float().evaluate(pt)[0]))
        return np.array(out)

    assert np.allclose(M @ frame_derivs(frame_a), frame_derivs(frame_b),
                       atol=1e-12)


def test_derivative_change_matrix_rejects_deficient_frames():
    with pytest.raises(FrameMismatchError):
        derivative_change_matrix(((1.0, 0.0), (2.0, 0.0)),
                                 ((1.0, 0.0), (0.0, 1.0)), 1)
