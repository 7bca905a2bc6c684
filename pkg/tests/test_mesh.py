"""Mesh generators, incidence tables, refinement, and the text format."""

import numpy as np
import pytest
from gmpy2 import mpq

from hmfem.mesh import (InvalidDivisionsError, MeshConformityError,
                        MeshFormatError, SimplicialMesh,
                        UnsupportedDimensionError, l_shape_mesh, read_mesh,
                        uniform_refine, unit_cube_mesh, unit_interval_mesh,
                        unit_square_mesh, write_mesh)


def test_square_tables():
    mesh = unit_square_mesh(2)
    assert mesh.num_vertices == 9
    assert mesh.num_cells == 8
    assert mesh.face_count(1) == 16
    assert mesh.boundary_face_count(1) == 8
    assert mesh.boundary_face_count(2) == 8
    # Euler characteristic of a disk
    assert mesh.num_vertices - mesh.face_count(1) + mesh.num_cells == 1
    assert sum(mesh.cell_volumes_exact) == 1


def test_square_metrics():
    mesh = unit_square_mesh(4)
    assert mesh.h == pytest.approx(np.sqrt(2) / 4)
    assert mesh.quasi_uniformity == pytest.approx(1.0)
    assert np.allclose(mesh.cell_diameters, mesh.h)


def test_interval_mesh():
    mesh = unit_interval_mesh(4)
    assert mesh.num_vertices == 5
    assert mesh.num_cells == 4
    # codimension-1 faces of an interval mesh are its vertices
    assert mesh.face_count(1) == 5
    assert mesh.boundary_face_count(1) == 2
    assert sum(mesh.cell_volumes_exact) == 1


def test_cube_mesh():
    mesh = unit_cube_mesh(1)
    assert mesh.num_vertices == 8
    assert mesh.num_cells == 6
    assert sum(mesh.cell_volumes_exact) == 1
    assert mesh.boundary_face_count(1) == 12
    mesh2 = unit_cube_mesh(2)
    assert mesh2.num_vertices == 27
    assert mesh2.num_cells == 48
    assert sum(mesh2.cell_volumes_exact) == 1


def test_l_shape_tables():
    mesh = l_shape_mesh(2)
    assert mesh.num_vertices == 21
    assert mesh.num_cells == 24
    assert mesh.boundary_face_count(1) == 16
    assert mesh.num_vertices - mesh.face_count(1) + mesh.num_cells == 1
    # three quadrants of the [-1, 1] square
    assert sum(mesh.cell_volumes_exact) == 3


def test_l_shape_keeps_reentrant_corner():
    mesh = l_shape_mesh(2)
    coords = {tuple(p) for p in mesh.vertices_exact}
    assert (mpq(0), mpq(0)) in coords
    assert all(not (x > 0 and y < 0) for x, y in coords)


def test_invalid_divisions():
    with pytest.raises(InvalidDivisionsError):
        unit_square_mesh(0)
    with pytest.raises(InvalidDivisionsError):
        l_shape_mesh(3)
    with pytest.raises(InvalidDivisionsError):
        l_shape_mesh(0)
    with pytest.raises(InvalidDivisionsError):
        unit_interval_mesh(-1)


def test_refine_square_matches_finer_generator():
    fine = uniform_refine(unit_square_mesh(2))
    direct = unit_square_mesh(4)
    assert fine.num_cells == 32
    assert fine.num_vertices == 25
    assert set(fine.vertices_exact) == set(direct.vertices_exact)
    assert sum(fine.cell_volumes_exact) == 1


def test_refine_interval():
    fine = uniform_refine(unit_interval_mesh(2))
    assert fine.num_cells == 4
    assert set(fine.vertices_exact) == set(unit_interval_mesh(4).vertices_exact)


def test_refine_rejects_3d():
    with pytest.raises(UnsupportedDimensionError):
        uniform_refine(unit_cube_mesh(1))


def test_conformity_check():
    pts = [(0, 0), (1, 0), (0, 1), (1, 1), (0.5, -1)]
    cells = [(0, 1, 2), (0, 1, 3), (0, 1, 4)]
    with pytest.raises(MeshConformityError):
        SimplicialMesh(2, pts, cells)


def test_flat_cell_rejected():
    from hmfem.element import DegenerateSimplexError
    with pytest.raises(DegenerateSimplexError):
        SimplicialMesh(2, [(0, 0), (1, 0), (2, 0)], [(0, 1, 2)])


def test_io_roundtrip_is_stable(tmp_path):
    mesh = l_shape_mesh(2)
    p1 = tmp_path / "a.mesh"
    p2 = tmp_path / "b.mesh"
    write_mesh(mesh, p1)
    back = read_mesh(p1)
    assert back.dim == mesh.dim
    assert back.num_vertices == mesh.num_vertices
    assert (back.cells == mesh.cells).all()
    assert np.allclose(back.vertices, mesh.vertices)
    write_mesh(back, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_read_mesh_rejects_malformed(tmp_path):
    p = tmp_path / "bad.mesh"
    p.write_text("2 3 1\n0 0\n1 0\n")
    with pytest.raises(MeshFormatError):
        read_mesh(p)


def test_vertices_are_exact_rationals():
    xs = {p[0] for p in l_shape_mesh(4).vertices_exact}
    assert mpq(-1, 2) in xs
    assert mpq(-3, 4) in xs
    assert all(isinstance(x, type(mpq(0))) for x in xs)
