"""Conforming simplicial meshes with exact vertices and sub-simplex tables.

Vertices are kept twice: an exact rational copy that feeds element
construction (frames and functional matrices stay exact) and a float copy
for quadrature work.  Cells are stored with vertex ids ascending, and every
sub-simplex of every codimension gets a global id so that degrees of
freedom can be glued across cells.
"""

from __future__ import annotations

import math
from itertools import combinations, permutations

import numpy as np
from gmpy2 import mpq

from .element import DegenerateSimplexError
from .exact import determinant


class InvalidDivisionsError(ValueError):
    """Raised for division counts a generator cannot honor."""


class UnsupportedDimensionError(ValueError):
    """Raised when an operation is not implemented for the mesh dimension."""


class MeshFormatError(ValueError):
    """Raised when a mesh file does not parse."""


class MeshConformityError(ValueError):
    """Raised when cells do not meet face to face."""


class SimplicialMesh:
    """A simplicial mesh; construction builds and validates all tables."""

    def __init__(self, dim: int, vertices, cells):
        self.dim = dim
        self.vertices_exact = tuple(tuple(mpq(x) for x in p) for p in vertices)
        if any(len(p) != dim for p in self.vertices_exact):
            raise MeshFormatError("vertex coordinate length mismatch")
        self.vertices = np.array(
            [[float(x) for x in p] for p in self.vertices_exact], dtype=float)
        cells = [tuple(sorted(int(v) for v in c)) for c in cells]
        if any(len(c) != dim + 1 or len(set(c)) != dim + 1 for c in cells):
            raise MeshFormatError("cell vertex count mismatch")
        self.cells = np.array(cells, dtype=int)
        self._validate_volumes()
        self._build_tables()
        self._metrics()

    # -- construction helpers ------------------------------------------------

    def _validate_volumes(self):
        n = self.dim
        vols = []
        for cell in self.cells:
            pts = [self.vertices_exact[v] for v in cell]
            edges = [[pts[j + 1][i] - pts[0][i] for j in range(n)]
                     for i in range(n)]
            det = determinant(edges)
            if not det:
                raise DegenerateSimplexError("mesh contains a flat cell")
            vols.append(abs(det) / math.factorial(n))
        self.cell_volumes_exact = vols
        self.cell_volumes = np.array([float(v) for v in vols])

    def _build_tables(self):
        n = self.dim
        self.faces = {}
        self.face_index = {}
        self.face_cells = {}
        for k in range(1, n + 1):
            index = {}
            faces = []
            incident = []
            for ci, cell in enumerate(self.cells):
                for verts in combinations(cell.tolist(), n + 1 - k):
                    fid = index.get(verts)
                    if fid is None:
                        fid = len(faces)
                        index[verts] = fid
                        faces.append(verts)
                        incident.append([])
                    incident[fid].append(ci)
            self.faces[k] = faces
            self.face_index[k] = index
            self.face_cells[k] = incident
        counts = [len(c) for c in self.face_cells[1]]
        if any(c not in (1, 2) for c in counts):
            raise MeshConformityError("a facet is shared by more than two cells")
        self.face_boundary = {
            1: np.array([c == 1 for c in counts], dtype=bool)}
        boundary_facets = [self.faces[1][f] for f in range(len(counts))
                          if counts[f] == 1]
        for k in range(2, n + 1):
            flags = np.zeros(len(self.faces[k]), dtype=bool)
            for facet in boundary_facets:
                for verts in combinations(facet, n + 1 - k):
                    flags[self.face_index[k][verts]] = True
            self.face_boundary[k] = flags

    def _metrics(self):
        pts = self.vertices[self.cells]
        diam = np.zeros(len(self.cells))
        for i, j in combinations(range(self.dim + 1), 2):
            d = np.linalg.norm(pts[:, i] - pts[:, j], axis=1)
            diam = np.maximum(diam, d)
        self.cell_diameters = diam
        self.h = float(diam.max())
        self.quasi_uniformity = float(self.h / diam.min())

    # -- queries -------------------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_cells(self) -> int:
        return len(self.cells)

    def face_count(self, codim: int) -> int:
        return len(self.faces[codim])

    def boundary_face_count(self, codim: int) -> int:
        return int(self.face_boundary[codim].sum())


# ---------------------------------------------------------------------------
# generators


def unit_interval_mesh(divisions: int) -> SimplicialMesh:
    """Uniform mesh of (0, 1) with the given number of cells."""
    if divisions < 1:
        raise InvalidDivisionsError("need at least one division")
    verts = [(mpq(i, divisions),) for i in range(divisions + 1)]
    cells = [(i, i + 1) for i in range(divisions)]
    return SimplicialMesh(1, verts, cells)


def unit_square_mesh(divisions: int) -> SimplicialMesh:
    """Criss-cross-free uniform triangulation of the unit square.

    Each of divisions^2 small squares is split along its lower-left to
    upper-right diagonal, giving two congruence classes of cells.
    """
    if divisions < 1:
        raise InvalidDivisionsError("need at least one division")
    d = divisions
    verts = [(mpq(i, d), mpq(j, d)) for j in range(d + 1) for i in range(d + 1)]

    def vid(i, j):
        return j * (d + 1) + i

    cells = []
    for j in range(d):
        for i in range(d):
            ll, lr = vid(i, j), vid(i + 1, j)
            ul, ur = vid(i, j + 1), vid(i + 1, j + 1)
            cells.append((ll, lr, ur))
            cells.append((ll, ur, ul))
    return SimplicialMesh(2, verts, cells)


def l_shape_mesh(divisions: int) -> SimplicialMesh:
    """Uniform triangulation of (-1,1)^2 with the closed quadrant
    [0,1) x (-1,0] removed, the reentrant corner sitting at the origin.

    divisions counts subdivisions per unit length and must be even so the
    three unit squares refine compatibly; diagonals run lower-left to
    upper-right as in unit_square_mesh.
    """
    d = divisions
    if d < 2 or d % 2:
        raise InvalidDivisionsError("divisions must be even and at least 2")
    keep = {}
    order = []
    for j in range(2 * d + 1):
        for i in range(2 * d + 1):
            x = mpq(i, d) - 1
            y = mpq(j, d) - 1
            if x > 0 and y < 0:
                continue
            keep[(i, j)] = len(order)
            order.append((x, y))
    cells = []
    for j in range(2 * d):
        for i in range(2 * d):
            x0 = mpq(i, d) - 1
            y0 = mpq(j, d) - 1
            if x0 >= 0 and y0 < 0:
                continue
            ll = keep[(i, j)]
            lr = keep[(i + 1, j)]
            ul = keep[(i, j + 1)]
            ur = keep[(i + 1, j + 1)]
            cells.append((ll, lr, ur))
            cells.append((ll, ur, ul))
    return SimplicialMesh(2, order, cells)


def unit_cube_mesh(divisions: int) -> SimplicialMesh:
    """Uniform triangulation of the unit cube into path tetrahedra.

    Every small cube is cut into the six tetrahedra traced by monotone
    lattice paths, which match across cube faces without extra vertices.
    """
    if divisions < 1:
        raise InvalidDivisionsError("need at least one division")
    d = divisions
    verts = [(mpq(i, d), mpq(j, d), mpq(k, d))
             for k in range(d + 1) for j in range(d + 1) for i in range(d + 1)]

    def vid(i, j, k):
        return (k * (d + 1) + j) * (d + 1) + i

    axes = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    cells = []
    for k in range(d):
        for j in range(d):
            for i in range(d):
                for perm in permutations(range(3)):
                    p = (i, j, k)
                    tet = [vid(*p)]
                    for a in perm:
                        p = tuple(x + y for x, y in zip(p, axes[a]))
                        tet.append(vid(*p))
                    cells.append(tuple(tet))
    return SimplicialMesh(3, verts, cells)


# ---------------------------------------------------------------------------
# refinement


def uniform_refine(mesh: SimplicialMesh) -> SimplicialMesh:
    """Split every cell through edge midpoints (dimensions 1 and 2)."""
    if mesh.dim == 1:
        verts = list(mesh.vertices_exact)
        cells = []
        for a, b in mesh.cells:
            mid = len(verts)
            verts.append(((verts[a][0] + verts[b][0]) / 2,))
            cells.append((a, mid))
            cells.append((mid, b))
        return SimplicialMesh(1, verts, cells)
    if mesh.dim == 2:
        verts = list(mesh.vertices_exact)
        base = len(verts)
        for a, b in mesh.faces[1]:
            pa, pb = verts[a], verts[b]
            verts.append(tuple((x + y) / 2 for x, y in zip(pa, pb)))
        mid = mesh.face_index[1]
        cells = []
        for v0, v1, v2 in mesh.cells:
            m01 = base + mid[(v0, v1)]
            m02 = base + mid[(v0, v2)]
            m12 = base + mid[(v1, v2)]
            cells.extend([(v0, m01, m02), (v1, m01, m12),
                          (v2, m02, m12), (m01, m02, m12)])
        return SimplicialMesh(2, verts, cells)
    raise UnsupportedDimensionError("uniform refinement only covers n <= 2")


# ---------------------------------------------------------------------------
# plain text input and output


def write_mesh(mesh: SimplicialMesh, path) -> None:
    """Write 'n V C', V coordinate lines, then C vertex-id lines."""
    lines = [f"{mesh.dim} {mesh.num_vertices} {mesh.num_cells}"]
    for p in mesh.vertices:
        lines.append(" ".join(f"{x:.17g}" for x in p))
    for c in mesh.cells:
        lines.append(" ".join(str(v) for v in c))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_mesh(path) -> SimplicialMesh:
    """Inverse of write_mesh; float coordinates are adopted exactly."""
    with open(path) as fh:
        tokens = fh.read().split("\n")
    tokens = [t for t in (line.strip() for line in tokens) if t]
    try:
        dim, nv, nc = (int(x) for x in tokens[0].split())
        if len(tokens) != 1 + nv + nc:
            raise MeshFormatError(f"expected {nv} vertex and {nc} cell lines")
        verts = []
        for line in tokens[1:1 + nv]:
            xs = [mpq(float(x)) for x in line.split()]
            if len(xs) != dim:
                raise MeshFormatError("wrong coordinate count")
            verts.append(tuple(xs))
        cells = []
        for line in tokens[1 + nv:]:
            vs = [int(x) for x in line.split()]
            if len(vs) != dim + 1 or not all(0 <= v < nv for v in vs):
                raise MeshFormatError("bad cell line")
            cells.append(tuple(vs))
    except MeshFormatError:
        raise
    except Exception as err:
        raise MeshFormatError(f"unparseable mesh file: {err}") from err
    return SimplicialMesh(dim, verts, cells)
