"""Global spaces: interelement gluing, boundary sets, and interpolation.

A global degree of freedom is a (codimension, face id, derivative
multi-index) triple; cells sharing the face share the functional because
face frames are built once from global coordinates.  Within each cell the
vertex carrying the distinguished barycentric coordinate of the shape space
is the one with the lowest global id, so cell construction depends only on
the cell's shape, its frames, and that choice; cells agreeing in all three
up to translation share one exactly-built element (a congruence class).

Local degrees of freedom are the global functionals themselves, hence every
local-to-global weight is 1; the weight array is kept anyway as part of the
gluing contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .element import (DofEvaluator, ElementDefinition, SimplexGeometry,
                      UnisolvenceError, dof_layout, enumerate_dofs,
                      linear_form_power_expansion, normal_frame, shape_basis)
from .exact import determinant, invert_dense
from .mesh import SimplicialMesh
from .poly import Poly, multiindices
from .quadrature import simplex_quadrature


class FrameMismatchError(RuntimeError):
    """Raised when a face frame does not span the face's normal space."""


@dataclass
class CellClass:
    """One translation-congruence class of cells, built exactly once."""

    key: tuple
    geometry: SimplexGeometry
    dofs: list
    det: object
    nodal_exact: list[Poly]
    nodal: list[Poly]
    cache: dict = field(default_factory=dict)


class GlobalSpace:
    """The glued space for one element family over one mesh."""

    def __init__(self, element: ElementDefinition, mesh: SimplicialMesh):
        if element.n != mesh.dim:
            raise ValueError("element and mesh dimensions differ")
        self.element = element
        self.mesh = mesh
        self.m = element.m
        self.n = element.n
        self.layout = dof_layout(self.m, self.n)
        self._basis = shape_basis(self.m, self.n)
        self._build_frames()
        self._number_dofs()
        self._build_cells()

    # -- global functionals --------------------------------------------------

    def _build_frames(self):
        mesh = self.mesh
        self.frames = {}
        for k in range(1, self.n + 1):
            for fid, verts in enumerate(mesh.faces[k]):
                pts = [mesh.vertices_exact[v] for v in verts]
                frame = normal_frame(pts)
                if len(frame) != k:
                    raise FrameMismatchError(
                        f"face {verts} produced a deficient frame")
                self.frames[(k, fid)] = frame

    def _number_dofs(self):
        m, n = self.m, self.n
        mesh = self.mesh
        keys = []
        alphas = {}
        for k in range(1, n + 1):
            heads = []
            layer = 0
            while m - layer * n - k >= 0:
                for head in multiindices(k, m - layer * n - k):
                    heads.append(head + (0,) * (n - k))
                layer += 1
            alphas[k] = heads
            for fid in range(mesh.face_count(k)):
                for alpha in heads:
                    keys.append((k, fid, alpha))
        keys.sort()
        self.dof_keys = keys
        self.dof_gid = {key: i for i, key in enumerate(keys)}
        self.ndofs = len(keys)
        self.boundary_dofs = np.array(
            [bool(mesh.face_boundary[k][fid]) for k, fid, _ in keys])

    # -- per-cell construction ----------------------------------------------

    def _cell_local_order(self, cell):
        cell = list(cell)
        return [cell[1], cell[0]] + cell[2:]

    def _build_cells(self):
        m, n = self.m, self.n
        mesh = self.mesh
        faces_local = []
        for k in range(1, n + 1):
            for verts in combinations(range(n + 1), n + 1 - k):
                faces_local.append((k, verts))
        self.classes: list[CellClass] = []
        class_of_key = {}
        ncells = mesh.num_cells
        J = len(self.layout)
        self.cell_dofs = np.zeros((ncells, J), dtype=int)
        self.cell_weights = np.ones((ncells, J))
        self.cell_class = np.zeros(ncells, dtype=int)
        self.cell_vertices = np.zeros((ncells, n + 1), dtype=int)
        for ci, cell in enumerate(mesh.cells):
            local = self._cell_local_order(cell.tolist())
            self.cell_vertices[ci] = local
            pts = [mesh.vertices_exact[v] for v in local]
            base = pts[0]
            offsets = tuple(tuple(x - b for x, b in zip(p, base))
                            for p in pts[1:])
            frame_map = {}
            frame_sig = []
            fid_map = {}
            for k, verts in faces_local:
                gids = tuple(sorted(local[v] for v in verts))
                fid = mesh.face_index[k][gids]
                fid_map[(k, verts)] = fid
                frame = self.frames[(k, fid)]
                frame_map[verts] = frame
                frame_sig.append(frame)
            key = (offsets, tuple(frame_sig))
            idx = class_of_key.get(key)
            if idx is None:
                idx = len(self.classes)
                class_of_key[key] = idx
                self.classes.append(self._build_class(key, pts, frame_map))
            self.cell_class[ci] = idx
            for j, (_, k, verts, alpha) in enumerate(self.layout):
                self.cell_dofs[ci, j] = self.dof_gid[
                    (k, fid_map[(k, verts)], alpha)]
        self.cell_coords = self.mesh.vertices[self.cell_vertices]
        counts = {}
        for idx in self.cell_class:
            counts[idx] = counts.get(idx, 0) + 1
        self.class_sizes = counts

    def _build_class(self, key, pts, frame_map) -> CellClass:
        base = pts[0]
        shifted = [tuple(x - b for x, b in zip(p, base)) for p in pts]
        geometry = SimplexGeometry(shifted, frames=frame_map)
        dofs = enumerate_dofs(self.m, self.n, geometry)
        vander = [[DofEvaluator(d, geometry).of_poly(p) for p in self._basis]
                  for d in dofs]
        det = determinant(vander)
        if not det:
            raise UnisolvenceError("cell class produced a singular element")
        inv = invert_dense(vander)
        nodal_exact = []
        for j in range(len(dofs)):
            p = Poly.zero(self.n)
            for t in range(len(dofs)):
                c = inv[t][j]
                if c:
                    p = p + c * self._basis[t]
            nodal_exact.append(p)
        nodal = [p.to_float() for p in nodal_exact]
        return CellClass(key, geometry, dofs, det, nodal_exact, nodal)

    # -- helpers -------------------------------------------------------------

    def cells_by_class(self):
        out = [[] for _ in self.classes]
        for ci, idx in enumerate(self.cell_class):
            out[idx].append(ci)
        return [np.array(ix, dtype=int) for ix in out]

    def local_coefficients(self, u: np.ndarray) -> np.ndarray:
        return u[self.cell_dofs] * self.cell_weights

    def face_points(self, codim: int, fid: int) -> np.ndarray:
        verts = self.mesh.faces[codim][fid]
        return self.mesh.vertices[list(verts)]

    def dof_expansion(self, gid: int) -> dict:
        """Cartesian derivative expansion of one functional, float weights."""
        cache = getattr(self, "_expansions", None)
        if cache is None:
            cache = self._expansions = {}
        got = cache.get(gid)
        if got is None:
            k, fid, alpha = self.dof_keys[gid]
            frame = self.frames[(k, fid)]
            w = linear_form_power_expansion(frame, alpha[:k], self.n)
            got = {beta: float(c) for beta, c in w.items()}
            cache[gid] = got
        return got


def build_space(element: ElementDefinition, mesh: SimplicialMesh) -> GlobalSpace:
    """Glue the element family over the mesh."""
    return GlobalSpace(element, mesh)


def interpolate(space: GlobalSpace, v, dofs=None) -> np.ndarray:
    """Apply the space's functionals to a smooth function.

    v exposes derivative_values(beta, points) for multi-indices beta of
    order up to m.  Face means use quadrature of exactness 2(m+2), which is
    exact for every function the shape spaces contain.  dofs selects a
    subset of global ids (boundary interpolation); default is all of them.
    """
    if dofs is None:
        sel = np.arange(space.ndofs)
    else:
        sel = np.asarray(dofs, dtype=int)
    out = np.zeros(len(sel))
    n = space.n
    groups = {}
    for pos, gid in enumerate(sel):
        k, fid, alpha = space.dof_keys[gid]
        groups.setdefault((k, sum(alpha)), []).append(pos)
    for (k, s), positions in sorted(groups.items()):
        d = n - k
        if d == 0:
            bary = np.ones((1, 1))
            wts = np.ones(1)
        else:
            rule = simplex_quadrature(d, 2 * (space.m + 2))
            bary = rule.points
            wts = rule.weights * math.factorial(d)
        face_rows = {}
        coords = []
        for pos in positions:
            _, fid, _ = space.dof_keys[sel[pos]]
            if fid not in face_rows:
                face_rows[fid] = len(coords)
                coords.append(space.face_points(k, fid))
        coords = np.array(coords)
        pts = np.einsum("qa,fad->fqd", bary, coords)
        flat = pts.reshape(-1, n)
        means = {}
        for beta in multiindices(n, s):
            vals = np.asarray(v.derivative_values(beta, flat), dtype=float)
            means[beta] = vals.reshape(len(coords), -1) @ wts
        for pos in positions:
            gid = sel[pos]
            _, fid, _ = space.dof_keys[gid]
            row = face_rows[fid]
            total = 0.0
            for beta, w in space.dof_expansion(gid).items():
                total += w * means[beta][row]
            out[pos] = total
    return out


def derivative_change_matrix(frame_a, frame_b, order: int) -> np.ndarray:
    """Matrix taking order-th derivative tuples in frame_a to frame_b ones.

    Both frames must span the same normal space; entry [i, j] multiplies the
    frame_a derivative with multi-index j in the expansion of the frame_b
    derivative with multi-index i.  Exposed for tests; the assembled spaces
    never need it because local and global frames coincide.
    """
    A = np.array(frame_a, dtype=float).T
    B = np.array(frame_b, dtype=float).T
    k = A.shape[1]
    coef, res, rank, _ = np.linalg.lstsq(A, B, rcond=None)
    if rank < k:
        raise FrameMismatchError("frames do not span a common space")
    idx = multiindices(k, order)
    pos = {beta: i for i, beta in enumerate(idx)}
    out = np.zeros((len(idx), len(idx)))
    forms = [list(coef[:, j]) for j in range(k)]
    for i, beta in enumerate(idx):
        expansion = linear_form_power_expansion(forms, beta, k)
        for gamma, w in expansion.items():
            out[i, pos[gamma]] = w
    return out
