"""Simplicial elements with face-mean derivative degrees of freedom.

For polynomial order m on an n-simplex the degrees of freedom come in
layers.  Layer ell assigns to each sub-simplex F of codimension k the mean
over F of a mixed normal derivative of order m - ell*n - k, the mixture
running over the first k vectors of a fixed orthogonal frame of F's normal
space.  Codimension n means point evaluation of derivatives at a vertex.
The matching shape space is spanned by all monomials of degree at most m
plus, per layer, antiderivatives of a univariate bubble in the barycentric
coordinate of a distinguished vertex.

Everything here is exact: coordinates, frames, and functional values are
rationals, and unisolvence is certified by a nonzero exact determinant of
the functional-by-basis matrix.  Frames are deterministic but not unit
length (normalizing would leave the rationals), which rescales each
functional by a positive constant and therefore changes neither the span of
the functionals nor unisolvence nor interelement gluing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from gmpy2 import mpq

from .exact import determinant, invert_dense, solve_dense
from .poly import (MultiIndex, Poly, UniPoly, antiderivative, face_mean_monomial,
                   falling, multiindices, multiindices_up_to,
                   solve_univariate_interpolation)


class UnisolvenceError(RuntimeError):
    """Raised when the functional-by-basis matrix is singular."""


class DegenerateSimplexError(ValueError):
    """Raised when vertex coordinates do not span a simplex."""


# ---------------------------------------------------------------------------
# dimension counts


def dim_poly_space(degree: int, n: int) -> int:
    """dim P_degree on an n-simplex, zero for negative degree."""
    if degree < 0:
        return 0
    return math.comb(degree + n, n)


def layer_count(m: int, n: int) -> int:
    return -(-m // n)


def layer_dof_count(m: int, n: int, layer: int) -> int:
    """Number of degrees of freedom one layer contributes, counted directly.

    Codimension k supplies one functional per codim-k face and per
    multi-index of order m - layer*n - k in k slots.  Summed over layers
    this telescopes to the count_dofs closed form.
    """
    rem = m - layer * n
    total = 0
    for k in range(1, min(n, rem) + 1):
        total += math.comb(n + 1, k) * math.comb(rem - 1, k - 1)
    return total


def count_dofs(m: int, n: int) -> int:
    """Total degree-of-freedom count, which equals the shape space dimension."""
    total = dim_poly_space(m, n)
    for layer in range(1, layer_count(m, n)):
        rem = m - layer * n
        total += dim_poly_space(rem, n) - dim_poly_space(rem - 1, n)
    return total


# ---------------------------------------------------------------------------
# geometry: simplices, faces, normal frames


def _dot(u, v):
    return sum((a * b for a, b in zip(u, v)), mpq(0))


def normal_frame(points) -> tuple:
    """Orthogonal rational basis of the normal space of an affine face.

    points are the face's vertex coordinates.  Each canonical axis vector in
    turn is projected onto the orthogonal complement of the face's tangent
    space, then orthogonalized against the normals already accepted; nonzero
    survivors are kept with their first nonzero component made positive.
    The construction depends only on the affine span, so every cell meeting
    the face reproduces the identical frame.
    """
    n = len(points[0])
    d = len(points) - 1
    k = n - d
    if k == 0:
        return ()
    tangents = [tuple(b - a for a, b in zip(points[0], p)) for p in points[1:]]
    gram = [[_dot(ti, tj) for tj in tangents] for ti in tangents]
    frame = []
    for axis in range(n):
        w = [mpq(1) if i == axis else mpq(0) for i in range(n)]
        if tangents:
            rhs = [_dot(t, w) for t in tangents]
            try:
                coef = solve_dense(gram, rhs)
            except Exception as err:
                raise DegenerateSimplexError("face tangents are dependent") from err
            for c, t in zip(coef, tangents):
                if c:
                    w = [wi - c * ti for wi, ti in zip(w, t)]
        for nu in frame:
            c = _dot(w, nu) / _dot(nu, nu)
            if c:
                w = [wi - c * ni for wi, ni in zip(w, nu)]
        if any(w):
            lead = next(x for x in w if x)
            if lead < 0:
                w = [-x for x in w]
            frame.append(tuple(w))
            if len(frame) == k:
                return tuple(frame)
    raise DegenerateSimplexError("normal space has too small a dimension")


def _unit(frame) -> tuple:
    out = []
    for nu in frame:
        v = [float(x) for x in nu]
        s = math.sqrt(sum(x * x for x in v))
        out.append(tuple(x / s for x in v))
    return tuple(out)


@dataclass(frozen=True)
class SubSimplexRef:
    """A sub-simplex of a cell together with its normal frame.

    vertices are local vertex indices in increasing order, frame holds the
    codim exact orthogonal normal vectors and unit_frame their normalized
    float versions.
    """

    codim: int
    vertices: tuple[int, ...]
    measure: float
    frame: tuple
    unit_frame: tuple


@dataclass(frozen=True)
class DofDescriptor:
    """One degree of freedom: a face, a layer, and a derivative multi-index.

    alpha has one slot per space dimension; only the leading codim entries
    may be nonzero and alpha[j] counts derivatives along frame vector j.
    The derivative order is m - layer*n - codim.
    """

    face: SubSimplexRef
    layer: int
    alpha: MultiIndex

    @property
    def order(self) -> int:
        return sum(self.alpha)


class SimplexGeometry:
    """Exact coordinates of a simplex with gradients and face frames."""

    __slots__ = ("dim", "points", "grad_bary", "volume", "frames")

    def __init__(self, points, frames=None):
        points = tuple(tuple(mpq(x) for x in p) for p in points)
        n = len(points) - 1
        if any(len(p) != n for p in points):
            raise DegenerateSimplexError("vertex count does not match dimension")
        self.dim = n
        self.points = points
        edges = [[points[j + 1][i] - points[0][i] for j in range(n)]
                 for i in range(n)]
        det = determinant(edges)
        if not det:
            raise DegenerateSimplexError("zero volume simplex")
        self.volume = abs(det) / math.factorial(n)
        inv = invert_dense(edges)
        # row i is the gradient of the barycentric coordinate of vertex i+1
        self.grad_bary = [tuple(inv[i]) for i in range(n)]
        self.frames = dict(frames) if frames else {}

    @classmethod
    def reference(cls, n: int) -> "SimplexGeometry":
        pts = [tuple(mpq(0) for _ in range(n))]
        for i in range(n):
            pts.append(tuple(mpq(1) if j == i else mpq(0) for j in range(n)))
        return cls(pts)

    def frame_of(self, vertices: tuple[int, ...]) -> tuple:
        verts = tuple(sorted(vertices))
        got = self.frames.get(verts)
        if got is None:
            got = normal_frame([self.points[v] for v in verts])
            self.frames[verts] = got
        return got

    def subsimplex(self, vertices) -> SubSimplexRef:
        verts = tuple(sorted(vertices))
        d = len(verts) - 1
        codim = self.dim - d
        pts = [self.points[v] for v in verts]
        if d == 0:
            measure = 1.0
        else:
            tang = [tuple(b - a for a, b in zip(pts[0], p)) for p in pts[1:]]
            gram = [[_dot(ti, tj) for tj in tang] for ti in tang]
            measure = math.sqrt(float(determinant(gram))) / math.factorial(d)
        frame = self.frame_of(verts)
        return SubSimplexRef(codim, verts, measure, frame, _unit(frame))


# ---------------------------------------------------------------------------
# degree-of-freedom enumeration


def dof_layout(m: int, n: int) -> list[tuple]:
    """Geometry-free enumeration (layer, codim, face vertices, alpha).

    Ordered by layer, then codimension, then face vertex tuple, then alpha,
    all ascending; this fixes the local numbering used everywhere else.
    """
    out = []
    for layer in range(layer_count(m, n)):
        rem = m - layer * n
        for k in range(1, min(n, rem) + 1):
            s = rem - k
            for face in combinations(range(n + 1), n + 1 - k):
                for head in multiindices(k, s):
                    out.append((layer, k, face, head + (0,) * (n - k)))
    return out


def enumerate_dofs(m: int, n: int, geometry: SimplexGeometry | None = None):
    """Degrees of freedom bound to a concrete simplex (reference by default)."""
    if geometry is None:
        geometry = SimplexGeometry.reference(n)
    refs = {}
    dofs = []
    for layer, k, face, alpha in dof_layout(m, n):
        ref = refs.get(face)
        if ref is None:
            ref = geometry.subsimplex(face)
            refs[face] = ref
        dofs.append(DofDescriptor(ref, layer, alpha))
    return dofs


# ---------------------------------------------------------------------------
# functional evaluation


def linear_form_power_expansion(forms, powers, nvars: int) -> dict:
    """Expand prod_j (sum_i c_{j,i} D_i)^{p_j} over commuting symbols D_i.

    Returns a dict from derivative multi-index to coefficient.  The seed
    coefficient is the integer 1 so the scalar kind of the forms (rational
    or float) propagates unmixed.
    """
    weights = {(0,) * nvars: 1}
    for coeffs, p in zip(forms, powers):
        for _ in range(p):
            nxt = {}
            for beta, w in weights.items():
                for i, c in enumerate(coeffs):
                    if c:
                        key = beta[:i] + (beta[i] + 1,) + beta[i + 1:]
                        prev = nxt.get(key)
                        add = w * c
                        nxt[key] = add if prev is None else prev + add
            weights = nxt
    return weights


class DofEvaluator:
    """Applies one degree of freedom to polynomials, exactly.

    The frame derivative is expanded through the chain rule into partials in
    the barycentric variables; each partial of a monomial restricts to the
    face with a falling-factorial coefficient and integrates to a closed-form
    mean.  Monomial values are memoized across polynomials.
    """

    __slots__ = ("nvars", "weights", "live", "face_dim", "_memo")

    def __init__(self, dof: DofDescriptor, geometry: SimplexGeometry):
        n = geometry.dim
        grad = geometry.grad_bary
        forms = [[_dot(grad[i], nu) for i in range(n)] for nu in dof.face.frame]
        self.nvars = n
        self.weights = linear_form_power_expansion(forms, dof.alpha, n)
        self.live = frozenset(v - 1 for v in dof.face.vertices if v >= 1)
        self.face_dim = n - dof.face.codim
        self._memo = {}

    def monomial(self, expo: MultiIndex):
        got = self._memo.get(expo)
        if got is not None:
            return got
        total = mpq(0)
        for beta, w in self.weights.items():
            coeff = 1
            for g, b in zip(expo, beta):
                if b:
                    coeff *= falling(g, b)
                    if not coeff:
                        break
            if not coeff:
                continue
            rest = tuple(g - b for g, b in zip(expo, beta))
            if any(r and i not in self.live for i, r in enumerate(rest)):
                continue
            total += w * coeff * face_mean_monomial(rest, self.face_dim)
        self._memo[expo] = total
        return total

    def of_poly(self, p: Poly):
        total = 0
        for expo, c in p.terms.items():
            v = self.monomial(expo)
            if v:
                total = total + c * (float(v) if isinstance(c, float) else v)
        return total


def apply_dof(dof: DofDescriptor, p: Poly, geometry: SimplexGeometry):
    """Value of one degree of freedom on a polynomial over a given simplex."""
    return DofEvaluator(dof, geometry).of_poly(p)


# ---------------------------------------------------------------------------
# bubbles and the shape space


def compute_bubble(layer: int, n: int) -> UniPoly:
    """Monic univariate bubble of degree layer*(n+1).

    It has a zero of order layer*n at 0 and vanishing derivatives of orders
    0, n, ..., (layer-1)*n at 1; subtracting the interpolant of x^deg on
    those homogeneous conditions from x^deg realizes it.
    """
    deg = layer * (n + 1)
    left = layer * n
    right = [j * n for j in range(layer)]
    rhs = [0] * left + [falling(deg, j) for j in right]
    p = solve_univariate_interpolation(left, layer, right, rhs)
    coeffs = [-c for c in p.coeffs]
    coeffs += [mpq(0)] * (deg + 1 - len(coeffs))
    coeffs[deg] = mpq(1)
    return UniPoly(coeffs)


def check_bubble_property(b: UniPoly, n: int):
    """Exact integral over (0,1) of (1-t)^(n-1) b(t); nonzero by design."""
    total = mpq(0)
    for j in range(n):
        sign = -1 if j % 2 else 1
        w = sign * math.comb(n - 1, j)
        for i, c in enumerate(b.coeffs):
            total += w * mpq(c) / (i + j + 1)
    return total


def shape_basis(m: int, n: int) -> list[Poly]:
    """Monomials of degree at most m plus layered bubble antiderivatives.

    The bubble of layer ell is composed with the barycentric coordinate of
    vertex 1 and integrated once per entry of every multi-index of order
    m - ell*n, which tops the polynomial degree up to m + ell.
    """
    basis = [Poly.monomial(n, e) for e in multiindices_up_to(n, m)]
    for layer in range(1, layer_count(m, n)):
        bubble = compute_bubble(layer, n).compose_bary(0, n)
        for alpha in multiindices(n, m - layer * n):
            basis.append(antiderivative(bubble, alpha))
    return basis


# ---------------------------------------------------------------------------
# element construction and certification


def vandermonde_matrix(dofs, basis, geometry: SimplexGeometry):
    """Exact matrix of functional values, row per dof, column per basis poly."""
    rows = []
    for dof in dofs:
        ev = DofEvaluator(dof, geometry)
        rows.append([ev.of_poly(p) for p in basis])
    return rows


@dataclass
class ElementDefinition:
    """A certified element on the reference simplex."""

    m: int
    n: int
    dofs: list[DofDescriptor]
    basis: list[Poly]
    vander: list
    det: object
    nodal_basis: list[Poly]
    bubbles: list[UniPoly]


@dataclass
class ElementCertificate:
    """Exact evidence that one (m, n) element is unisolvent."""

    m: int
    n: int
    num_dofs: int
    space_dim: int
    det: object
    bubble_integrals: list


def element_certificate(m: int, n: int) -> ElementCertificate:
    """Certify unisolvence without inverting the functional matrix."""
    geometry = SimplexGeometry.reference(n)
    dofs = enumerate_dofs(m, n, geometry)
    basis = shape_basis(m, n)
    expected = count_dofs(m, n)
    if len(dofs) != expected or len(basis) != expected:
        raise UnisolvenceError(
            f"count mismatch for m={m}, n={n}: "
            f"{len(dofs)} dofs, {len(basis)} basis, formula {expected}")
    det = determinant(vandermonde_matrix(dofs, basis, geometry))
    if not det:
        raise UnisolvenceError(f"singular functional matrix for m={m}, n={n}")
    bubbles = [compute_bubble(layer, n) for layer in range(1, layer_count(m, n))]
    values = [check_bubble_property(b, n) for b in bubbles]
    if any(not v for v in values):
        raise UnisolvenceError(f"degenerate bubble for m={m}, n={n}")
    return ElementCertificate(m, n, len(dofs), len(basis), det, values)


def build_element(m: int, n: int) -> ElementDefinition:
    """Build the reference element, certify it, and invert for a nodal basis."""
    geometry = SimplexGeometry.reference(n)
    dofs = enumerate_dofs(m, n, geometry)
    basis = shape_basis(m, n)
    expected = count_dofs(m, n)
    if len(dofs) != expected or len(basis) != expected:
        raise UnisolvenceError(
            f"count mismatch for m={m}, n={n}: "
            f"{len(dofs)} dofs, {len(basis)} basis, formula {expected}")
    vander = vandermonde_matrix(dofs, basis, geometry)
    det = determinant(vander)
    if not det:
        raise UnisolvenceError(f"singular functional matrix for m={m}, n={n}")
    coeffs = invert_dense(vander)
    nodal = []
    for j in range(expected):
        p = Poly.zero(n)
        for t in range(expected):
            c = coeffs[t][j]
            if c:
                p = p + c * basis[t]
        nodal.append(p)
    bubbles = [compute_bubble(layer, n) for layer in range(1, layer_count(m, n))]
    return ElementDefinition(m, n, dofs, basis, vander, det, nodal, bubbles)
