"""Polynomial algebra in the independent barycentric variables of a simplex.

A polynomial on an n-simplex is stored over n variables, variable i holding
the barycentric coordinate of vertex i+1.  The coordinate of vertex 0 is
eliminated as one minus the sum of the others before anything is stored, so
every polynomial has a unique sparse representation and the layerwise
antiderivative (integrating a monomial in one barycentric variable from 0)
acts term by term.

Coefficients are either exact rationals (gmpy2.mpq) or floats.  The exact
instantiation backs element construction and certification; the float one is
for mesh-level evaluation.  The two kinds are never mixed inside one
polynomial.
"""

from __future__ import annotations

import math
from itertools import combinations_with_replacement

import numpy as np
from gmpy2 import mpq

from .exact import SingularMatrixError, solve_dense

MultiIndex = tuple[int, ...]


class SingularSystemError(RuntimeError):
    """Raised when a univariate interpolation system is singular."""


# ---------------------------------------------------------------------------
# multi-index helpers


def total_order(alpha: MultiIndex) -> int:
    return sum(alpha)


def index_count(nvars: int, degree: int) -> int:
    """Number of multi-indices in nvars variables of total order exactly degree."""
    if degree < 0:
        return 0
    return math.comb(degree + nvars - 1, nvars - 1)


def multiindices(nvars: int, degree: int) -> list[MultiIndex]:
    """All multi-indices of total order exactly degree, lexicographic."""
    if nvars == 0:
        return [()] if degree == 0 else []
    out = []
    for bars in combinations_with_replacement(range(degree + 1), nvars - 1):
        cuts = (0,) + bars + (degree,)
        out.append(tuple(cuts[i + 1] - cuts[i] for i in range(nvars)))
    out.sort()
    return out


def multiindices_up_to(nvars: int, degree: int) -> list[MultiIndex]:
    """All multi-indices of total order at most degree, by order then lex."""
    out = []
    for d in range(degree + 1):
        out.extend(multiindices(nvars, d))
    return out


def in_leading_block(alpha: MultiIndex, k: int) -> bool:
    """True when only the first k entries of alpha may be nonzero."""
    return all(a == 0 for a in alpha[k:])


def multi_factorial(alpha: MultiIndex) -> int:
    out = 1
    for a in alpha:
        out *= math.factorial(a)
    return out


def derivative_weight(alpha: MultiIndex) -> int:
    """Multinomial weight |alpha|! / alpha! of a mixed derivative."""
    return math.factorial(total_order(alpha)) // multi_factorial(alpha)


def falling(j: int, a: int) -> int:
    """Falling factorial j (j-1) ... (j-a+1), the a-th derivative of x^j at work."""
    out = 1
    for t in range(a):
        out *= j - t
    return out


# ---------------------------------------------------------------------------
# multivariate polynomials


class Poly:
    """Sparse polynomial: dict from exponent tuple to nonzero coefficient."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        clean = {}
        if terms:
            for expo, c in terms.items():
                if c:
                    clean[tuple(expo)] = c
        self.terms = clean

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, c) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, nvars: int, expo: MultiIndex, c=mpq(1)) -> "Poly":
        return cls(nvars, {tuple(expo): c})

    def degree(self) -> int:
        """Total degree, recomputed on demand; the zero polynomial has -1."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return (isinstance(other, Poly) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for expo, c in other.terms.items():
            s = out.get(expo)
            out[expo] = c if s is None else s + c
        return Poly(self.nvars, out)

    def __neg__(self) -> "Poly":
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Poly):
            out = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    c = c1 * c2
                    s = out.get(e)
                    out[e] = c if s is None else s + c
            return Poly(self.nvars, out)
        return Poly(self.nvars, {e: c * other for e, c in self.terms.items()})

    __rmul__ = __mul__

    def diff(self, var: int) -> "Poly":
        """Partial derivative in one barycentric variable."""
        out = {}
        for expo, c in self.terms.items():
            k = expo[var]
            if k:
                e = expo[:var] + (k - 1,) + expo[var + 1:]
                nc = c * k
                s = out.get(e)
                out[e] = nc if s is None else s + nc
        return Poly(self.nvars, out)

    def directional_diff(self, weights) -> "Poly":
        """Derivative along a direction given by the chain-rule weights.

        weights[i] is d(coordinate of vertex i+1)/ds; a vector of length
        nvars + 1 is accepted too, its leading entry (the eliminated vertex-0
        coordinate) being redundant for the stored representation.
        """
        w = list(weights)
        if len(w) == self.nvars + 1:
            w = w[1:]
        if len(w) != self.nvars:
            raise ValueError("direction length does not match variable count")
        out = Poly(self.nvars)
        for i, wi in enumerate(w):
            if wi:
                out = out + wi * self.diff(i)
        return out

    def antider(self, var: int) -> "Poly":
        """Monomial antiderivative from 0 in one barycentric variable."""
        out = {}
        for expo, c in self.terms.items():
            k = expo[var]
            out[expo[:var] + (k + 1,) + expo[var + 1:]] = c / (k + 1)
        return Poly(self.nvars, out)

    def zero_at(self, dead_vars) -> "Poly":
        """Substitute 0 for the given variables (restriction to a face)."""
        dead = set(dead_vars)
        out = {}
        for expo, c in self.terms.items():
            if all(expo[v] == 0 for v in dead):
                s = out.get(expo)
                out[expo] = c if s is None else s + c
        return Poly(self.nvars, out)

    def map_coeffs(self, fn) -> "Poly":
        return Poly(self.nvars, {e: fn(c) for e, c in self.terms.items()})

    def to_float(self) -> "Poly":
        return self.map_coeffs(float)

    def evaluate(self, pts: np.ndarray) -> np.ndarray:
        """Evaluate at float points of shape (..., nvars)."""
        pts = np.asarray(pts, dtype=float)
        out = np.zeros(pts.shape[:-1])
        for expo, c in self.terms.items():
            term = np.full(pts.shape[:-1], float(c))
            for v, e in enumerate(expo):
                if e:
                    term = term * pts[..., v] ** e
            out = out + term
        return out

    def __repr__(self):
        items = ", ".join(f"{e}: {c}" for e, c in sorted(self.terms.items()))
        return f"Poly({self.nvars}, {{{items}}})"


def bary_coordinate(nvars: int, vertex: int) -> Poly:
    """Barycentric coordinate of a vertex as a polynomial; vertex 0 expands."""
    if vertex == 0:
        terms = {(0,) * nvars: mpq(1)}
        for i in range(nvars):
            e = tuple(1 if j == i else 0 for j in range(nvars))
            terms[e] = mpq(-1)
        return Poly(nvars, terms)
    e = tuple(1 if j == vertex - 1 else 0 for j in range(nvars))
    return Poly(nvars, {e: mpq(1)})


def differentiate(p: Poly, direction) -> Poly:
    """Directional derivative, the chain rule through barycentric weights."""
    return p.directional_diff(direction)


def antiderivative(p: Poly, alpha: MultiIndex) -> Poly:
    """Iterated layerwise antiderivative, alpha[i] times in variable i."""
    out = p
    for var, times in enumerate(alpha):
        for _ in range(times):
            out = out.antider(var)
    return out


# ---------------------------------------------------------------------------
# exact integrals of barycentric monomials


def bary_monomial_integral(alpha, volume=mpq(1)):
    """Integral over a simplex of a full barycentric monomial.

    alpha has n+1 entries, one exponent per vertex coordinate.  The classical
    closed form is n! * volume * prod(alpha_i!) / (|alpha| + n)!.
    """
    n = len(alpha) - 1
    num = math.factorial(n)
    for a in alpha:
        num *= math.factorial(a)
    return volume * mpq(num, math.factorial(sum(alpha) + n))


def face_mean_monomial(alpha, face_dim: int):
    """Mean over a face of a monomial in that face's vertex coordinates.

    The same closed form as bary_monomial_integral, normalized by the face
    measure, so the result is dimensionless: d! * prod(alpha_i!) / (|a|+d)!.
    Entries of alpha for vertices off the face must already be zero.
    """
    num = math.factorial(face_dim)
    for a in alpha:
        num *= math.factorial(a)
    return mpq(num, math.factorial(sum(alpha) + face_dim))


# ---------------------------------------------------------------------------
# univariate polynomials


class UniPoly:
    """Dense univariate polynomial, index = power, exact or float scalars."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = list(coeffs)
        while c and not c[-1]:
            c.pop()
        self.coeffs = c

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __eq__(self, other) -> bool:
        return isinstance(other, UniPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def __call__(self, x):
        out = 0
        for c in reversed(self.coeffs):
            out = out * x + c
        return out

    def derivative(self, order: int = 1) -> "UniPoly":
        c = self.coeffs
        for _ in range(order):
            c = [c[k] * k for k in range(1, len(c))]
        return UniPoly(c)

    def antiderivative(self) -> "UniPoly":
        return UniPoly([0] + [c / (k + 1) for k, c in enumerate(self.coeffs)])

    def compose_bary(self, var: int, nvars: int) -> Poly:
        """The polynomial evaluated at one barycentric variable."""
        terms = {}
        for k, c in enumerate(self.coeffs):
            if c:
                e = tuple(k if j == var else 0 for j in range(nvars))
                terms[e] = c
        return Poly(nvars, terms)

    def __repr__(self):
        return f"UniPoly({self.coeffs})"


def solve_univariate_interpolation(s: int, t: int, right_orders, rhs,
                                   exact: bool = True) -> UniPoly:
    """Interpolation in P_{s+t-1}: s derivative orders at 0, t orders at 1.

    The left conditions fix v^(i)(0) for i < s, the right ones v^(j)(1) for
    j in right_orders; rhs lists the s left values then the t right values.
    The system is solved exactly and a singular matrix raises
    SingularSystemError (two-point Hermite data of this shape never is).
    """
    right_orders = list(right_orders)
    if len(right_orders) != t or len(rhs) != s + t:
        raise ValueError("condition counts do not match s and t")
    dim = s + t
    make = mpq if exact else float
    rows = []
    for i in range(s):
        rows.append([make(math.factorial(i)) if j == i else make(0)
                     for j in range(dim)])
    for a in right_orders:
        rows.append([make(falling(j, a)) for j in range(dim)])
    try:
        coeffs = solve_dense(rows, [make(v) for v in rhs])
    except SingularMatrixError as err:
        raise SingularSystemError(str(err)) from err
    if not exact:
        coeffs = [float(c) for c in coeffs]
    return UniPoly(coeffs)


def weighted_unit_interval_integral(b: UniPoly, power: int):
    """Exact integral over (0,1) of (1-t)^power b(t)."""
    total = mpq(0)
    for j in range(power + 1):
        sign = -1 if j % 2 else 1
        w = sign * math.comb(power, j)
        for i, c in enumerate(b.coeffs):
            total += w * mpq(c) / (i + j + 1)
    return total
