"""Manufactured smooth and corner-singular benchmark solutions."""

import math

import numpy as np
import pytest
from gmpy2 import mpq

from hmfem.problems import (BoundaryEvaluationError, CornerSingularSolution,
                            example1_load, example1_solution)

MS = (1, 2, 3, 4)


@pytest.mark.parametrize("m", MS)
def test_center_value_is_scale_invariant(m):
    # 2^(4m-6) (1/4)^m (1/4)^m = 1/64 independently of m
    u = example1_solution(m)
    val = sum(c * mpq(1, 2) ** sum(e) for e, c in u.poly.terms.items())
    assert val == mpq(1, 64)


@pytest.mark.parametrize("m", (1, 2, 3))
def test_low_order_derivatives_vanish_on_the_boundary(m):
    u = example1_solution(m)
    left = [(0.0, 0.3), (0.0, 0.85)]
    bottom = [(0.4, 0.0), (0.9, 0.0)]
    for bx in range(m):
        for by in range(m + 1):
            assert (u.derivative_values((bx, by), left) == 0.0).all()
            assert (u.derivative_values((by, bx), bottom) == 0.0).all()


@pytest.mark.parametrize("m", MS)
def test_polynomial_degrees(m):
    assert example1_solution(m).degree == 4 * m
    assert example1_load(m).degree == 2 * m


def test_load_agrees_with_a_five_point_laplacian():
    u = example1_solution(1)
    f = example1_load(1)
    h = 1e-4
    for p in ((0.3, 0.4), (0.7, 0.6)):
        x, y = p
        lap = (u.derivative_values((0, 0), [(x + h, y), (x - h, y),
                                            (x, y + h), (x, y - h)]).sum()
               - 4 * u.derivative_values((0, 0), [p])[0]) / h ** 2
        want = f.derivative_values((0, 0), [p])[0]
        assert -lap == pytest.approx(want, rel=1e-5)


@pytest.mark.parametrize("m", MS)
def test_load_is_symmetric_in_the_coordinates(m):
    terms = example1_load(m).poly.terms
    for (a, b), c in terms.items():
        assert terms[(b, a)] == c


# ---------------------------------------------------------------------------
# corner singularity

POINTS = np.array([(0.3, 0.7), (0.7, 0.2), (-0.6, 0.4),
                   (-0.5, -0.3), (-0.8, -0.1)])


def test_corner_solution_values():
    u3 = CornerSingularSolution(3)
    # r = 1, theta = pi/2: sin(5 pi / 4)
    assert u3.derivative_values((0, 0), [(0.0, 1.0)])[0] == pytest.approx(
        -math.sqrt(2) / 2, rel=1e-12)
    # theta = pi: sin(5 pi / 2)
    assert u3.derivative_values((0, 0), [(-1.0, 0.0)])[0] == pytest.approx(
        1.0, rel=1e-12)
    u4 = CornerSingularSolution(4)
    assert u4.derivative_values((0, 0), [(-1.0, 0.0)])[0] == pytest.approx(
        -1.0, rel=1e-12)


@pytest.mark.parametrize("m", (3, 4))
def test_corner_derivative_cascade(m):
    # each derivative is the finite difference of the one below it
    u = CornerSingularSolution(m)
    h = 1e-6
    for order in range(1, 4):
        for bx in range(order + 1):
            beta = (bx, order - bx)
            if beta[0] > 0:
                lower, step = (beta[0] - 1, beta[1]), np.array([h, 0.0])
            else:
                lower, step = (beta[0], beta[1] - 1), np.array([0.0, h])
            fd = (u.derivative_values(lower, POINTS + step)
                  - u.derivative_values(lower, POINTS - step)) / (2 * h)
            got = u.derivative_values(beta, POINTS)
            assert np.allclose(fd, got, rtol=1e-4, atol=1e-8)


@pytest.mark.parametrize("m", (3, 4))
def test_corner_solution_is_harmonic(m):
    u = CornerSingularSolution(m)
    lap = (u.derivative_values((2, 0), POINTS)
           + u.derivative_values((0, 2), POINTS))
    assert np.abs(lap).max() <= 1e-8


def test_corner_branch_is_continuous_across_the_negative_axis():
    u = CornerSingularSolution(3)
    above, below = (-0.5, 1e-9), (-0.5, -1e-9)
    vals = u.derivative_values((0, 0), [above, below])
    assert vals[0] == pytest.approx(vals[1], rel=1e-6)


def test_corner_low_derivatives_extend_by_zero():
    u = CornerSingularSolution(3)
    for beta in ((0, 0), (1, 0), (1, 1), (0, 2)):
        vals = u.derivative_values(beta, [(0.0, 0.0), (0.5, 0.5)])
        assert vals[0] == 0.0
        assert vals[1] != 0.0


def test_corner_high_derivatives_blow_up_at_the_origin():
    u = CornerSingularSolution(3)
    for beta in ((3, 0), (1, 2), (2, 2)):
        with pytest.raises(BoundaryEvaluationError):
            u.derivative_values(beta, [(0.0, 0.0)])
        assert np.isfinite(u.derivative_values(beta, [(0.3, 0.1)])).all()
