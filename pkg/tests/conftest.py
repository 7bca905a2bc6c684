"""Shared fixtures: certified elements and small meshes, built once."""

import pytest

from hmfem import build_element, build_space, unit_square_mesh


@pytest.fixture(scope="session")
def element12():
    return build_element(1, 2)


@pytest.fixture(scope="session")
def element22():
    return build_element(2, 2)


@pytest.fixture(scope="session")
def element32():
    return build_element(3, 2)


@pytest.fixture(scope="session")
def square2():
    return unit_square_mesh(2)


@pytest.fixture(scope="session")
def space32(element32, square2):
    return build_space(element32, square2)
