import numpy as np
import pytest

from eitguard.mesh import DomainSpec, UniformGrid, build_mesh, build_partition, place_electrodes


def square_mesh(h=1 / 9, L=36, coverage=0.5, region="full_boundary", side=2.0):
    dom = DomainSpec.rectangle(side, side)
    return build_mesh(dom, h, place_electrodes(dom, L, coverage, region))


@pytest.fixture(scope="session")
def coarse_mesh():
    """Two by two square, 36 electrodes at half coverage, h = 1/9 (648 triangles)."""
    return square_mesh()


@pytest.fixture(scope="session")
def coarse_grid(coarse_mesh):
    return build_partition(coarse_mesh, UniformGrid(4, 4))


@pytest.fixture(scope="session")
def toy_mesh():
    """Unit square, four electrodes, 128 triangles."""
    return square_mesh(h=1 / 8, L=4, coverage=0.5, side=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
