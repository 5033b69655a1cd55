import numpy as np
import pytest

from eitguard.cem import (
    CemError,
    CemSystem,
    assemble,
    drive_solution,
    gradient_inner_products,
    measurement_matrix,
)
from eitguard.mesh import DomainSpec, ElectrodeLayout, build_mesh, place_electrodes
from eitguard.numerics import spectral_norm

from conftest import square_mesh
from dense_oracle import dense_gram, dense_R


def rel(a, b):
    return spectral_norm(a - b) / spectral_norm(b)


def resistor_mesh(h=0.05):
    d = DomainSpec.rectangle(1.0, 1.0)
    # arclength runs from the bottom-right corner: right edge is [0,1], left edge [2,3]
    return build_mesh(d, h, ElectrodeLayout(d, ((0.0, 1.0), (2.0, 3.0))))


class TestAssemble:
    def test_dimension(self, coarse_mesh):
        s = assemble(coarse_mesh, 1.0, 1.0)
        assert s.dimension == coarse_mesh.n_nodes + coarse_mesh.n_electrodes - 1

    def test_zero_conductivity(self, coarse_mesh):
        sigma = np.ones(coarse_mesh.n_triangles)
        sigma[3] = 0.0
        with pytest.raises(CemError):
            CemSystem(coarse_mesh, sigma, 1.0)

    @pytest.mark.parametrize("z", [0.0, -1.0, np.inf])
    def test_bad_impedance(self, coarse_mesh, z):
        with pytest.raises(CemError):
            CemSystem(coarse_mesh, 1.0, z)

    def test_wrong_lengths(self, coarse_mesh):
        with pytest.raises(CemError):
            CemSystem(coarse_mesh, np.ones(5), 1.0)
        with pytest.raises(CemError):
            CemSystem(coarse_mesh, 1.0, np.ones(3))


class TestMeasurementMatrix:
    def test_one_dimensional_resistor(self):
        # uniform current density: R = z/|E| + length/(sigma*width) + z/|E|
        R = measurement_matrix(resistor_mesh(), 1.0, 0.1)
        assert R.shape == (1, 1)
        assert abs(R[0, 0] - 1.2) <= 0.012
        assert abs(R[0, 0] - 1.2) <= 1e-10  # linear potential is reproduced exactly by P1

    def test_scaling(self, coarse_mesh, rng):
        s = rng.uniform(0.5, 2, coarse_mesh.n_triangles)
        z = rng.uniform(0.5, 2, coarse_mesh.n_electrodes)
        R = measurement_matrix(coarse_mesh, s, z)
        assert rel(measurement_matrix(coarse_mesh, 2 * s, z / 2), R / 2) <= 1e-8

    def test_reciprocity(self, coarse_mesh):
        sys_ = CemSystem(coarse_mesh, 1.0, 1.0)
        R = sys_.measurement_matrix()
        assert sys_.asymmetry <= 1e-8
        assert np.array_equal(R, R.T)
        # positive definite: driving current into any electrode costs energy
        assert np.linalg.eigvalsh(R)[0] > 0
        assert np.all(np.diag(R) > 0)

    def test_matches_dense_oracle(self, toy_mesh, rng):
        s = rng.uniform(0.5, 2, toy_mesh.n_triangles)
        z = rng.uniform(0.5, 2, toy_mesh.n_electrodes)
        assert rel(measurement_matrix(toy_mesh, s, z), dense_R(toy_mesh, s, z)) <= 1e-10

    def test_self_convergence(self):
        # nested meshes whose grid lines pass through every electrode end
        d = DomainSpec.rectangle(2.0, 2.0)
        lay = place_electrodes(d, 4, 0.5)
        Rs = [measurement_matrix(build_mesh(d, 2.0 / 2**k, lay), 1.0, 1.0) for k in range(4, 9)]
        diffs = [spectral_norm(b - a) for a, b in zip(Rs, Rs[1:])]
        orders = np.log2(np.array(diffs[:-1]) / np.array(diffs[1:]))
        assert np.all(np.diff(orders) > 0)  # approaching the asymptotic rate
        assert orders[-1] >= 1.7


class TestDriveSolution:
    def test_zero_drive(self, coarse_mesh):
        sol = drive_solution(CemSystem(coarse_mesh, 1.0, 1.0), np.zeros(35))
        assert np.all(sol.u == 0) and np.all(sol.U == 0)

    def test_unit_drive_column(self, coarse_mesh):
        sys_ = CemSystem(coarse_mesh, 1.0, 1.0)
        R = sys_.measurement_matrix()
        w = np.zeros(35)
        w[0] = 1.0
        sol = sys_.drive_solution(w)
        assert sol.U[-1] == 0.0
        assert np.linalg.norm(sol.U[:-1] - R[:, 0]) <= 1e-9 * np.linalg.norm(R[:, 0])

    def test_linearity(self, coarse_mesh):
        sys_ = CemSystem(coarse_mesh, 1.0, 1.0)
        e = np.eye(35)
        a, b, ab = (sys_.drive_solution(w) for w in (e[0], e[1], e[0] + e[1]))
        assert np.linalg.norm(ab.u - a.u - b.u) <= 1e-9 * np.linalg.norm(ab.u)
        assert np.linalg.norm(ab.U - a.U - b.U) <= 1e-9 * np.linalg.norm(ab.U)

    def test_wrong_length(self, coarse_mesh):
        with pytest.raises(CemError):
            CemSystem(coarse_mesh, 1.0, 1.0).drive_solution(np.ones(3))


class TestGradientInnerProducts:
    def test_empty_region(self, coarse_mesh):
        with pytest.raises(CemError):
            gradient_inner_products(CemSystem(coarse_mesh, 1.0, 1.0), [])

    def test_brute_force_oracle(self, toy_mesh, rng):
        s = rng.uniform(0.5, 2, toy_mesh.n_triangles)
        everything = np.arange(toy_mesh.n_triangles)
        G = gradient_inner_products(CemSystem(toy_mesh, s, 1.0), everything)
        G_ref = dense_gram(toy_mesh, s, 1.0, everything)
        assert np.abs(G - G_ref).max() <= 1e-12 * max(1.0, np.abs(G_ref).max())

    def test_semidefinite_diagonal(self, coarse_mesh):
        G = gradient_inner_products(CemSystem(coarse_mesh, 1.0, 1.0), [0, 5, 17])
        assert np.all(np.diag(G) >= 0)
        assert np.linalg.eigvalsh(G)[0] >= -1e-12 * np.abs(G).max()

    def test_energy_identity(self, coarse_mesh):
        # sum sigma |grad u|^2 + electrode terms = w^T R w for a unit drive
        sys_ = CemSystem(coarse_mesh, 1.0, 1.0)
        R = sys_.measurement_matrix()
        G = gradient_inner_products(sys_, np.arange(coarse_mesh.n_triangles))
        assert np.all(np.diag(G) <= np.diag(R) + 1e-12)


def test_larger_mesh_matches_oracle():
    m = square_mesh(h=0.25, L=8, coverage=0.4)
    assert rel(measurement_matrix(m, 1.3, 0.7), dense_R(m, 1.3, 0.7)) <= 1e-10
