import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eitguard.cem import CemSystem
from eitguard.detection import PartitionMismatch
from eitguard.guarantees import GuaranteeReport, max_noise, verify, verify_with_roi
from eitguard.mesh import TriangleList, UniformGrid, build_partition, select_triangles
from eitguard.numerics import eigvalsh
from eitguard.setting import RegionOfInterest, SettingAssumptions, SettingError

from conftest import square_mesh
from dense_oracle import dense_mu
from soundness import trials


def report(mu, polarity):
    return GuaranteeReport(np.array([mu]), mu, 0.0, polarity, "nonlinearized")


class TestMaxNoise:
    def test_conductive(self):
        assert max_noise(report(-0.26, "conductive")) == pytest.approx(0.13)

    def test_wrong_sign(self):
        assert max_noise(report(0.1, "conductive")) == 0.0
        assert max_noise(report(-0.1, "resistive")) == 0.0

    def test_resistive(self):
        assert max_noise(report(5.2, "resistive")) == pytest.approx(2.6)

    def test_strict_inequality(self):
        r = GuaranteeReport(np.array([-0.2]), -0.2, 0.1, "conductive", "nonlinearized")
        assert not r.holds  # mu = -2 delta exactly is not enough
        assert "strictly" in r.summary()


@pytest.fixture(scope="module")
def small():
    mesh = square_mesh(h=1 / 8, L=8, coverage=0.25, region="lower_edge")
    return mesh, build_partition(mesh, UniformGrid(2, 2))


def setting(**kw):
    base = dict(sigma0=1.0, contrast=10.0, z0=np.ones(8), sigma_max=12.0)
    base.update(kw)
    return SettingAssumptions(**base)


class TestVerify:
    def test_whole_domain_element(self, coarse_mesh):
        part = build_partition(coarse_mesh, UniformGrid(1, 1))
        s = SettingAssumptions(1.0, 10.0, np.ones(36))
        rep = verify(s, part, coarse_mesh)
        R0 = CemSystem(coarse_mesh, 1.0, 1.0).measurement_matrix()
        R1 = CemSystem(coarse_mesh, 11.0, 1.0).measurement_matrix()
        assert rep.mu == pytest.approx(eigvalsh(R1 - R0)[0], rel=1e-12)
        assert rep.mu < 0 and rep.delta_star > 0

    def test_dense_oracle(self, toy_mesh):
        part = build_partition(toy_mesh, UniformGrid(2, 1))
        s = SettingAssumptions(1.0, 4.0, np.ones(4))
        rep = verify(s, part, toy_mesh)
        mu, margins = dense_mu(toy_mesh, part.elements, 1.0, 4.0, 1.0)
        assert abs(rep.mu - mu) <= 1e-8 * abs(mu)
        np.testing.assert_allclose(rep.margins, margins, rtol=1e-8)

    def test_assembly_counts(self, small):
        mesh, part = small
        assert verify(setting(), part, mesh, "nonlinearized").n_assemblies == len(part) + 1
        assert verify(setting(), part, mesh, "linearized").n_assemblies == 2

    def test_resistive_criterion(self, small):
        mesh, part = small
        s = SettingAssumptions(1.0, 0.5, np.ones(8), polarity="resistive")
        rep = verify(s, part, mesh)
        assert rep.criterion == "mu > 2*delta"
        assert rep.mu == pytest.approx(rep.margins.min())
        assert rep.binding_element == int(np.argmin(rep.margins))
        assert rep.holds and rep.delta_star == pytest.approx(rep.mu / 2)

    def test_verdict_tracks_delta(self, small):
        mesh, part = small
        ds = verify(setting(), part, mesh).delta_star
        assert verify(setting(noise=0.99 * ds), part, mesh).holds
        assert not verify(setting(noise=1.01 * ds), part, mesh).holds

    @pytest.mark.parametrize("which", ["background_error", "impedance_error"])
    def test_errors_never_help(self, small, which):
        mesh, part = small
        vals = [verify(setting(**{which: v}), part, mesh).delta_star for v in (0, 0.002, 0.01, 0.05)]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("polarity,contrast,mode", [
        ("conductive", 10.0, "nonlinearized"), ("conductive", 10.0, "linearized"),
        ("resistive", 0.5, "nonlinearized"), ("resistive", 0.5, "linearized")])
    def test_soundness_with_errors(self, small, polarity, contrast, mode):
        mesh, part = small
        s = setting(polarity=polarity, contrast=contrast, background_error=5e-4,
                    impedance_error=5e-4, sigma_max=12.0 if polarity == "conductive" else None)
        ds = verify(s, part, mesh, mode).delta_star
        assert ds > 0
        fp, fn, _ = trials(s, part, mesh, mode, 0.9 * ds, draws=5, seed=11)
        assert (fp, fn) == (0, 0)


class TestExcludedRegion:
    @staticmethod
    @pytest.fixture(scope="class")
    def roi_case():
        mesh = square_mesh(h=1 / 8, L=8, coverage=0.25, region="lower_edge")
        part = build_partition(mesh, UniformGrid(2, 2, (-1, 1, -1, 0)))
        tri = select_triangles(mesh, {"kind": "box", "bounds": (-0.5, 0.5, 0.25, 0.75)})
        return mesh, part, tri

    def test_collapsed_band_equals_plain(self, roi_case):
        mesh, part, tri = roi_case
        eps = 0.01
        plain = verify(setting(background_error=eps), part, mesh)
        roi = RegionOfInterest(tri, 1.0 - eps, 1.0 + eps)
        rep = verify_with_roi(setting(background_error=eps, roi=roi), part, mesh)
        assert rep.roi
        np.testing.assert_allclose(rep.margins, plain.margins, atol=1e-9 * max(1, abs(plain.mu)))

    def test_wider_band_costs_margin(self, roi_case):
        mesh, part, tri = roi_case
        plain = verify(setting(), part, mesh)
        rep = verify_with_roi(setting(roi=RegionOfInterest(tri, 0.1, 5.0)), part, mesh)
        assert rep.delta_star < plain.delta_star

    def test_overlap_rejected(self, roi_case):
        mesh, part, _ = roi_case
        roi = RegionOfInterest(part.elements[0][:3], 0.5, 2.0)
        with pytest.raises(PartitionMismatch):
            verify_with_roi(setting(roi=roi), part, mesh)

    def test_needs_region(self, roi_case):
        mesh, part, _ = roi_case
        with pytest.raises(SettingError):
            verify_with_roi(setting(), part, mesh)

    def test_other_modes_rejected(self, roi_case):
        mesh, part, tri = roi_case
        with pytest.raises(SettingError):
            verify_with_roi(setting(roi=RegionOfInterest(tri, 0.5, 2.0)), part, mesh, "linearized")

    def test_bad_band(self):
        with pytest.raises(SettingError):
            RegionOfInterest(np.array([1, 2]), 2.0, 1.0)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.5, 20.0))
def test_single_triangle_partitions_match_oracle(seed, contrast):
    mesh = square_mesh(h=1 / 4, L=4, coverage=0.5, side=1.0)
    rng = np.random.default_rng(seed)
    pick = rng.choice(mesh.n_triangles, size=4, replace=False)
    part = build_partition(mesh, TriangleList(((int(pick[0]), int(pick[1])), (int(pick[2]), int(pick[3])))))
    rep = verify(SettingAssumptions(1.0, contrast, np.ones(4)), part, mesh)
    mu, _ = dense_mu(mesh, part.elements, 1.0, contrast, 1.0)
    assert abs(rep.mu - mu) <= 1e-8 * abs(mu)
