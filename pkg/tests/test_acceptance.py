"""Acceptance criteria, one test each, every test printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` to see the table in the output.
"""
import csv
import subprocess
import sys

import numpy as np
import pytest

from eitguard.cem import CemSystem, measurement_matrix
from eitguard.cli import main
from eitguard.guarantees import verify
from eitguard.mesh import UniformGrid, build_partition
from eitguard.numerics import spectral_norm
from eitguard.scenario import load_scenario
from eitguard.selftest import ordered_pair
from eitguard.sensitivity import jacobian_of_element
from eitguard.setting import SettingAssumptions
from eitguard.validation import monotonicity_check, monotonicity_tolerance, sandwich_check

from conftest import square_mesh
from dense_oracle import dense_mu
from soundness import trials


@pytest.fixture
def outcome(capsys):
    def record(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")
        assert ok, detail

    return record


def test_c1_reciprocity(outcome):
    worst = {}
    for name in ("fig3", "fig4", "fig5", "fig6"):
        sc = load_scenario(preset=name)
        st = sc.setting()
        sys_ = CemSystem(sc.mesh, st.sigma0, st.z0)
        sys_.measurement_matrix()
        worst[name] = sys_.asymmetry
    ok = max(worst.values()) <= 1e-8
    outcome(1, "reciprocity", ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_c2_scaling(outcome, rng):
    mesh = square_mesh(h=1 / 9)
    errs = []
    for s, z in ((1.0, 1.0), (rng.uniform(0.5, 2, mesh.n_triangles), rng.uniform(0.5, 2, 36))):
        R = measurement_matrix(mesh, s, z)
        R2 = measurement_matrix(mesh, 2 * np.asarray(s), np.asarray(z) / 2)
        errs.append(spectral_norm(R2 - R / 2) / spectral_norm(R / 2))
    outcome(2, "scaling R(2s, z/2) = R/2", max(errs) <= 1e-8, f"max relative error {max(errs):.1e}")


def test_c3_monotonicity(outcome, coarse_mesh):
    rng = np.random.default_rng(3)
    worst = np.inf
    for _ in range(100):
        s1, z1, s2, z2 = ordered_pair(rng, coarse_mesh)
        lam = monotonicity_check(s1, z1, s2, z2, coarse_mesh)
        worst = min(worst, lam + monotonicity_tolerance(s1, z1, s2, z2, coarse_mesh))
    outcome(3, "monotonicity, 100 pairs", worst >= 0, f"min(eig + tol_eig) = {worst:.3e}")


def test_c4_sandwich(outcome, coarse_mesh):
    rng = np.random.default_rng(4)
    bad, worst = 0, 0.0
    for k in range(200):
        s1, z1, s2, z2 = ordered_pair(rng, coarse_mesh)
        if k % 2:
            s1, z1, s2, z2 = s2, z2, s1, z1
        sw = sandwich_check(s1, z1, s2, z2, rng.standard_normal(35), coarse_mesh)
        bad += not sw.ordered
        scale = max(abs(sw.lower), abs(sw.upper))
        worst = max(worst, (sw.lower - sw.middle) / scale, (sw.middle - sw.upper) / scale)
    outcome(4, "energy sandwich, 200 triples", bad == 0,
            f"{bad} violations, largest relative excess {worst:.2e}")


def test_c5_jacobian(outcome, coarse_mesh, coarse_grid):
    sys0 = CemSystem(coarse_mesh, 1.0, 1.0)
    R0 = sys0.measurement_matrix()
    ok, orders = True, []
    for s in (0, 5, 10):
        J = jacobian_of_element(sys0, coarse_grid.elements[s])
        chi = coarse_grid.indicator(s)
        errs = [spectral_norm((CemSystem(coarse_mesh, 1 + t * chi, 1.0).measurement_matrix() - R0) / t - J)
                for t in (1e-2, 1e-3, 1e-4)]
        ok &= errs[0] > errs[1] > errs[2]
        orders += [np.log10(errs[0] / errs[1]), np.log10(errs[1] / errs[2])]
    ok &= min(orders) >= 0.9
    outcome(5, "jacobian finite differences", ok, f"observed orders {np.round(orders, 3).tolist()}")


REDUCED = [
    # (polarity, contrast, sigma_max, mode)
    ("conductive", 10.0, 12.0, "nonlinearized"),
    ("conductive", 10.0, 12.0, "linearized"),
    ("resistive", 0.5, None, "nonlinearized"),
    ("resistive", 0.5, None, "linearized"),
]


@pytest.mark.parametrize("polarity,contrast,sigma_max,mode", REDUCED)
def test_c6_soundness(outcome, polarity, contrast, sigma_max, mode):
    mesh = square_mesh(h=1 / 8, L=8, coverage=0.25, region="lower_edge")
    part = build_partition(mesh, UniformGrid(2, 2))
    st = SettingAssumptions(1.0, contrast, np.ones(8), polarity=polarity, sigma_max=sigma_max)
    ds = verify(st, part, mesh, mode).delta_star
    fp, fn, runs = trials(st, part, mesh, mode, 0.9 * ds, draws=20, seed=6)
    outcome(6, f"soundness {polarity}/{mode} (c={contrast})", ds > 0 and fp == 0 and fn == 0,
            f"delta_star {ds:.4g}, {runs} runs, {fp} false positives, {fn} false negatives")


def test_c7_sweep_trend(outcome, tmp_path):
    assert main(["sweep", "--preset", "fig3", "--out", str(tmp_path)]) == 0
    with open(tmp_path / "sweep.csv") as fh:
        rows = list(csv.DictReader(l for l in fh if not l.startswith("#")))
    ds = {(float(r["background_error"]), float(r["impedance_error"])): float(r["delta_star"])
          for r in rows}
    trend = (ds[0, 0] >= ds[0, 0.0025] >= ds[0.0025, 0.0025]
             and ds[0, 0] >= ds[0.0025, 0] >= ds[0.0025, 0.0025])
    outcome(7, "fig3 sweep weakly decreasing", trend,
            " / ".join(f"{v:.3g}" for v in ds.values()))


def test_c7_fig3_magnitude(outcome):
    sc = load_scenario(preset="fig3").with_overrides(mesh__target_edge_length=1 / 72)
    ds = verify(sc.setting(), sc.partition, sc.mesh).delta_star
    outcome(7, f"fig3 delta_star vs 0.13 ({sc.mesh.n_triangles} triangles)",
            0.13 / 2 <= ds <= 0.13 * 2, f"{ds:.4g}")


def test_c7_fig6_magnitude(outcome):
    sc = load_scenario(preset="fig6").with_overrides(mesh__target_edge_length=0.0004)
    ds = verify(sc.setting(), sc.partition, sc.mesh).delta_star
    outcome(7, f"fig6 delta_star vs 2.6 ({sc.mesh.n_triangles} triangles)",
            2.6 / 2 <= ds <= 2.6 * 2, f"{ds:.4g}")


def test_c8_dense_oracle(outcome, toy_mesh):
    part = build_partition(toy_mesh, UniformGrid(2, 1))
    assert toy_mesh.n_triangles <= 200 and toy_mesh.n_electrodes == 4 and len(part) == 2
    mu = verify(SettingAssumptions(1.0, 3.0, np.ones(4)), part, toy_mesh).mu
    ref, _ = dense_mu(toy_mesh, part.elements, 1.0, 3.0, 1.0)
    err = abs(mu - ref) / abs(ref)
    outcome(8, "dense oracle equivalence", err <= 1e-8, f"mu {mu:.12g}, oracle {ref:.12g}, rel {err:.1e}")


def test_c9_determinism(outcome, tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / str(k)
        r = subprocess.run([sys.executable, "-m", "eitguard", "sweep", "--preset", "fig4",
                            "--seed", "7", "--out", str(d)], capture_output=True)
        assert r.returncode == 0, r.stderr
        outs.append((d / "sweep.csv").read_bytes())
    outcome(9, "sweep --seed 7 byte-identical", outs[0] == outs[1], f"{len(outs[0])} bytes")
