"""Seeded consistency checks of the forward model on a coarse mesh."""
from __future__ import annotations

import numpy as np

from .cem import CemSystem
from .mesh import DomainSpec, UniformGrid, build_mesh, build_partition, place_electrodes
from .numerics import spectral_norm
from .sensitivity import jacobian_of_element
from .validation import monotonicity_check, monotonicity_tolerance, sandwich_check


def coarse_mesh(h: float = 1 / 9, electrodes: int = 36, coverage: float = 0.5):
    """Square of side 2 with evenly spaced boundary electrodes."""
    dom = DomainSpec.rectangle(2.0, 2.0)
    return build_mesh(dom, h, place_electrodes(dom, electrodes, coverage, "full_boundary"))


def ordered_pair(rng, mesh):
    """Random ``sigma1 <= sigma2`` and ``z1 >= z2``."""
    s1 = rng.uniform(0.5, 2.0, mesh.n_triangles)
    s2 = s1 + rng.uniform(0.0, 1.0, mesh.n_triangles) * (rng.random(mesh.n_triangles) < 0.5)
    z2 = rng.uniform(0.2, 1.5, mesh.n_electrodes)
    z1 = z2 + rng.uniform(0.0, 0.5, mesh.n_electrodes) * (rng.random(mesh.n_electrodes) < 0.5)
    return s1, z1, s2, z2


def check_reciprocity(mesh) -> tuple[bool, str]:
    sys0 = CemSystem(mesh, 1.0, 1.0)
    sys0.measurement_matrix()
    a = sys0.asymmetry
    return a <= 1e-8, f"asymmetry {a:.2e}"


def check_scaling(mesh) -> tuple[bool, str]:
    rng = np.random.default_rng(0)
    s = rng.uniform(0.5, 2.0, mesh.n_triangles)
    z = rng.uniform(0.5, 2.0, mesh.n_electrodes)
    R1 = CemSystem(mesh, s, z).measurement_matrix()
    R2 = CemSystem(mesh, 2 * s, z / 2).measurement_matrix()
    err = spectral_norm(R2 - R1 / 2) / spectral_norm(R1 / 2)
    return err <= 1e-8, f"relative error {err:.2e}"


def check_monotonicity(mesh, rng, trials) -> tuple[bool, str]:
    worst = np.inf
    for _ in range(trials):
        s1, z1, s2, z2 = ordered_pair(rng, mesh)
        lam = monotonicity_check(s1, z1, s2, z2, mesh)
        worst = min(worst, lam + monotonicity_tolerance(s1, z1, s2, z2, mesh))
    return worst >= 0, f"min(eig + tol) {worst:.2e} over {trials} pairs"


def check_sandwich(mesh, rng, trials) -> tuple[bool, str]:
    bad = 0
    for _ in range(trials):
        s1, z1, s2, z2 = ordered_pair(rng, mesh)
        if rng.random() < 0.5:  # also exercise unordered pairs
            s1, s2 = s2, s1
        w = rng.standard_normal(mesh.n_electrodes - 1)
        bad += not sandwich_check(s1, z1, s2, z2, w, mesh).ordered
    return bad == 0, f"{bad} of {trials} triples out of order"


def check_jacobian(mesh) -> tuple[bool, str]:
    part = build_partition(mesh, UniformGrid(4, 4))
    sys0 = CemSystem(mesh, 1.0, 1.0)
    R0 = sys0.measurement_matrix()
    orders = []
    for s in (0, 5, 10):
        chi = np.zeros(mesh.n_triangles)
        chi[part.elements[s]] = 1.0
        J = jacobian_of_element(sys0, part.elements[s])
        errs = [spectral_norm((CemSystem(mesh, 1.0 + t * chi, 1.0).measurement_matrix() - R0) / t - J)
                for t in (1e-2, 1e-3, 1e-4)]
        orders.append(min(np.log10(errs[0] / errs[1]), np.log10(errs[1] / errs[2])))
    return min(orders) >= 0.9, f"observed order >= {min(orders):.3f}"


def run_selftest(seed: int = 0, trials: int = 20, mesh=None) -> list[tuple[str, bool, str]]:
    """Rows of ``(check, passed, detail)``."""
    mesh = mesh or coarse_mesh()
    rng = np.random.default_rng(seed)
    rows = [
        ("reciprocity", *check_reciprocity(mesh)),
        ("scaling R(2s, z/2) = R/2", *check_scaling(mesh)),
        ("monotonicity", *check_monotonicity(mesh, rng, trials)),
        ("energy sandwich", *check_sandwich(mesh, rng, trials)),
        ("jacobian finite differences", *check_jacobian(mesh)),
    ]
    return rows
