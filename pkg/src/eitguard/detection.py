"""Monotonicity-based marking of partition elements.

For every element ``s`` a test matrix ``A_s`` is built once:

==============  =============  ============================================
polarity        mode           ``A_s``
==============  =============  ============================================
conductive      nonlinearized  ``R(tau_s, z_max)``, ``tau_s`` = sigmaB_min
                               off the element, sigmaD_min on it
conductive      linearized     ``R(sigmaB_min, z_max) + lam * R'(chi_s)``
resistive       nonlinearized  ``R(tau_s, z_min)``, ``tau_s`` = sigmaB_max
                               off the element, sigmaD_max on it
resistive       linearized     ``R(sigmaB_max, z_min) + lam * R'(chi_s)``
==============  =============  ============================================

A conductive element is marked when ``A_s + delta I - R_delta >= 0``, a
resistive one when ``A_s - delta I - R_delta <= 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cem import CemSystem
from .mesh import Mesh, Partition
from .numerics import eigvalsh, symmetrize
from .sensitivity import jacobian_of_element
from .setting import SettingAssumptions, SettingError, check_mode


class PartitionMismatch(ValueError):
    pass


def eig_tolerance(lam: np.ndarray) -> float:
    """Slack for a definiteness test given the eigenvalues of the difference."""
    return 1e-9 * max(1.0, float(np.max(np.abs(lam))))


def check_compatible(setting: SettingAssumptions, partition: Partition, mesh: Mesh) -> None:
    if partition.n_triangles != mesh.n_triangles:
        raise PartitionMismatch(
            f"partition refers to {partition.n_triangles} triangles, mesh has {mesh.n_triangles}"
        )
    if setting.n_electrodes != mesh.n_electrodes:
        raise PartitionMismatch(
            f"setting has {setting.n_electrodes} contact impedances, mesh has "
            f"{mesh.n_electrodes} electrodes"
        )
    if setting.roi is not None:
        tri = setting.roi.triangles
        if tri.max() >= mesh.n_triangles:
            raise PartitionMismatch("excluded region references invalid triangles")
        hit = np.flatnonzero(np.bincount(partition.labels[tri][partition.labels[tri] >= 0]))
        if hit.size:
            raise PartitionMismatch(
                f"excluded region overlaps partition elements {hit.tolist()}"
            )


def background_field(setting: SettingAssumptions, mesh: Mesh, which: str) -> np.ndarray:
    """``sigmaB_min`` or ``sigmaB_max`` everywhere, with the excluded-region band."""
    value = setting.sigma_b_min if which == "min" else setting.sigma_b_max
    sigma = np.full(mesh.n_triangles, value)
    if setting.roi is not None:
        roi = setting.roi
        sigma[roi.triangles] = roi.sigma_min if which == "min" else roi.sigma_max
    return sigma


@dataclass(frozen=True, eq=False)
class TestBank:
    """Per-element test matrices of one setting, mode and partition."""

    matrices: tuple
    setting: SettingAssumptions
    mode: str
    n_assemblies: int
    reference: np.ndarray | None = None

    @property
    def polarity(self) -> str:
        return self.setting.polarity

    def __len__(self) -> int:
        return len(self.matrices)


def build_test_bank(
    setting: SettingAssumptions, partition: Partition, mesh: Mesh, mode: str = "nonlinearized"
) -> TestBank:
    check_mode(mode)
    check_compatible(setting, partition, mesh)
    conductive = setting.polarity == "conductive"
    if setting.roi is not None and not (conductive and mode == "nonlinearized"):
        raise SettingError(
            ["an excluded region is only supported for conductive, nonlinearized tests"]
        )
    z = setting.z_max if conductive else setting.z_min
    if mode == "nonlinearized":
        base = background_field(setting, mesh, "min" if conductive else "max")
        inclusion = setting.sigma_d_min if conductive else setting.sigma_d_max
        mats = []
        for elem in partition.elements:
            tau = base.copy()
            tau[elem] = inclusion
            mats.append(CemSystem(mesh, tau, z).measurement_matrix())
        return TestBank(tuple(mats), setting, mode, len(mats))

    lam = setting.linearized_contrast()
    sigma_ref = setting.sigma_b_min if conductive else setting.sigma_b_max
    system = CemSystem(mesh, sigma_ref, z)
    R_ref = system.measurement_matrix()
    mats = tuple(R_ref + lam * jacobian_of_element(system, e) for e in partition.elements)
    return TestBank(mats, setting, mode, 1, R_ref)


@dataclass(frozen=True, eq=False)
class DetectionResult:
    """Marked element indices (0-based) and the eigenvalue statistic per element.

    The statistic is the smallest eigenvalue of ``A_s + delta I - R_delta``
    for conductive tests and the largest of ``A_s - delta I - R_delta`` for
    resistive ones; ``tolerances`` holds the slack used for each element.
    """

    marked: np.ndarray
    statistics: np.ndarray
    tolerances: np.ndarray
    polarity: str
    mode: str

    @property
    def flags(self) -> np.ndarray:
        out = np.zeros(len(self.statistics), dtype=bool)
        out[self.marked] = True
        return out


def prepare_measurements(R_delta, n: int) -> np.ndarray:
    R = np.asarray(R_delta, dtype=float)
    if R.shape != (n, n):
        raise ValueError(f"measurement matrix must be {n}x{n}, got {R.shape}")
    return symmetrize(R)[0]


def run_tests(bank: TestBank, R_delta, delta: float) -> DetectionResult:
    n = bank.matrices[0].shape[0]
    R = prepare_measurements(R_delta, n)
    conductive = bank.polarity == "conductive"
    shift = delta * np.eye(n)
    stats = np.empty(len(bank))
    tols = np.empty(len(bank))
    for s, A in enumerate(bank.matrices):
        lam = eigvalsh(A + shift - R if conductive else A - shift - R)
        stats[s] = lam[0] if conductive else lam[-1]
        tols[s] = eig_tolerance(lam)
    marked = stats >= -tols if conductive else stats <= tols
    return DetectionResult(np.flatnonzero(marked), stats, tols, bank.polarity, bank.mode)


def detect(
    R_delta,
    setting: SettingAssumptions,
    partition: Partition,
    mesh: Mesh,
    mode: str = "nonlinearized",
) -> DetectionResult:
    """Mark the partition elements that pass the monotonicity test."""
    bank = build_test_bank(setting, partition, mesh, mode)
    return run_tests(bank, R_delta, setting.noise)
