"""Verification of resolution guarantees and the tolerable noise level."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cem import CemSystem
from .detection import TestBank, background_field, build_test_bank, check_compatible
from .mesh import Mesh, Partition
from .numerics import eigvalsh
from .setting import SettingAssumptions, SettingError

STRICT_NOTE = "the guarantee holds for every noise level strictly below delta_star"


@dataclass(frozen=True, eq=False)
class GuaranteeReport:
    """Outcome of a verification.

    ``margins[s]`` is the smallest (conductive) or largest (resistive)
    eigenvalue of the element's comparison matrix and ``mu`` their worst case.
    """

    margins: np.ndarray
    mu: float
    delta: float
    polarity: str
    mode: str
    roi: bool = False
    n_assemblies: int = 0

    @property
    def criterion(self) -> str:
        return "mu < -2*delta" if self.polarity == "conductive" else "mu > 2*delta"

    @property
    def holds(self) -> bool:
        if self.polarity == "conductive":
            return bool(self.mu < -2.0 * self.delta)
        return bool(self.mu > 2.0 * self.delta)

    @property
    def delta_star(self) -> float:
        return max_noise(self)

    @property
    def binding_element(self) -> int:
        if self.polarity == "conductive":
            return int(np.argmax(self.margins))
        return int(np.argmin(self.margins))

    def summary(self) -> str:
        lines = [
            f"polarity          : {self.polarity}",
            f"mode              : {self.mode}" + ("  (excluded region)" if self.roi else ""),
            f"elements          : {len(self.margins)}",
            f"mu                : {self.mu:.10g}",
            f"binding element   : {self.binding_element}",
            f"criterion         : {self.criterion}",
            f"noise level delta : {self.delta:.10g}",
            f"verdict           : {'holds' if self.holds else 'fails'}",
            f"delta_star        : {self.delta_star:.10g}",
            f"note              : {STRICT_NOTE} (spectral norm)",
        ]
        return "\n".join(lines)


def max_noise(report: GuaranteeReport) -> float:
    """Supremum of noise levels for which the verified guarantee holds."""
    mu = report.mu
    if report.polarity == "conductive":
        return -mu / 2.0 if mu < 0 else 0.0
    return mu / 2.0 if mu > 0 else 0.0


def comparison_matrix(setting: SettingAssumptions, mesh: Mesh) -> np.ndarray:
    """``R(sigmaB_max, z_min)`` for conductive, ``R(sigmaB_min, z_max)`` for resistive."""
    if setting.polarity == "conductive":
        sigma = background_field(setting, mesh, "max")
        return CemSystem(mesh, sigma, setting.z_min).measurement_matrix()
    sigma = background_field(setting, mesh, "min")
    return CemSystem(mesh, sigma, setting.z_max).measurement_matrix()


def margins_from_bank(bank: TestBank, C: np.ndarray) -> np.ndarray:
    pick = 0 if bank.polarity == "conductive" else -1
    return np.array([eigvalsh(A - C)[pick] for A in bank.matrices])


def verify(
    setting: SettingAssumptions,
    partition: Partition,
    mesh: Mesh,
    mode: str = "nonlinearized",
    bank: TestBank | None = None,
) -> GuaranteeReport:
    """Worst-case margin of the monotonicity tests over the partition."""
    if bank is None:
        bank = build_test_bank(setting, partition, mesh, mode)
    C = comparison_matrix(setting, mesh)
    m = margins_from_bank(bank, C)
    mu = float(np.max(m) if setting.polarity == "conductive" else np.min(m))
    return GuaranteeReport(
        m, mu, setting.noise, setting.polarity, bank.mode, setting.roi is not None,
        bank.n_assemblies + 1,
    )


def verify_with_roi(
    setting: SettingAssumptions,
    partition: Partition,
    mesh: Mesh,
    mode: str = "nonlinearized",
) -> GuaranteeReport:
    """Verification where ``setting.roi`` is excluded from the region of interest."""
    if setting.roi is None:
        raise SettingError(["verify_with_roi needs an excluded region in the setting"])
    if setting.polarity != "conductive" or mode != "nonlinearized":
        raise SettingError(
            ["an excluded region is only supported for conductive, nonlinearized verification"]
        )
    check_compatible(setting, partition, mesh)
    return verify(setting, partition, mesh, mode)
