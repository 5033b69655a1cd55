"""Prior knowledge about the measurement setting."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

POLARITIES = ("conductive", "resistive")
MODES = ("nonlinearized", "linearized")
_POLARITY_ALIASES = {
    "conductive": "conductive",
    "more_conductive": "conductive",
    "resistive": "resistive",
    "less_conductive": "resistive",
}


class SettingError(ValueError):
    """Raised with every violated constraint listed, one per line."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid setting:\n  " + "\n  ".join(self.problems))


def normalize_polarity(polarity: str) -> str:
    try:
        return _POLARITY_ALIASES[polarity]
    except KeyError:
        raise SettingError([f"unknown polarity {polarity!r}; expected one of {POLARITIES}"])


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise SettingError([f"unknown mode {mode!r}; expected one of {MODES}"])
    return mode


@dataclass(frozen=True, eq=False)
class RegionOfInterest:
    """Sub-domain ``omega_I`` excluded from the guarantee, with its own band."""

    triangles: np.ndarray
    sigma_min: float
    sigma_max: float

    def __post_init__(self):
        tri = np.unique(np.asarray(self.triangles, dtype=int))
        tri.setflags(write=False)
        object.__setattr__(self, "triangles", tri)
        problems = []
        if tri.size == 0:
            problems.append("excluded region captures no triangles")
        if not self.sigma_min > 0:
            problems.append(f"excluded-region sigma_min must be positive, got {self.sigma_min}")
        if not self.sigma_min <= self.sigma_max:
            problems.append("excluded-region sigma_min must not exceed sigma_max")
        if problems:
            raise SettingError(problems)


@dataclass(frozen=True, eq=False)
class SettingAssumptions:
    """Background ``sigma0 +- background_error``, contrast ``contrast``,
    contact impedances ``z0 +- impedance_error`` and noise level ``noise``.

    All quantities are absolute (S/m, Ohm m^2, mV/mA).
    """

    sigma0: float
    contrast: float
    z0: np.ndarray
    background_error: float = 0.0
    impedance_error: float = 0.0
    noise: float = 0.0
    polarity: str = "conductive"
    sigma_max: float | None = None
    roi: RegionOfInterest | None = field(default=None)

    def __post_init__(self):
        z0 = np.atleast_1d(np.asarray(self.z0, dtype=float)).copy()
        z0.setflags(write=False)
        object.__setattr__(self, "z0", z0)
        object.__setattr__(self, "polarity", normalize_polarity(self.polarity))
        problems = self.problems()
        if problems:
            raise SettingError(problems)

    def problems(self) -> list[str]:
        p = []
        eps, c, gam, dlt = self.background_error, self.contrast, self.impedance_error, self.noise
        if not self.sigma0 > 0:
            p.append(f"sigma0 must be positive, got {self.sigma0}")
        if not eps >= 0:
            p.append(f"background_error must be non-negative, got {eps}")
        if not c > 0:
            p.append(f"contrast must be positive, got {c}")
        if not gam >= 0:
            p.append(f"impedance_error must be non-negative, got {gam}")
        if not dlt >= 0:
            p.append(f"noise must be non-negative, got {dlt}")
        if not self.sigma0 - eps > 0:
            p.append(f"sigma0 - background_error must be positive, got {self.sigma0 - eps}")
        if self.z0.size < 2 or np.any(~np.isfinite(self.z0)):
            p.append("z0 needs one finite value per electrode (at least two)")
        elif not np.all(self.z0 - gam > 0):
            p.append("z0 - impedance_error must be positive on every electrode")
        if self.polarity == "resistive":
            if not c > eps:
                p.append(f"resistive inclusions need contrast > background_error ({c} <= {eps})")
            if not self.sigma0 - c > 0:
                p.append(f"resistive inclusions need sigma0 - contrast > 0, got {self.sigma0 - c}")
        if self.sigma_max is not None and not self.sigma_max >= self.sigma0 + c:
            p.append(f"sigma_max must be at least sigma0 + contrast, got {self.sigma_max}")
        return p

    @property
    def n_electrodes(self) -> int:
        return self.z0.size

    @property
    def sigma_b_min(self) -> float:
        return self.sigma0 - self.background_error

    @property
    def sigma_b_max(self) -> float:
        return self.sigma0 + self.background_error

    @property
    def sigma_d_min(self) -> float:
        return self.sigma0 + self.contrast

    @property
    def sigma_d_max(self) -> float:
        return self.sigma0 - self.contrast

    @property
    def z_min(self) -> np.ndarray:
        return self.z0 - self.impedance_error

    @property
    def z_max(self) -> np.ndarray:
        return self.z0 + self.impedance_error

    def linearized_contrast(self) -> float:
        """Contrast level multiplying the linearised test direction."""
        if self.polarity == "conductive":
            if self.sigma_max is None:
                raise SettingError(["linearized conductive tests need sigma_max"])
            return (self.contrast + self.background_error) * self.sigma_b_min / self.sigma_max
        return -(self.contrast + self.background_error)

    def replace(self, **changes) -> "SettingAssumptions":
        fields = dict(
            sigma0=self.sigma0,
            contrast=self.contrast,
            z0=self.z0,
            background_error=self.background_error,
            impedance_error=self.impedance_error,
            noise=self.noise,
            polarity=self.polarity,
            sigma_max=self.sigma_max,
            roi=self.roi,
        )
        fields.update(changes)
        return SettingAssumptions(**fields)
