"""Numerical checks of the monotonicity relation and its energy bounds."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cem import CemSystem, electrode_residual_energy, gradient_energy_density
from .mesh import Mesh
from .numerics import min_eig, psd_tolerance

SANDWICH_RTOL = 1e-6


class OrderingError(ValueError):
    pass


def monotonicity_check(sigma1, z1, sigma2, z2, mesh: Mesh) -> float:
    """Smallest eigenvalue of ``R(sigma1, z1) - R(sigma2, z2)``.

    Requires ``sigma1 <= sigma2`` per triangle and ``z1 >= z2`` per electrode,
    in which case the result is non-negative up to :func:`psd_tolerance`.
    """
    s1, s2 = _broadcast(sigma1, mesh.n_triangles), _broadcast(sigma2, mesh.n_triangles)
    w1, w2 = _broadcast(z1, mesh.n_electrodes), _broadcast(z2, mesh.n_electrodes)
    if np.any(s1 > s2):
        raise OrderingError("sigma1 must not exceed sigma2 anywhere")
    if np.any(w1 < w2):
        raise OrderingError("z1 must be at least z2 on every electrode")
    D = CemSystem(mesh, s1, w1).measurement_matrix() - CemSystem(mesh, s2, w2).measurement_matrix()
    return min_eig(D)


def monotonicity_tolerance(sigma1, z1, sigma2, z2, mesh: Mesh) -> float:
    D = CemSystem(mesh, sigma1, z1).measurement_matrix() - CemSystem(
        mesh, sigma2, z2
    ).measurement_matrix()
    return psd_tolerance(D)


def _broadcast(v, n) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return np.full(n, float(v)) if v.ndim == 0 else v


@dataclass(frozen=True)
class Sandwich:
    lower: float
    middle: float
    upper: float

    @property
    def slack(self) -> float:
        floor = 1e3 * np.finfo(float).eps
        return SANDWICH_RTOL * max(abs(self.lower), abs(self.upper), floor)

    @property
    def ordered(self) -> bool:
        return self.lower <= self.middle + self.slack and self.middle <= self.upper + self.slack

    def __iter__(self):
        return iter((self.lower, self.middle, self.upper))


def sandwich_check(sigma1, z1, sigma2, z2, w, mesh: Mesh) -> Sandwich:
    """Energy bounds around ``w^T (R(sigma2, z2) - R(sigma1, z1)) w``.

    Both bounds are evaluated on the potential ``(v2, V2)`` of the second
    pair driven by ``w``.
    """
    s1, s2 = _broadcast(sigma1, mesh.n_triangles), _broadcast(sigma2, mesh.n_triangles)
    y1, y2 = _broadcast(z1, mesh.n_electrodes), _broadcast(z2, mesh.n_electrodes)
    w = np.asarray(w, dtype=float)
    sys1, sys2 = CemSystem(mesh, s1, y1), CemSystem(mesh, s2, y2)
    middle = float(w @ (sys2.measurement_matrix() - sys1.measurement_matrix()) @ w)

    sol = sys2.drive_solution(w)
    area = mesh.triangle_areas
    grad2 = gradient_energy_density(sys2, sol)
    surf = electrode_residual_energy(sys2, sol)
    dz = 1.0 / y1 - 1.0 / y2

    upper = np.sum(area * (s1 - s2) * grad2) + np.sum(dz * surf)
    lower = np.sum(area * (s2 / s1) * (s1 - s2) * grad2) + np.sum((y1 / y2) * dz * surf)
    return Sandwich(float(lower), middle, float(upper))
