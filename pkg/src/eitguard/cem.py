"""Complete electrode model: P1 finite elements and the measurement matrix.

Unknowns are the nodal potentials followed by the potentials of electrodes
``1 .. L-1``; electrode ``L`` is grounded and eliminated, which keeps the
system symmetric positive definite.  With ``M_l`` the boundary mass matrix of
electrode ``l`` and ``b_l`` its load vector the blocks are::

    [ K(sigma) + sum_l M_l / z_l      -b_l / z_l     ]
    [ -b_l^T / z_l                    |E_l| / z_l    ]

A unit current on electrode ``i`` (returned through electrode ``L``) is the
right-hand side ``e_i`` on the electrode block.  Units are mA, mV, S/m and
Ohm m^2, so the measurement matrix is in mV per mA.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .mesh import Mesh
from .numerics import SPDFactor, symmetrize

logger = logging.getLogger(__name__)

RECIPROCITY_RTOL = 1e-8


class CemError(ValueError):
    pass


def as_conductivity(mesh: Mesh, sigma) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim == 0:
        sigma = np.full(mesh.n_triangles, float(sigma))
    if sigma.shape != (mesh.n_triangles,):
        raise CemError(f"conductivity needs {mesh.n_triangles} values, got shape {sigma.shape}")
    if not np.all(np.isfinite(sigma)) or np.any(sigma <= 0):
        raise CemError("conductivity must be strictly positive and finite")
    return sigma


def as_impedances(mesh: Mesh, z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.ndim == 0:
        z = np.full(mesh.n_electrodes, float(z))
    if z.shape != (mesh.n_electrodes,):
        raise CemError(f"contact impedances need {mesh.n_electrodes} values, got shape {z.shape}")
    if not np.all(np.isfinite(z)) or np.any(z <= 0):
        raise CemError("contact impedances must be strictly positive and finite")
    return z


class _MeshOperators:
    """Conductivity independent pieces of the discretisation."""

    def __init__(self, mesh: Mesh):
        n, L = mesh.n_nodes, mesh.n_electrodes
        g = mesh.basis_gradients
        area = mesh.triangle_areas
        local = area[:, None, None] * np.einsum("tad,tbd->tab", g, g)
        tri = mesh.triangles
        self.rows = np.repeat(tri, 3, axis=1).ravel()
        self.cols = np.tile(tri, (1, 3)).ravel()
        self.local = local.reshape(len(tri), 9)

        edges, tags, lengths = mesh.boundary_edges, mesh.edge_electrode, mesh.edge_lengths
        self.mass = []
        self.load = []
        for l in range(L):
            sel = tags == l
            e, ln = edges[sel], lengths[sel]
            r = np.concatenate([e[:, 0], e[:, 1], e[:, 0], e[:, 1]])
            c = np.concatenate([e[:, 0], e[:, 1], e[:, 1], e[:, 0]])
            v = np.concatenate([ln / 3, ln / 3, ln / 6, ln / 6])
            self.mass.append(sp.csr_matrix((v, (r, c)), shape=(n, n)))
            self.load.append(np.bincount(e.ravel(), weights=np.repeat(ln / 2, 2), minlength=n))
        self.electrode_lengths = np.array([b.sum() for b in self.load])
        if np.any(self.electrode_lengths <= 0):
            raise CemError("every electrode needs at least one tagged boundary edge")

    def stiffness(self, sigma: np.ndarray, n: int) -> sp.csr_matrix:
        data = (sigma[:, None] * self.local).ravel()
        return sp.csr_matrix((data, (self.rows, self.cols)), shape=(n, n))


_OPERATORS: dict[int, tuple[Mesh, _MeshOperators]] = {}


def mesh_operators(mesh: Mesh) -> _MeshOperators:
    hit = _OPERATORS.get(id(mesh))
    if hit is not None and hit[0] is mesh:
        return hit[1]
    ops = _MeshOperators(mesh)
    if len(_OPERATORS) > 16:
        _OPERATORS.clear()
    _OPERATORS[id(mesh)] = (mesh, ops)
    return ops


@dataclass(frozen=True)
class ForwardSolution:
    u: np.ndarray
    U: np.ndarray
    w: np.ndarray


class CemSystem:
    """Assembled and factorized CEM system for one ``(sigma, z)`` pair."""

    def __init__(self, mesh: Mesh, sigma, z):
        self.mesh = mesh
        self.sigma = as_conductivity(mesh, sigma)
        self.z = as_impedances(mesh, z)
        self.sigma.setflags(write=False)
        self.z.setflags(write=False)
        n, L = mesh.n_nodes, mesh.n_electrodes
        ops = mesh_operators(mesh)
        A_uu = ops.stiffness(self.sigma, n)
        for l in range(L):
            A_uu = A_uu + ops.mass[l] / self.z[l]
        B = np.column_stack([-ops.load[l] / self.z[l] for l in range(L - 1)])
        C = np.diag(ops.electrode_lengths[: L - 1] / self.z[: L - 1])
        self.matrix = sp.bmat([[A_uu, sp.csr_matrix(B)], [sp.csr_matrix(B.T), C]], format="csc")
        self.factor = SPDFactor(self.matrix)
        self.asymmetry = float("nan")

    @property
    def n_nodes(self) -> int:
        return self.mesh.n_nodes

    @property
    def n_electrodes(self) -> int:
        return self.mesh.n_electrodes

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def _solve_drives(self, W: np.ndarray) -> np.ndarray:
        n = self.n_nodes
        rhs = np.zeros((self.dimension, W.shape[1]))
        rhs[n:] = W
        return self.factor.solve(rhs)

    @cached_property
    def unit_solutions(self) -> np.ndarray:
        """Solution vectors for unit drives ``e_1 .. e_{L-1}``, shape (dim, L-1)."""
        X = self._solve_drives(np.eye(self.n_electrodes - 1))
        X.setflags(write=False)
        return X

    @property
    def potentials(self) -> np.ndarray:
        """Interior potentials of the unit drives, shape (nodes, L-1)."""
        return self.unit_solutions[: self.n_nodes]

    @cached_property
    def potential_gradients(self) -> np.ndarray:
        """Piecewise constant gradients of the unit-drive potentials, (T, L-1, 2)."""
        u = self.potentials[self.mesh.triangles]  # (T, 3, L-1)
        G = np.einsum("tak,tad->tkd", u, self.mesh.basis_gradients)
        G.setflags(write=False)
        return G

    def measurement_matrix(self) -> np.ndarray:
        raw = np.array(self.unit_solutions[self.n_nodes :])
        R, asym = symmetrize(raw)
        self.asymmetry = asym
        logger.debug("measurement matrix asymmetry %.3e", asym)
        if asym > RECIPROCITY_RTOL:
            raise CemError(f"measurement matrix asymmetry {asym:.3e} exceeds {RECIPROCITY_RTOL}")
        return R

    def drive_solution(self, w) -> ForwardSolution:
        w = np.asarray(w, dtype=float)
        if w.shape != (self.n_electrodes - 1,):
            raise CemError(f"drive needs {self.n_electrodes - 1} currents, got shape {w.shape}")
        x = self._solve_drives(w[:, None])[:, 0]
        U = np.append(x[self.n_nodes :], 0.0)
        return ForwardSolution(x[: self.n_nodes], U, w)

    def gradient_inner_products(self, region) -> np.ndarray:
        """``(sum over region of area * grad u_i . grad u_j)_{ij}``."""
        region = np.asarray(region, dtype=int)
        if region.size == 0:
            raise CemError("region must contain at least one triangle")
        G = self.potential_gradients[region]
        a = self.mesh.triangle_areas[region]
        M = np.einsum("t,tid,tjd->ij", a, G, G)
        return 0.5 * (M + M.T)


def assemble(mesh: Mesh, sigma, z) -> CemSystem:
    return CemSystem(mesh, sigma, z)


def measurement_matrix(system_or_mesh, sigma=None, z=None) -> np.ndarray:
    """Measurement matrix of an assembled system, or of ``(mesh, sigma, z)``."""
    if isinstance(system_or_mesh, CemSystem):
        return system_or_mesh.measurement_matrix()
    return CemSystem(system_or_mesh, sigma, z).measurement_matrix()


def drive_solution(system: CemSystem, w) -> ForwardSolution:
    return system.drive_solution(w)


def gradient_inner_products(system: CemSystem, region) -> np.ndarray:
    return system.gradient_inner_products(region)


def electrode_residual_energy(system: CemSystem, sol: ForwardSolution) -> np.ndarray:
    """``int_{E_l} (u - U_l)^2 ds`` per electrode, exact for P1 traces."""
    ops = mesh_operators(system.mesh)
    out = np.empty(system.n_electrodes)
    for l in range(system.n_electrodes):
        d = sol.u - sol.U[l]
        out[l] = d @ (ops.mass[l] @ d)
    return out


def gradient_energy_density(system: CemSystem, sol: ForwardSolution) -> np.ndarray:
    """``|grad u|^2`` per triangle for a drive solution."""
    g = np.einsum("ta,tad->td", sol.u[system.mesh.triangles], system.mesh.basis_gradients)
    return np.sum(g * g, axis=1)
