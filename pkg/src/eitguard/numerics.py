"""Sparse SPD solves and dense symmetric eigenvalues.

The sparse side wraps SuperLU in symmetric mode: a minimum-degree ordering of
``A + A^T`` applied symmetrically and diagonal pivots only, which for a
symmetric matrix is an LDL^T factorization.  A non-positive pivot therefore
proves the matrix is not positive definite.

The dense side is a cyclic Jacobi eigensolver with round-robin pair ordering,
so that every round rotates ``n // 2`` disjoint index pairs at once.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

SYMMETRY_RTOL = 1e-9
EIG_RESIDUAL_RTOL = 1e-10


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    pass


class SPDFactor:
    """Reusable factorization of a sparse symmetric positive definite matrix.

    Solves are read-only on the factor, so one instance may serve any number
    of right-hand sides.
    """

    def __init__(self, A):
        A = sp.csc_matrix(A, dtype=float)
        if A.shape[0] != A.shape[1]:
            raise ValueError(f"matrix must be square, got {A.shape}")
        scale = abs(A).max() if A.nnz else 0.0
        if A.nnz and abs(A - A.T).max() > 1e-12 * scale:
            raise ValueError("matrix is not symmetric")
        self.A = A
        self.shape = A.shape
        try:
            lu = splu(
                A,
                permc_spec="MMD_AT_PLUS_A",
                diag_pivot_thresh=0.0,
                options={"SymmetricMode": True},
            )
        except RuntimeError as exc:
            raise NotPositiveDefiniteError(f"matrix is singular: {exc}") from exc
        if not np.array_equal(lu.perm_r, lu.perm_c):
            raise NotPositiveDefiniteError("factorization needed off-diagonal pivoting")
        pivots = lu.U.diagonal()
        if np.any(~np.isfinite(pivots)) or np.any(pivots <= 0):
            k = int(np.argmin(pivots))
            raise NotPositiveDefiniteError(f"non-positive pivot {pivots[k]:.3e} at step {k}")
        self._lu = lu

    def solve(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        x = self._lu.solve(b)
        # one step of iterative refinement
        r = b - self.A @ x
        return x + self._lu.solve(r)


def factorize_spd(A) -> SPDFactor:
    return SPDFactor(A)


def solve_spd(A, b) -> np.ndarray:
    """Solve ``A x = b`` for sparse symmetric positive definite ``A``."""
    return SPDFactor(A).solve(b)


@dataclass(frozen=True)
class SymEigResult:
    eigenvalues: np.ndarray
    residual_bound: float
    eigenvectors: np.ndarray | None = None


def _check_symmetric(A) -> np.ndarray:
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    s = float(np.max(np.abs(A))) if A.size else 0.0
    if s > 0 and np.linalg.norm((A - A.T) / s) > SYMMETRY_RTOL * np.linalg.norm(A / s):
        raise ValueError("matrix is not symmetric")
    return 0.5 * (A + A.T)


def _round_robin(n: int):
    """Rounds of disjoint index pairs covering every pair exactly once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[k], players[m - 1 - k]) for k in range(m // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p < n and q < n]
        if pairs:
            rounds.append(np.array(pairs).T)
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def sym_eig(A, max_sweeps: int = 60) -> SymEigResult:
    """All eigenvalues of a dense symmetric matrix, ascending."""
    A_sym = _check_symmetric(A)
    n = A_sym.shape[0]
    v = np.eye(n)
    if n == 0:
        return SymEigResult(np.zeros(0), 0.0, v)
    # work on a copy scaled to unit max entry so squares neither under- nor overflow
    scale = float(np.max(np.abs(A_sym)))
    if scale == 0.0:
        return SymEigResult(np.zeros(n), 0.0, v)
    a = A_sym / scale
    fro = np.linalg.norm(a)
    rounds = _round_robin(n)
    prev_off = np.inf
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        # stop at rounding level, or once a sweep no longer helps
        if off <= 1e-15 * fro or (off <= 1e-12 * fro and off >= prev_off):
            break
        prev_off = off
        for P, Q in rounds:
            apq = a[P, Q]
            active = np.abs(apq) > 1e-300
            if not np.any(active):
                continue
            P, Q, apq = P[active], Q[active], apq[active]
            theta = (a[Q, Q] - a[P, P]) / (2.0 * apq)
            t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
            t[theta == 0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            ap, aq = a[:, P].copy(), a[:, Q].copy()
            a[:, P] = c * ap - s * aq
            a[:, Q] = s * ap + c * aq
            ap, aq = a[P, :].copy(), a[Q, :].copy()
            a[P, :] = c[:, None] * ap - s[:, None] * aq
            a[Q, :] = s[:, None] * ap + c[:, None] * aq
            a[P, Q] = a[Q, P] = 0.0
            vp, vq = v[:, P].copy(), v[:, Q].copy()
            v[:, P] = c * vp - s * vq
            v[:, Q] = s * vp + c * vq
    else:
        raise np.linalg.LinAlgError("Jacobi iteration did not converge")

    lam = scale * np.diag(a)
    order = np.argsort(lam, kind="stable")
    lam, v = lam[order], v[:, order]
    residual = float(np.max(np.linalg.norm(A_sym @ v - v * lam, axis=0)))
    norm2 = float(np.max(np.abs(lam)))
    if residual > EIG_RESIDUAL_RTOL * max(norm2, np.finfo(float).tiny):
        raise np.linalg.LinAlgError(f"eigen residual {residual:.3e} exceeds bound")
    return SymEigResult(lam, residual, v)


def eigvalsh(A) -> np.ndarray:
    return sym_eig(A).eigenvalues


def spectral_norm(A) -> float:
    lam = sym_eig(A).eigenvalues
    return float(np.max(np.abs(lam))) if len(lam) else 0.0


def min_eig(A) -> float:
    return float(sym_eig(A).eigenvalues[0])


def max_eig(A) -> float:
    return float(sym_eig(A).eigenvalues[-1])


def psd_tolerance(D) -> float:
    """Slack for reading ``D >= 0`` in floating point."""
    return 1e-9 * max(1.0, spectral_norm(D))


def is_psd(D) -> bool:
    """``True`` when ``D`` is positive semidefinite up to :func:`psd_tolerance`."""
    lam = sym_eig(D).eigenvalues
    return bool(lam[0] >= -1e-9 * max(1.0, float(np.max(np.abs(lam)))))


def symmetrize(A) -> tuple[np.ndarray, float]:
    """Symmetric part of ``A`` and its relative asymmetry ``||A - A^T|| / ||A||``."""
    A = np.asarray(A, dtype=float)
    sym = 0.5 * (A + A.T)
    scale = np.linalg.norm(A, 2) if A.size else 0.0
    asym = np.linalg.norm(A - A.T, 2) / scale if scale > 0 else 0.0
    return sym, float(asym)
