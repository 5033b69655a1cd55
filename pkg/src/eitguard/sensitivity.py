"""Linearised measurements and the per-triangle sensitivity matrix."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .cem import CemSystem
from .mesh import Partition

_MAGIC = b"EITSENS1"


def jacobian_of_element(system: CemSystem, region) -> np.ndarray:
    """Derivative of the measurements along the indicator of ``region``.

    Equals minus the Gram matrix of the unit-drive potential gradients over
    ``region``, so it is negative semidefinite.
    """
    return -system.gradient_inner_products(region)


class SensitivityMatrix:
    """Blocks ``S[r, i, j] = -int_{q_r} grad u_i . grad u_j``, triangle-major.

    Memory is ``(L-1)^2 * n_triangles`` doubles; use
    :func:`element_jacobians` when only partition aggregates are needed.
    """

    def __init__(self, blocks: np.ndarray):
        blocks = np.asarray(blocks, dtype=float)
        if blocks.ndim != 3 or blocks.shape[1] != blocks.shape[2]:
            raise ValueError(f"expected blocks of shape (T, n, n), got {blocks.shape}")
        self.blocks = blocks

    @property
    def shape(self):
        """``(L-1, L-1, n_triangles)``, matching ``S[i, j, r]`` indexing."""
        T, n, m = self.blocks.shape
        return n, m, T

    def __getitem__(self, idx):
        i, j, r = idx
        return self.blocks[r, i, j]

    def aggregate(self, region) -> np.ndarray:
        return self.blocks[np.asarray(region, dtype=int)].sum(axis=0)

    def aggregate_partition(self, partition: Partition) -> list[np.ndarray]:
        return [self.aggregate(e) for e in partition.elements]

    def as_matrix(self) -> np.ndarray:
        """Stacked layout with row ``j * (L-1) + i`` and column ``r``."""
        T, n, _ = self.blocks.shape
        return self.blocks.transpose(2, 1, 0).reshape(n * n, T)

    def dump(self, path) -> None:
        """Binary layout: 8-byte magic, three little-endian int64 (T, n, n),
        then ``T * n * n`` little-endian float64 in row-major block order."""
        T, n, m = self.blocks.shape
        with open(Path(path), "wb") as fh:
            fh.write(_MAGIC)
            fh.write(np.array([T, n, m], dtype="<i8").tobytes())
            fh.write(np.ascontiguousarray(self.blocks, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path) -> "SensitivityMatrix":
        raw = Path(path).read_bytes()
        if raw[:8] != _MAGIC:
            raise ValueError(f"{path} is not a sensitivity dump")
        T, n, m = np.frombuffer(raw[8:32], dtype="<i8")
        data = np.frombuffer(raw[32:], dtype="<f8")
        if data.size != T * n * m:
            raise ValueError(f"{path} is truncated")
        return cls(data.reshape(T, n, m).copy())


def sensitivity_matrix(system: CemSystem) -> SensitivityMatrix:
    G = system.potential_gradients
    a = system.mesh.triangle_areas
    B = -np.einsum("t,tid,tjd->tij", a, G, G)
    return SensitivityMatrix(0.5 * (B + B.transpose(0, 2, 1)))


def element_jacobians(system: CemSystem, partition: Partition) -> list[np.ndarray]:
    """Jacobians of every partition element without materialising ``S``."""
    return [jacobian_of_element(system, e) for e in partition.elements]
