"""Domains, boundary electrodes, structured triangular meshes and partitions.

All geometry is centred at the origin.  The boundary of every domain is
parameterised by arclength ``s``, counter-clockwise:

* rectangle: ``s = 0`` is the bottom-right corner, so the right edge comes
  first, then the top, the left and the bottom edge;
* disk: ``s = 0`` is the point at angle zero.

Electrode arcs are stored as ``(start, end)`` pairs in this parameterisation,
with ``0 <= start < perimeter`` and ``start < end <= start + perimeter``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

ELECTRODE_REGIONS = ("full_boundary", "lower_half", "lower_edge")
MAX_SNAP_ERROR = 0.02


class MeshError(ValueError):
    pass


@dataclass(frozen=True)
class DomainSpec:
    shape: str
    width: float = 0.0
    height: float = 0.0
    diameter: float = 0.0

    def __post_init__(self):
        if self.shape == "rectangle":
            dims = (self.width, self.height)
        elif self.shape == "disk":
            dims = (self.diameter,)
        else:
            raise MeshError(f"unknown domain shape {self.shape!r}")
        if not all(np.isfinite(d) and d > 0 for d in dims):
            raise MeshError(f"{self.shape} dimensions must be strictly positive, got {dims}")

    @classmethod
    def rectangle(cls, width: float, height: float) -> "DomainSpec":
        return cls("rectangle", width=float(width), height=float(height))

    @classmethod
    def disk(cls, diameter: float) -> "DomainSpec":
        return cls("disk", diameter=float(diameter))

    @property
    def radius(self) -> float:
        return 0.5 * self.diameter

    @property
    def min_dimension(self) -> float:
        return min(self.width, self.height) if self.shape == "rectangle" else self.diameter

    @property
    def perimeter(self) -> float:
        if self.shape == "rectangle":
            return 2.0 * (self.width + self.height)
        return math.pi * self.diameter

    @property
    def area(self) -> float:
        if self.shape == "rectangle":
            return self.width * self.height
        return math.pi * self.radius**2

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        if self.shape == "rectangle":
            return (-self.width / 2, self.width / 2, -self.height / 2, self.height / 2)
        r = self.radius
        return (-r, r, -r, r)

    def point(self, s) -> np.ndarray:
        """Boundary point(s) at arclength ``s`` (taken modulo the perimeter)."""
        s = np.mod(np.asarray(s, dtype=float), self.perimeter)
        if self.shape == "disk":
            t = s / self.radius
            return np.stack([self.radius * np.cos(t), self.radius * np.sin(t)], axis=-1)
        w, h = self.width, self.height
        x = np.empty_like(s)
        y = np.empty_like(s)
        right = s < h
        top = (s >= h) & (s < h + w)
        left = (s >= h + w) & (s < 2 * h + w)
        bottom = s >= 2 * h + w
        x[right], y[right] = w / 2, -h / 2 + s[right]
        x[top], y[top] = w / 2 - (s[top] - h), h / 2
        x[left], y[left] = -w / 2, h / 2 - (s[left] - h - w)
        x[bottom], y[bottom] = -w / 2 + (s[bottom] - 2 * h - w), -h / 2
        return np.stack([x, y], axis=-1)

    def arclength(self, points) -> np.ndarray:
        """Inverse of :meth:`point` for points on the boundary."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        x, y = p[:, 0], p[:, 1]
        if self.shape == "disk":
            return np.mod(np.arctan2(y, x), 2 * np.pi) * self.radius
        w, h = self.width, self.height
        scale = max(w, h)
        tol = 1e-9 * scale
        # distance to each edge decides which edge a point belongs to
        d = np.stack([np.abs(x - w / 2), np.abs(y - h / 2), np.abs(x + w / 2), np.abs(y + h / 2)])
        edge = np.argmin(d, axis=0)
        s = np.empty(len(x))
        s[edge == 0] = y[edge == 0] + h / 2
        s[edge == 1] = h + (w / 2 - x[edge == 1])
        s[edge == 2] = h + w + (h / 2 - y[edge == 2])
        s[edge == 3] = 2 * h + w + (x[edge == 3] + w / 2)
        # the bottom-right corner belongs to s = 0, not s = perimeter
        s[np.abs(s - self.perimeter) < tol] = 0.0
        return s

    def region_interval(self, region: str) -> tuple[float, float, bool]:
        """Return ``(start, length, closed)`` of a named boundary region."""
        if region == "full_boundary":
            return 0.0, self.perimeter, True
        if region == "lower_half":
            if self.shape == "disk":
                return math.pi * self.radius, math.pi * self.radius, False
            w, h = self.width, self.height
            return 1.5 * h + w, w + h, False
        if region == "lower_edge":
            if self.shape != "rectangle":
                raise MeshError("region 'lower_edge' is only defined for rectangles")
            return 2 * self.height + self.width, self.width, False
        raise MeshError(f"unknown electrode region {region!r}; expected one of {ELECTRODE_REGIONS}")


@dataclass(frozen=True)
class ElectrodeLayout:
    domain: DomainSpec
    arcs: tuple[tuple[float, float], ...]

    def __post_init__(self):
        arcs = tuple((float(a), float(b)) for a, b in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        P = self.domain.perimeter
        if len(arcs) < 2:
            raise MeshError("at least two electrodes are required")
        for a, b in arcs:
            if not (0 <= a < P) or not (a < b <= a + P):
                raise MeshError(f"invalid electrode arc ({a}, {b}) for perimeter {P}")
        # pairwise disjoint on the circle of circumference P
        order = sorted(arcs)
        for (a0, b0), (a1, _) in zip(order, order[1:]):
            if b0 > a1:
                raise MeshError("electrode arcs overlap")
        first, last = order[0], order[-1]
        if last[1] > first[0] + P:
            raise MeshError("electrode arcs overlap")

    @property
    def count(self) -> int:
        return len(self.arcs)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([b - a for a, b in self.arcs])

    def electrode_at(self, s) -> np.ndarray:
        """Electrode index covering arclength ``s``, ``-1`` if insulated."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        P = self.domain.perimeter
        out = np.full(s.shape, -1, dtype=int)
        for k, (a, b) in enumerate(self.arcs):
            rel = np.mod(s - a, P)
            out[rel < b - a] = k
        return out


def place_electrodes(
    domain: DomainSpec, L: int, coverage_fraction: float, region: str = "full_boundary"
) -> ElectrodeLayout:
    """Place ``L`` equal, equally spaced electrodes in a boundary region.

    The region is cut into ``L`` slots of equal length and every electrode is
    centred in its slot, so the electrodes jointly cover ``coverage_fraction``
    of the region.  Numbering follows the arclength direction of the region
    (counter-clockwise, i.e. left to right for the lower regions).
    """
    if int(L) != L or L < 2:
        raise MeshError(f"need an integer L >= 2, got {L}")
    if not 0 < coverage_fraction < 1:
        raise MeshError(f"coverage_fraction must lie in (0, 1), got {coverage_fraction}")
    start, length, _ = domain.region_interval(region)
    slot = length / L
    arc = coverage_fraction * slot
    P = domain.perimeter
    arcs = []
    for k in range(int(L)):
        a = start + k * slot + 0.5 * (slot - arc)
        a_mod = math.fmod(a, P)
        arcs.append((a_mod, a_mod + arc))
    return ElectrodeLayout(domain, tuple(arcs))


@dataclass(frozen=True, eq=False)
class Mesh:
    """Conforming triangulation with electrode-tagged boundary edges.

    ``edge_electrode[k]`` is the electrode index of ``boundary_edges[k]`` or
    ``-1`` for insulated boundary.
    """

    nodes: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    edge_electrode: np.ndarray
    domain: DomainSpec
    electrodes: ElectrodeLayout
    target_edge_length: float = float("nan")

    def __post_init__(self):
        for name in ("nodes", "triangles", "boundary_edges", "edge_electrode"):
            arr = np.array(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def n_electrodes(self) -> int:
        return self.electrodes.count

    @cached_property
    def signed_areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @property
    def triangle_areas(self) -> np.ndarray:
        return np.abs(self.signed_areas)

    @cached_property
    def centroids(self) -> np.ndarray:
        return self.nodes[self.triangles].mean(axis=1)

    @cached_property
    def basis_gradients(self) -> np.ndarray:
        """Gradients of the three P1 hat functions per triangle, shape (T, 3, 2)."""
        p = self.nodes[self.triangles]
        x, y = p[..., 0], p[..., 1]
        two_a = 2.0 * self.signed_areas
        gx = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
        gy = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
        return np.stack([gx, gy], axis=-1) / two_a[:, None, None]

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        p = self.nodes[self.boundary_edges]
        return np.linalg.norm(p[:, 1] - p[:, 0], axis=1)

    def electrode_edges(self, l: int) -> np.ndarray:
        return self.boundary_edges[self.edge_electrode == l]

    def electrode_lengths(self) -> np.ndarray:
        return np.bincount(
            self.edge_electrode[self.edge_electrode >= 0],
            weights=self.edge_lengths[self.edge_electrode >= 0],
            minlength=self.n_electrodes,
        )

    def snap_errors(self) -> np.ndarray:
        """Relative difference between tagged edge length and true arc length."""
        true = self.electrodes.lengths
        return np.abs(self.electrode_lengths() - true) / true

    def arc_mismatch(self) -> float:
        """Total arclength where tagging and true electrode arcs disagree."""
        P = self.domain.perimeter
        s = self.domain.arclength(self.nodes[self.boundary_edges].reshape(-1, 2)).reshape(-1, 2)
        seg_len = np.mod(s[:, 1] - s[:, 0], P)
        total = 0.0
        for k, (a, b) in enumerate(self.electrodes.arcs):
            tagged = self.edge_electrode == k
            covered = 0.0
            for s0, ln in zip(s[tagged, 0], seg_len[tagged]):
                covered += _overlap_on_circle(s0, ln, a, b - a, P)
            total += (np.sum(seg_len[tagged]) - covered) + ((b - a) - covered)
        return float(total)

    def edge_lengths_all(self) -> np.ndarray:
        tri = self.triangles
        e = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
        e = np.unique(np.sort(e, axis=1), axis=0)
        return np.linalg.norm(self.nodes[e[:, 1]] - self.nodes[e[:, 0]], axis=1)


def _overlap_on_circle(a0, la, b0, lb, P) -> float:
    total = 0.0
    for shift in (-P, 0.0, P):
        lo = max(a0, b0 + shift)
        hi = min(a0 + la, b0 + lb + shift)
        total += max(0.0, hi - lo)
    return total


def build_mesh(
    domain: DomainSpec,
    target_edge_length: float,
    electrodes: ElectrodeLayout | None = None,
) -> Mesh:
    """Structured triangulation of ``domain`` conforming to the electrode arcs.

    Rectangles use a tensor grid whose lines pass through every electrode
    endpoint, each cell split into two triangles with alternating diagonals.
    Disks use concentric node rings joined strip by strip; the outer ring
    contains every electrode endpoint.
    """
    h = float(target_edge_length)
    if not np.isfinite(h) or h <= 0:
        raise MeshError(f"target_edge_length must be positive, got {target_edge_length}")
    if h > domain.min_dimension:
        raise MeshError(
            f"target_edge_length {h} exceeds the smallest domain dimension {domain.min_dimension}"
        )
    if electrodes is None:
        electrodes = place_electrodes(domain, 2, 0.5)
    elif electrodes.domain != domain:
        raise MeshError("electrode layout belongs to a different domain")
    if domain.shape == "rectangle":
        nodes, tris = _rectangle_mesh(domain, h, electrodes)
    else:
        nodes, tris = _disk_mesh(domain, h, electrodes)

    edges, tags = _tag_boundary(domain, nodes, tris, electrodes)
    mesh = Mesh(nodes, tris, edges, tags, domain, electrodes, h)
    if np.any(mesh.signed_areas <= 0):
        raise MeshError("mesh generation produced a non-positive triangle")
    bad = mesh.snap_errors() > MAX_SNAP_ERROR
    if np.any(bad):
        raise MeshError(
            f"electrodes {np.flatnonzero(bad).tolist()} cannot be resolved at edge length {h}"
        )
    return mesh


def _merge_breakpoints(points, lo, hi, tol) -> np.ndarray:
    pts = np.sort(np.concatenate([[lo, hi], np.clip(points, lo, hi)]))
    merged = [[pts[0]]]
    for p in pts[1:]:
        if p - merged[-1][-1] <= tol:
            merged[-1].append(p)
        else:
            merged.append([p])
    out = np.array([np.mean(g) for g in merged])
    out[0], out[-1] = lo, hi
    return out


def _subdivide(breaks, h) -> np.ndarray:
    pieces = [breaks[:1]]
    for a, b in zip(breaks, breaks[1:]):
        n = max(1, math.ceil((b - a) / h - 1e-9))
        pieces.append(np.linspace(a, b, n + 1)[1:])
    return np.concatenate(pieces)


def _electrode_endpoints(electrodes: ElectrodeLayout) -> np.ndarray:
    ends = np.array([s for arc in electrodes.arcs for s in arc])
    return electrodes.domain.point(ends)


def _rectangle_mesh(domain: DomainSpec, h: float, electrodes: ElectrodeLayout):
    w2, h2 = domain.width / 2, domain.height / 2
    ends = _electrode_endpoints(electrodes)
    tol_corner = 1e-9 * max(domain.width, domain.height)
    on_x = np.abs(np.abs(ends[:, 1]) - h2) < tol_corner
    on_y = np.abs(np.abs(ends[:, 0]) - w2) < tol_corner
    merge_tol = min(0.25 * h, 0.005 * float(np.min(electrodes.lengths)))
    xs = _subdivide(_merge_breakpoints(ends[on_x, 0], -w2, w2, merge_tol), h)
    ys = _subdivide(_merge_breakpoints(ends[on_y, 1], -h2, h2, merge_tol), h)
    nx, ny = len(xs), len(ys)
    X, Y = np.meshgrid(xs, ys)
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    i, j = np.meshgrid(np.arange(nx - 1), np.arange(ny - 1))
    i, j = i.ravel(), j.ravel()
    n00 = j * nx + i
    n10 = n00 + 1
    n01 = n00 + nx
    n11 = n01 + 1
    flip = (i + j) % 2 == 1
    t1 = np.where(flip[:, None], np.column_stack([n00, n10, n01]), np.column_stack([n00, n10, n11]))
    t2 = np.where(flip[:, None], np.column_stack([n10, n11, n01]), np.column_stack([n00, n11, n01]))
    tris = np.empty((2 * len(n00), 3), dtype=int)
    tris[0::2], tris[1::2] = t1, t2
    return nodes, tris


def _disk_mesh(domain: DomainSpec, h: float, electrodes: ElectrodeLayout):
    R = domain.radius
    n_rings = max(1, math.ceil(R / h - 1e-9))
    radii = R * np.arange(1, n_rings + 1) / n_rings

    ends = np.array([s for arc in electrodes.arcs for s in arc]) / R
    ends = np.mod(ends, 2 * np.pi)
    dtheta = h / R
    merge_tol = min(0.25 * dtheta, 0.005 * float(np.min(electrodes.lengths)) / R)
    outer = _merge_breakpoints(ends, 0.0, 2 * np.pi, merge_tol)
    outer = _subdivide(outer, dtheta)[:-1]
    if len(outer) > 1 and 2 * np.pi - outer[-1] <= merge_tol:
        outer = outer[:-1]

    rings = []
    for k, r in enumerate(radii):
        if k == n_rings - 1:
            angles = outer
        else:
            m = max(6, math.ceil(2 * np.pi * r / h - 1e-9))
            angles = np.arange(m) * (2 * np.pi / m)
        rings.append((r, angles))

    nodes = [np.zeros((1, 2))]
    offsets = []
    count = 1
    for r, ang in rings:
        offsets.append(count)
        nodes.append(np.column_stack([r * np.cos(ang), r * np.sin(ang)]))
        count += len(ang)
    nodes = np.vstack(nodes)

    tris = []
    first = rings[0][1]
    for a in range(len(first)):
        tris.append((0, offsets[0] + a, offsets[0] + (a + 1) % len(first)))
    for k in range(len(rings) - 1):
        tris.extend(
            _zip_rings(rings[k][1], offsets[k], rings[k + 1][1], offsets[k + 1], nodes)
        )
    tris = np.array(tris, dtype=int)
    p = nodes[tris]
    d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
    neg = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0] < 0
    tris[neg] = tris[neg][:, [0, 2, 1]]
    return nodes, tris


def _zip_rings(inner, off_in, outer, off_out, nodes):
    """Triangulate the strip between two node rings sorted by angle.

    Walks both rings in angle order and at each step closes the triangle
    whose new diagonal is shorter.
    """
    m, n = len(inner), len(outer)
    j0 = int(np.argmin(np.abs(np.angle(np.exp(1j * (outer - inner[0]))))))
    out = []
    i = j = 0
    while i < m or j < n:
        ii, jj = off_in + i % m, off_out + (j0 + j) % n
        ii_next, jj_next = off_in + (i + 1) % m, off_out + (j0 + j + 1) % n
        if j >= n:
            advance_inner = True
        elif i >= m:
            advance_inner = False
        else:
            d_inner = np.linalg.norm(nodes[ii_next] - nodes[jj])
            d_outer = np.linalg.norm(nodes[jj_next] - nodes[ii])
            advance_inner = d_inner <= d_outer
        if advance_inner:
            out.append((ii, ii_next, jj))
            i += 1
        else:
            out.append((ii, jj_next, jj))
            j += 1
    return out


def _tag_boundary(domain, nodes, tris, electrodes):
    e = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    key = np.sort(e, axis=1)
    _, inv, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
    inv = np.asarray(inv).ravel()
    boundary = e[counts[inv] == 1]
    s = domain.arclength(nodes[boundary].reshape(-1, 2)).reshape(-1, 2)
    P = domain.perimeter
    length = np.mod(s[:, 1] - s[:, 0], P)
    mid = s[:, 0] + 0.5 * length
    tags = electrodes.electrode_at(mid)
    order = np.lexsort((s[:, 0],))
    return boundary[order], tags[order]


# ----------------------------------------------------------------------------
# partitions


@dataclass(frozen=True)
class UniformGrid:
    nx: int
    ny: int
    bounds: tuple[float, float, float, float] | None = None


@dataclass(frozen=True)
class SectorGrid:
    radial: int
    angular: int
    region: str = "full"
    r_min: float = 0.0
    r_max: float | None = None


@dataclass(frozen=True)
class TriangleList:
    sets: tuple


@dataclass(frozen=True, eq=False)
class Partition:
    elements: tuple
    n_triangles: int
    covers_domain: bool = field(default=False)

    def __post_init__(self):
        elems = tuple(np.unique(np.asarray(e, dtype=int)) for e in self.elements)
        for e in elems:
            e.setflags(write=False)
        object.__setattr__(self, "elements", elems)
        if not elems:
            raise MeshError("partition has no elements")
        seen = np.zeros(self.n_triangles, dtype=int)
        for k, e in enumerate(elems):
            if len(e) == 0:
                raise MeshError(f"partition element {k} captures no triangles")
            if e.min() < 0 or e.max() >= self.n_triangles:
                raise MeshError(f"partition element {k} references invalid triangles")
            seen[e] += 1
        if np.any(seen > 1):
            raise MeshError("partition elements overlap")
        object.__setattr__(self, "covers_domain", bool(np.all(seen == 1)))

    def __len__(self) -> int:
        return len(self.elements)

    @cached_property
    def labels(self) -> np.ndarray:
        """Element index per triangle, ``-1`` where no element applies."""
        lab = np.full(self.n_triangles, -1, dtype=int)
        for k, e in enumerate(self.elements):
            lab[e] = k
        return lab

    def indicator(self, s: int) -> np.ndarray:
        chi = np.zeros(self.n_triangles)
        chi[self.elements[s]] = 1.0
        return chi

    def union(self) -> np.ndarray:
        return np.flatnonzero(self.labels >= 0)


def build_partition(mesh: Mesh, spec) -> Partition:
    c = mesh.centroids
    if isinstance(spec, TriangleList):
        return Partition(tuple(spec.sets), mesh.n_triangles)
    if isinstance(spec, UniformGrid):
        if spec.nx < 1 or spec.ny < 1:
            raise MeshError("grid dimensions must be positive")
        x0, x1, y0, y1 = spec.bounds if spec.bounds is not None else mesh.domain.bounds
        fx = (c[:, 0] - x0) / (x1 - x0)
        fy = (c[:, 1] - y0) / (y1 - y0)
        inside = (fx >= 0) & (fx < 1) & (fy >= 0) & (fy < 1)
        ix = np.minimum((fx * spec.nx).astype(int), spec.nx - 1)
        iy = np.minimum((fy * spec.ny).astype(int), spec.ny - 1)
        cell = np.where(inside, iy * spec.nx + ix, -1)
        elems = [np.flatnonzero(cell == k) for k in range(spec.nx * spec.ny)]
        return Partition(tuple(elems), mesh.n_triangles)
    if isinstance(spec, SectorGrid):
        if mesh.domain.shape != "disk":
            raise MeshError("sector grids need a disk domain")
        if spec.radial < 1 or spec.angular < 1:
            raise MeshError("sector grid dimensions must be positive")
        theta0, theta1 = _sector_range(spec.region)
        r_max = mesh.domain.radius if spec.r_max is None else spec.r_max
        r = np.hypot(c[:, 0], c[:, 1])
        # centroids on the x axis are rounding noise away from it; half-disk
        # sectors exclude them instead of guessing a side
        y = np.where(np.abs(c[:, 1]) <= 1e-12 * mesh.domain.radius, 0.0, c[:, 1])
        t = np.mod(np.arctan2(y, c[:, 0]) - theta0, 2 * np.pi)
        fr = (r - spec.r_min) / (r_max - spec.r_min)
        ft = t / (theta1 - theta0)
        inside = (fr >= 0) & (fr <= 1) & (ft < 1)
        if spec.region == "lower_half":
            inside &= y < 0
        elif spec.region == "upper_half":
            inside &= y > 0
        ir = np.minimum((fr * spec.radial).astype(int), spec.radial - 1)
        it = np.minimum((ft * spec.angular).astype(int), spec.angular - 1)
        cell = np.where(inside, ir * spec.angular + it, -1)
        elems = [np.flatnonzero(cell == k) for k in range(spec.radial * spec.angular)]
        return Partition(tuple(elems), mesh.n_triangles)
    raise MeshError(f"unsupported partition spec {spec!r}")


def _sector_range(region: str) -> tuple[float, float]:
    if region == "full":
        return 0.0, 2 * np.pi
    if region == "lower_half":
        return np.pi, 2 * np.pi
    if region == "upper_half":
        return 0.0, np.pi
    raise MeshError(f"unknown sector region {region!r}")


def select_triangles(mesh: Mesh, region: dict) -> np.ndarray:
    """Triangles whose centroid lies in a simple region.

    ``region`` is a mapping with ``kind`` one of ``box`` (``bounds``),
    ``circle`` (``center``, ``radius``) or ``sector`` (``r_min``, ``r_max``,
    ``theta_min``, ``theta_max`` in radians).
    """
    c = mesh.centroids
    kind = region.get("kind")
    if kind == "box":
        x0, x1, y0, y1 = region["bounds"]
        sel = (c[:, 0] >= x0) & (c[:, 0] < x1) & (c[:, 1] >= y0) & (c[:, 1] < y1)
    elif kind == "circle":
        cx, cy = region["center"]
        sel = np.hypot(c[:, 0] - cx, c[:, 1] - cy) < region["radius"]
    elif kind == "sector":
        r = np.hypot(c[:, 0], c[:, 1])
        t = np.mod(np.arctan2(c[:, 1], c[:, 0]), 2 * np.pi)
        t0, t1 = region.get("theta_min", 0.0), region.get("theta_max", 2 * np.pi)
        sel = (r >= region.get("r_min", 0.0)) & (r < region.get("r_max", np.inf))
        sel &= (t >= t0) & (t < t1)
    else:
        raise MeshError(f"unknown region kind {kind!r}")
    idx = np.flatnonzero(sel)
    if len(idx) == 0:
        raise MeshError(f"region {region} captures no triangles")
    return idx


def partition_from_labels(labels: Sequence[int], n_elements: int) -> Partition:
    labels = np.asarray(labels)
    return Partition(tuple(np.flatnonzero(labels == k) for k in range(n_elements)), len(labels))
