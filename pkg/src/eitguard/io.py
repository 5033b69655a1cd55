"""Plain-text and SVG input/output."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .mesh import DomainSpec, ElectrodeLayout, Mesh, Partition


def save_measurements(path, R) -> None:
    """Full matrix, row-major, comma separated, 17 significant digits."""
    R = np.atleast_2d(np.asarray(R, dtype=float))
    with open(path, "w", newline="\n") as fh:
        for row in R:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def load_measurements(path) -> np.ndarray:
    try:
        R = np.loadtxt(path, delimiter=",", ndmin=2, comments="#")
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc
    if R.shape[0] != R.shape[1]:
        raise ValueError(f"{path}: measurement matrix must be square, got {R.shape}")
    return R


def export_mesh(mesh: Mesh, path) -> None:
    """Debug dump: node, triangle and tagged boundary-edge sections."""
    lines = ["# eitguard mesh v1", f"nodes {mesh.n_nodes}"]
    lines += [f"{x:.17g} {y:.17g}" for x, y in mesh.nodes]
    lines.append(f"triangles {mesh.n_triangles}")
    lines += [f"{a} {b} {c}" for a, b, c in mesh.triangles]
    lines.append(f"boundary_edges {len(mesh.boundary_edges)}")
    lines += [f"{a} {b} {t}" for (a, b), t in zip(mesh.boundary_edges, mesh.edge_electrode)]
    lines.append(f"electrodes {mesh.n_electrodes}")
    lines += [f"{a:.17g} {b:.17g}" for a, b in mesh.electrodes.arcs]
    Path(path).write_text("\n".join(lines) + "\n")


def import_mesh(path, domain: DomainSpec) -> Mesh:
    tokens = [ln.split() for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    pos = 0

    def section(name, cast):
        nonlocal pos
        head = tokens[pos]
        if head[0] != name:
            raise ValueError(f"{path}: expected section {name!r}, found {head[0]!r}")
        n = int(head[1])
        rows = np.array([[cast(v) for v in t] for t in tokens[pos + 1 : pos + 1 + n]])
        pos += n + 1
        return rows

    nodes = section("nodes", float)
    tris = section("triangles", int)
    edges = section("boundary_edges", int)
    arcs = section("electrodes", float)
    layout = ElectrodeLayout(domain, tuple(map(tuple, arcs)))
    return Mesh(nodes.reshape(-1, 2), tris.reshape(-1, 3), edges[:, :2], edges[:, 2], domain, layout)


def _lerp_colour(c0, c1, t):
    return tuple(int(round(a + (b - a) * t)) for a, b in zip(c0, c1))


def diverging_colour(value: float, vmax: float) -> str:
    """Blue for negative, white at zero, red for positive values."""
    t = 0.0 if vmax <= 0 else max(-1.0, min(1.0, value / vmax))
    white, blue, red = (247, 247, 247), (33, 102, 172), (178, 24, 43)
    rgb = _lerp_colour(white, red, t) if t >= 0 else _lerp_colour(white, blue, -t)
    return "#%02x%02x%02x" % rgb


def partition_svg(
    mesh: Mesh,
    partition: Partition,
    fill: dict,
    title: str = "",
    size: int = 480,
    extra_triangles: dict | None = None,
) -> str:
    """SVG drawing of the mesh with per-element fill colours.

    ``fill`` maps element index to a colour; ``extra_triangles`` maps
    colours to triangle index arrays drawn on top (e.g. an excluded region).
    """
    x0, x1, y0, y1 = mesh.domain.bounds
    pad = 0.06 * max(x1 - x0, y1 - y0)
    scale = size / (max(x1 - x0, y1 - y0) + 2 * pad)
    W = int(round((x1 - x0 + 2 * pad) * scale))
    H = int(round((y1 - y0 + 2 * pad) * scale)) + 24

    def px(p):
        return (p[0] - x0 + pad) * scale, (y1 + pad - p[1]) * scale + 24

    def poly(tri, colour, stroke="none"):
        pts = " ".join("%.2f,%.2f" % px(mesh.nodes[k]) for k in tri)
        return f'<polygon points="{pts}" fill="{colour}" stroke="{stroke}" stroke-width="0.2"/>'

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="6" y="16" font-family="sans-serif" font-size="13">{title}</text>',
    ]
    labels = partition.labels
    for t, tri in enumerate(mesh.triangles):
        colour = fill.get(int(labels[t]), "#e6e6e6") if labels[t] >= 0 else "#e6e6e6"
        out.append(poly(tri, colour, stroke=colour))
    for colour, tris in (extra_triangles or {}).items():
        for t in tris:
            out.append(poly(mesh.triangles[t], colour, stroke=colour))
    for e, tag in zip(mesh.boundary_edges, mesh.edge_electrode):
        (ax, ay), (bx, by) = px(mesh.nodes[e[0]]), px(mesh.nodes[e[1]])
        colour, width = ("#111111", 3.5) if tag >= 0 else ("#555555", 1.0)
        out.append(
            f'<line x1="{ax:.2f}" y1="{ay:.2f}" x2="{bx:.2f}" y2="{by:.2f}" '
            f'stroke="{colour}" stroke-width="{width}"/>'
        )
    for s, elem in enumerate(partition.elements):
        c = mesh.centroids[elem]
        a = mesh.triangle_areas[elem]
        cx, cy = px((c * a[:, None]).sum(axis=0) / a.sum())
        out.append(
            f'<text x="{cx:.1f}" y="{cy:.1f}" font-family="sans-serif" font-size="9" '
            f'text-anchor="middle">{s}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def margins_svg(mesh, partition, margins, title="element margins", **kw) -> str:
    vmax = float(np.max(np.abs(margins))) if len(margins) else 0.0
    fill = {s: diverging_colour(m, vmax) for s, m in enumerate(margins)}
    return partition_svg(mesh, partition, fill, title=title, **kw)


def detection_svg(mesh, partition, flags, title="marked elements", **kw) -> str:
    fill = {s: ("#d6604d" if f else "#d1e5f0") for s, f in enumerate(flags)}
    return partition_svg(mesh, partition, fill, title=title, **kw)
