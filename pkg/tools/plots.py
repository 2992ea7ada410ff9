"""SVG figures for subdivisions, secondary polytopes and degeneration curves."""

from __future__ import annotations

import io
import logging
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from scipy.spatial import ConvexHull  # noqa: E402

from toric.linalg import affine_rank  # noqa: E402
from toric.pointconfig import PointConfig, Subdivision  # noqa: E402

logger = logging.getLogger(__name__)

# Fixed ids and no timestamp, so the same figure gives the same bytes.
plt.rcParams["svg.hashsalt"] = "toric"
plt.rcParams["svg.fonttype"] = "none"


def _to_svg(fig) -> str:
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None}, bbox_inches="tight")
    plt.close(fig)
    return buf.getvalue()


def planar_coords(config: PointConfig, axes: Sequence[int] | None = None) -> np.ndarray | None:
    """Plane coordinates for drawing, or None when the data is not two-dimensional."""
    if axes is not None:
        return config.coords[:, list(axes)]
    if config.dim == 2:
        return config.coords
    if config.affine_dimension == 2:
        return config.affine_coords
    return None


def _outline(ax, pts: np.ndarray, **style) -> None:
    if len(pts) < 3 or affine_rank(pts) < 2:
        order = np.argsort(pts[:, 0] + 1e-3 * pts[:, 1])
        ax.plot(pts[order, 0], pts[order, 1], **style)
        return
    hull = ConvexHull(pts)
    ring = np.append(hull.vertices, hull.vertices[0])
    ax.plot(pts[ring, 0], pts[ring, 1], **style)


def subdivision_svg(config: PointConfig, subdivision: Subdivision, *, axes: Sequence[int] | None = None) -> str | None:
    """conv(A) with the facets of the subdivision outlined; None outside the plane."""
    pts = planar_coords(config, axes)
    if pts is None:
        logger.info("skipping subdivision plot: configuration is not planar")
        return None
    fig, ax = plt.subplots(figsize=(4, 4))
    _outline(ax, pts, color="0.6", linewidth=3.0)
    for facet in subdivision.sorted_facets():
        _outline(ax, pts[config.indices(facet)], color="tab:blue", linewidth=1.2)
    ax.scatter(pts[:, 0], pts[:, 1], color="black", s=14, zorder=3)
    for label, (x, y) in zip(config.labels, pts):
        ax.annotate(label, (x, y), textcoords="offset points", xytext=(4, 4), fontsize=8)
    ax.set_aspect("equal")
    ax.set_title(str(subdivision), fontsize=8)
    return _to_svg(fig)


def secondary_svg(vertices: np.ndarray, names: Sequence[str]) -> str:
    """GKZ vertices projected onto their two main directions."""
    vertices = np.atleast_2d(np.asarray(vertices, dtype=float))
    centered = vertices - vertices.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    plane = centered @ vt[:2].T
    if plane.shape[1] < 2:
        plane = np.hstack([plane, np.zeros((plane.shape[0], 2 - plane.shape[1]))])
    fig, ax = plt.subplots(figsize=(4, 4))
    if len(plane) > 1:
        _outline(ax, plane, color="tab:green", linewidth=1.2)
    ax.scatter(plane[:, 0], plane[:, 1], color="black", s=14, zorder=3)
    for name, (x, y) in zip(names, plane):
        ax.annotate(name, (x, y), textcoords="offset points", xytext=(4, 4), fontsize=7)
    ax.set_title(f"{len(vertices)} GKZ vertices", fontsize=8)
    return _to_svg(fig)


def distance_svg(schedule: Sequence[float], distances: Sequence[float], threshold: float) -> str:
    """Hausdorff distance against s, with the pass threshold."""
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.plot(schedule, distances, marker="o", markersize=3, color="tab:blue", label="d_H")
    ax.axhline(threshold, color="tab:red", linestyle="--", linewidth=1.0, label="threshold")
    if min(distances) > 0:
        ax.set_yscale("log")
    ax.set_xlabel("s")
    ax.set_ylabel("Hausdorff distance")
    ax.legend(fontsize=8)
    return _to_svg(fig)
