"""Polygon-tube safety constraints.

Slicing a corridor polyhedron with the plane normal to the local reference
velocity yields a convex polygon; sweeping each polygon edge along the
velocity direction yields a prism ("tube") of halfspaces whose normals are
orthogonal to the motion direction. Those rows become the per-step linear
safety constraints of the contouring controller.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corridor import Corridor, Polyhedron
from .trajectory import ReferenceTrajectory

__all__ = [
    "CrossSection",
    "TubeConstraints",
    "DegenerateSectionError",
    "cross_section",
    "sweep",
    "tube_at",
]

#: velocity below this norm gives no usable sweep direction
HOVER_SPEED = 1e-6


class DegenerateSectionError(ValueError):
    """Slicing plane misses the polyhedron or produces no polygon."""


def _cross3(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.array([
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])


def _plane_basis(axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal in-plane basis (e1, e2) with e1 x e2 = axis."""
    helper = np.array([1.0, 0.0, 0.0])
    if abs(axis @ helper) > 0.9:
        helper = np.array([0.0, 1.0, 0.0])
    e1 = _cross3(helper, axis)
    e1 /= np.sqrt(e1 @ e1)
    e2 = _cross3(axis, e1)
    return e1, e2


@dataclass(frozen=True)
class CrossSection:
    """Convex polygon cut of a polyhedron, in an in-plane orthonormal frame."""

    plane_point: np.ndarray
    axis: np.ndarray  # unit, = e1 x e2
    e1: np.ndarray
    e2: np.ndarray
    vertices2d: np.ndarray  # (k, 2), CCW

    def lift(self, uv: np.ndarray) -> np.ndarray:
        """Map in-plane coordinates back to 3D points on the plane."""
        uv = np.atleast_2d(uv)
        pts = self.plane_point + uv[:, :1] * self.e1 + uv[:, 1:2] * self.e2
        return pts[0] if uv.shape[0] == 1 else pts

    @property
    def vertices3d(self) -> np.ndarray:
        return np.atleast_2d(self.lift(self.vertices2d))


@dataclass(frozen=True)
class TubeConstraints:
    """Per-step safety rows {q : normal_i . q <= offset_i}."""

    normals: np.ndarray  # (k, 3)
    offsets: np.ndarray  # (k,)
    axis: np.ndarray | None = None  # sweep direction, None for fallback rows
    fallback: bool = False
    plane_point: np.ndarray | None = field(default=None, compare=False)

    def __len__(self) -> int:
        return len(self.offsets)

    @property
    def rows(self) -> list[tuple[np.ndarray, float]]:
        return [(self.normals[i], float(self.offsets[i])) for i in range(len(self))]

    def margin(self, point: np.ndarray) -> float:
        scale = np.linalg.norm(self.normals, axis=1)
        return float(np.min((self.offsets - self.normals @ point) / scale))


def cross_section(poly: Polyhedron, point: np.ndarray, direction: np.ndarray) -> CrossSection:
    """Intersect ``poly`` with the plane through ``point`` normal to ``direction``.

    Each polyhedron face maps to an in-plane halfspace by projecting its
    normal onto the plane. Faces nearly parallel to the plane are dropped,
    but only after verifying that the plane point satisfies them; otherwise
    the section is degenerate rather than silently unsafe.
    """
    direction = np.asarray(direction, dtype=float)
    speed = np.linalg.norm(direction)
    if speed <= 1e-9:
        raise ValueError("direction norm too small to define a section plane")
    point = np.asarray(point, dtype=float)
    if not poly.contains(point, tol=1e-6):
        raise DegenerateSectionError("plane point lies outside the polyhedron")
    axis = direction / speed
    e1, e2 = _plane_basis(axis)

    # in-plane halfspaces a.(u,v) <= d for plane points p0 + u e1 + v e2
    N, b = poly.matrix_form()
    A = np.column_stack((N @ e1, N @ e2))
    d = b - N @ point
    in_plane = np.linalg.norm(A, axis=1) >= 1e-9
    parallel_miss = ~in_plane & (d < -1e-9 * np.linalg.norm(N, axis=1))
    if np.any(parallel_miss):
        raise DegenerateSectionError("plane misses a face parallel to it")
    A = A[in_plane]
    d = d[in_plane]
    if len(d) < 3:
        raise DegenerateSectionError("fewer than 3 in-plane halfspaces")

    verts = _halfspace_polygon(A, d)
    if len(verts) < 3:
        raise DegenerateSectionError("section polygon collapsed")
    return CrossSection(plane_point=point, axis=axis, e1=e1, e2=e2, vertices2d=verts)


def _halfspace_polygon(A: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Vertices of a bounded 2D halfspace intersection ``A p <= d``, CCW.

    Pairwise line intersections filtered against all halfspaces, deduplicated,
    then angle-sorted around the candidate centroid (ties broken by distance)
    so the output ordering is deterministic.
    """
    scale = np.linalg.norm(A, axis=1)
    i_idx, j_idx = np.triu_indices(len(d), k=1)
    ai, aj = A[i_idx], A[j_idx]
    det = ai[:, 0] * aj[:, 1] - ai[:, 1] * aj[:, 0]
    regular = np.abs(det) >= 1e-12 * scale[i_idx] * scale[j_idx]
    i_idx, j_idx, det = i_idx[regular], j_idx[regular], det[regular]
    ai, aj = ai[regular], aj[regular]
    di, dj = d[i_idx], d[j_idx]
    pts = np.column_stack(
        ((di * aj[:, 1] - dj * ai[:, 1]) / det,
         (dj * ai[:, 0] - di * aj[:, 0]) / det)
    )
    feasible = np.all(pts @ A.T <= d + 1e-9 * scale, axis=1)
    pts = pts[feasible]
    if len(pts) == 0:
        return np.empty((0, 2))
    centroid = pts.mean(axis=0)
    rel = pts - centroid
    angles = np.arctan2(rel[:, 1], rel[:, 0])
    radii = np.linalg.norm(rel, axis=1)
    order = np.lexsort((radii, angles))
    pts = pts[order]
    kept: list[np.ndarray] = []
    for p in pts:
        if all(np.linalg.norm(p - q) > 1e-7 for q in kept):
            kept.append(p)
    return np.array(kept)


def sweep(section: CrossSection) -> TubeConstraints:
    """Expand each polygon edge into a plane swept along the section axis."""
    verts = section.vertices2d
    edges = np.roll(verts, -1, axis=0) - verts
    n2d = np.column_stack((edges[:, 1], -edges[:, 0]))  # outward for CCW ordering
    n2d /= np.linalg.norm(n2d, axis=1, keepdims=True)
    normals = np.outer(n2d[:, 0], section.e1) + np.outer(n2d[:, 1], section.e2)
    offsets = np.einsum("ij,ij->i", n2d, verts) + normals @ section.plane_point
    return TubeConstraints(
        normals=normals,
        offsets=offsets,
        axis=section.axis,
        fallback=False,
        plane_point=section.plane_point,
    )


def _fallback_rows(poly: Polyhedron, point: np.ndarray) -> TubeConstraints:
    A, b = poly.matrix_form()
    return TubeConstraints(normals=A, offsets=b, axis=None, fallback=True, plane_point=point)


def tube_at(corridor: Corridor, traj: ReferenceTrajectory, theta: float) -> TubeConstraints:
    """Safety rows at reference time ``theta``.

    Falls back to the raw polyhedron faces when the reference hovers (no
    sweep direction) or the section degenerates; the polyhedron itself is a
    convex subset of free space, so the fallback stays safe and convex.
    """
    poly = corridor[traj.corridor_index_at(theta)]
    point = traj.eval(theta, 0)
    direction = traj.eval(theta, 1)
    if np.linalg.norm(direction) < HOVER_SPEED:
        return _fallback_rows(poly, point)
    try:
        return sweep(cross_section(poly, point, direction))
    except DegenerateSectionError:
        return _fallback_rows(poly, point)
