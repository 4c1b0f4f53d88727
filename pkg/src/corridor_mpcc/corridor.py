"""Flight corridors: ordered convex polyhedra in halfspace form.

A polyhedron is the set ``{q : normal_i . q <= offset_i}`` over its faces.
Normals are not required to be unit length; tolerance comparisons scale by
the normal's norm because corridor files produced by external planners are
rarely normalized.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

__all__ = [
    "Halfspace",
    "Polyhedron",
    "Corridor",
    "CorridorError",
    "EmptyPolyhedronError",
    "UnboundedPolyhedronError",
    "load_corridor",
    "corridor_from_dict",
]

MIN_INTERIOR_RADIUS = 1e-6

#: side length used to fence in vertex enumeration; a kept vertex at this
#: magnitude means the polyhedron escapes to infinity
_ESCAPE_BOX = 1e6


class CorridorError(ValueError):
    """Invalid corridor data; ``pointer`` locates the offending field."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(message)
        self.pointer = pointer


class EmptyPolyhedronError(CorridorError):
    pass


class UnboundedPolyhedronError(CorridorError):
    pass


@dataclass(frozen=True)
class Halfspace:
    """The set {q : normal . q <= offset}."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        normal = np.asarray(self.normal, dtype=float).reshape(3)
        object.__setattr__(self, "normal", normal)
        if np.linalg.norm(normal) <= 1e-12:
            raise CorridorError("halfspace normal is (near) zero")


@dataclass(frozen=True)
class Polyhedron:
    faces: tuple[Halfspace, ...]

    def __post_init__(self):
        object.__setattr__(self, "faces", tuple(self.faces))
        if len(self.faces) < 4:
            raise CorridorError(f"polyhedron needs >= 4 faces, got {len(self.faces)}")
        A = np.array([f.normal for f in self.faces])
        b = np.array([f.offset for f in self.faces])
        object.__setattr__(self, "_matrix", (A, b))
        object.__setattr__(self, "_scale", np.linalg.norm(A, axis=1))

    def matrix_form(self) -> tuple[np.ndarray, np.ndarray]:
        """(A, b) with the polyhedron as {q : A q <= b}."""
        A, b = self._matrix
        return A.copy(), b.copy()

    def contains(self, point: np.ndarray, tol: float = 0.0) -> bool:
        """Membership with a tolerance band of width ``tol`` (in metres)."""
        if tol < 0:
            raise ValueError(f"tol must be >= 0, got {tol}")
        A, b = self._matrix
        return bool(np.all(A @ np.asarray(point, dtype=float) <= b + tol * self._scale))

    def margin(self, point: np.ndarray) -> float:
        """Signed distance to the worst face plane; positive inside."""
        A, b = self._matrix
        return float(np.min((b - A @ np.asarray(point, dtype=float)) / self._scale))

    def chebyshev_center(self) -> tuple[np.ndarray, float]:
        """Center and radius of the largest inscribed ball (via an LP)."""
        return chebyshev_center(self.faces)

    def vertices(self) -> np.ndarray:
        """Exact vertex set for non-degenerate bounded polyhedra.

        Enumerates intersections of all face triples (padded with a huge
        bounding box so escapes to infinity surface as detectable box-scale
        vertices), keeps points satisfying every face, and deduplicates.
        """
        A, b = self.matrix_form()
        box_a = np.vstack([np.eye(3), -np.eye(3)])
        box_b = np.full(6, _ESCAPE_BOX)
        A_all = np.vstack([A, box_a])
        b_all = np.concatenate([b, box_b])
        scale = np.linalg.norm(A, axis=1)

        points = []
        for i, j, k in itertools.combinations(range(len(b_all)), 3):
            M = A_all[[i, j, k]]
            if abs(np.linalg.det(M)) < 1e-10:
                continue  # singular triple, no vertex
            v = np.linalg.solve(M, b_all[[i, j, k]])
            if np.all(A @ v <= b + 1e-9 * scale):
                points.append(v)
        if not points:
            raise EmptyPolyhedronError("no vertices: empty or degenerate polyhedron")
        pts = np.array(points)
        if np.max(np.abs(pts)) >= 0.99 * _ESCAPE_BOX:
            raise UnboundedPolyhedronError("escaping vertex found: polyhedron is unbounded")

        kept: list[np.ndarray] = []
        for v in pts:
            if all(np.linalg.norm(v - w) > 1e-7 for w in kept):
                kept.append(v)
        order = np.lexsort(np.array(kept).T[::-1])
        return np.array(kept)[order]

    def validate(self):
        """Full invariant check: non-empty interior and boundedness."""
        _, radius = self.chebyshev_center()
        if radius <= MIN_INTERIOR_RADIUS:
            raise EmptyPolyhedronError(
                f"polyhedron interior radius {radius:.2e} below {MIN_INTERIOR_RADIUS:g}"
            )
        self.vertices()  # raises on unbounded / empty


def chebyshev_center(faces) -> tuple[np.ndarray, float]:
    """Largest inscribed ball of the intersection of ``faces``.

    Solves max r s.t. n_i . c + r ||n_i|| <= b_i, r >= 0 with HiGHS.
    Raises EmptyPolyhedronError / UnboundedPolyhedronError on failure.
    """
    A = np.array([f.normal for f in faces])
    b = np.array([f.offset for f in faces])
    norms = np.linalg.norm(A, axis=1)
    A_ub = np.hstack([A, norms[:, None]])
    c = np.array([0.0, 0.0, 0.0, -1.0])
    res = linprog(
        c,
        A_ub=A_ub,
        b_ub=b,
        bounds=[(None, None)] * 3 + [(0, None)],
        method="highs",
    )
    if res.status == 3:
        raise UnboundedPolyhedronError("chebyshev center LP unbounded: polyhedron unbounded")
    if res.status != 0 or res.x is None:
        raise EmptyPolyhedronError(f"chebyshev center LP infeasible ({res.message})")
    return res.x[:3].copy(), float(res.x[3])


@dataclass(frozen=True)
class Corridor:
    polyhedra: tuple[Polyhedron, ...]

    def __post_init__(self):
        object.__setattr__(self, "polyhedra", tuple(self.polyhedra))
        if not self.polyhedra:
            raise CorridorError("corridor needs at least one polyhedron")

    def __len__(self) -> int:
        return len(self.polyhedra)

    def __getitem__(self, i: int) -> Polyhedron:
        return self.polyhedra[i]

    def membership_margin(self, point: np.ndarray) -> float:
        """Best margin over all polyhedra; negative means outside the corridor."""
        return max(p.margin(point) for p in self.polyhedra)

    def validate(self):
        """Per-polyhedron invariants plus pairwise overlap of neighbours."""
        for i, poly in enumerate(self.polyhedra):
            try:
                poly.validate()
            except CorridorError as exc:
                raise type(exc)(f"polyhedron {i}: {exc}", pointer=f"/polyhedra/{i}")
        for i in range(len(self.polyhedra) - 1):
            joint = self.polyhedra[i].faces + self.polyhedra[i + 1].faces
            try:
                _, radius = chebyshev_center(joint)
            except EmptyPolyhedronError:
                radius = -np.inf
            if radius <= MIN_INTERIOR_RADIUS:
                raise CorridorError(
                    f"polyhedra {i} and {i + 1} do not overlap (radius {radius:.2e})",
                    pointer=f"/polyhedra/{i + 1}",
                )


def corridor_from_dict(doc: dict) -> Corridor:
    """Build a corridor from the JSON document structure (no heavy validation)."""
    if "polyhedra" not in doc:
        raise CorridorError("missing 'polyhedra'", pointer="/polyhedra")
    polys = []
    for i, poly in enumerate(doc["polyhedra"]):
        faces = []
        for j, face in enumerate(poly.get("faces", [])):
            try:
                faces.append(Halfspace(np.array(face["normal"], dtype=float), float(face["offset"])))
            except (KeyError, TypeError, ValueError, CorridorError) as exc:
                raise CorridorError(
                    f"polyhedron {i} face {j}: {exc}", pointer=f"/polyhedra/{i}/faces/{j}"
                )
        try:
            polys.append(Polyhedron(tuple(faces)))
        except CorridorError as exc:
            raise CorridorError(f"polyhedron {i}: {exc}", pointer=f"/polyhedra/{i}")
    return Corridor(tuple(polys))


def load_corridor(path: str | Path, validate: bool = True) -> Corridor:
    with open(path) as fh:
        corridor = corridor_from_dict(json.load(fh))
    if validate:
        corridor.validate()
    return corridor
