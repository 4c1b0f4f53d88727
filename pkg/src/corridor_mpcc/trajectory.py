"""Piecewise-polynomial reference trajectories.

The global reference is a list of polynomial segments, one set of
coefficients per axis, each evaluated on a local clock in ``[0, duration]``.
Queries outside the total time span are clamped to the nearest endpoint;
derivatives beyond the end evaluate to zero so a controller chasing the
reference settles into a hover at the goal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "PolySegment",
    "ReferenceTrajectory",
    "TrajectoryError",
    "load_trajectory",
    "trajectory_from_dict",
]

#: joint mismatch tolerances (position, then velocity/acceleration)
JOINT_POS_TOL = 1e-6
JOINT_DERIV_TOL = 1e-4


class TrajectoryError(ValueError):
    """Invalid trajectory data; ``pointer`` locates the offending field."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(message)
        self.pointer = pointer


def _poly_eval(coeffs: np.ndarray, s: float, order: int) -> float:
    """Evaluate a polynomial (ascending-power coeffs) or a derivative, Horner form."""
    c = coeffs
    for _ in range(order):
        c = c[1:] * np.arange(1, len(c))
        if len(c) == 0:
            return 0.0
    acc = 0.0
    for v in c[::-1]:
        acc = acc * s + v
    return float(acc)


@dataclass(frozen=True)
class PolySegment:
    """One polynomial piece: per-axis ascending-power coefficients on local time."""

    duration: float
    coeffs: np.ndarray  # (3, deg+1), rows x/y/z
    corridor_index: int

    def __post_init__(self):
        coeffs = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        if coeffs.shape[0] != 3:
            raise TrajectoryError("segment needs coefficients for exactly 3 axes")
        object.__setattr__(self, "coeffs", coeffs)
        derivs = [coeffs]
        for _ in range(2):
            c = derivs[-1]
            derivs.append(
                c[:, 1:] * np.arange(1, c.shape[1]) if c.shape[1] > 1 else np.empty((3, 0))
            )
        object.__setattr__(self, "_derivs", tuple(derivs))
        if not self.duration > 0:
            raise TrajectoryError(f"segment duration must be > 0, got {self.duration}")
        if self.corridor_index < 0:
            raise TrajectoryError(f"corridor_index must be >= 0, got {self.corridor_index}")

    def eval(self, s: float, order: int) -> np.ndarray:
        if order < len(self._derivs):
            c = self._derivs[order]
            acc = np.zeros(3)
            for k in range(c.shape[1] - 1, -1, -1):
                acc = acc * s + c[:, k]
            return acc
        return np.array([_poly_eval(self.coeffs[ax], s, order) for ax in range(3)])


@dataclass(frozen=True)
class ReferenceTrajectory:
    """Ordered segments plus the global start time ``t0``."""

    segments: tuple[PolySegment, ...]
    t0: float = 0.0
    _starts: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.segments:
            raise TrajectoryError("trajectory needs at least one segment")
        object.__setattr__(self, "segments", tuple(self.segments))
        durations = np.array([seg.duration for seg in self.segments])
        starts = self.t0 + np.concatenate([[0.0], np.cumsum(durations)])
        object.__setattr__(self, "_starts", starts)
        self._check_continuity()

    @property
    def tm(self) -> float:
        return float(self._starts[-1])

    @property
    def span(self) -> float:
        return self.tm - self.t0

    def _check_continuity(self):
        for i in range(len(self.segments) - 1):
            a, b = self.segments[i], self.segments[i + 1]
            for order, tol in ((0, JOINT_POS_TOL), (1, JOINT_DERIV_TOL), (2, JOINT_DERIV_TOL)):
                gap = np.linalg.norm(a.eval(a.duration, order) - b.eval(0.0, order))
                if gap > tol:
                    raise TrajectoryError(
                        f"discontinuity of order {order} at joint {i}: gap {gap:.3e} "
                        f"exceeds {tol:g}",
                        pointer=f"/segments/{i + 1}",
                    )

    def _locate(self, t: float) -> tuple[int, float, bool]:
        """Clamped segment index, local time, and whether ``t`` overran the end."""
        if t >= self.tm:
            last = len(self.segments) - 1
            return last, self.segments[last].duration, t > self.tm
        t = max(t, self.t0)
        # right-side search puts joint times into the later segment
        idx = int(np.searchsorted(self._starts, t, side="right") - 1)
        idx = min(max(idx, 0), len(self.segments) - 1)
        return idx, t - self._starts[idx], False

    def eval(self, t: float, order: int = 0) -> np.ndarray:
        """Position (order 0) or time-derivative (order 1, 2) at clamped ``t``."""
        if order not in (0, 1, 2):
            raise ValueError(f"order must be 0, 1 or 2, got {order}")
        idx, s, overran = self._locate(t)
        if overran and order >= 1:
            return np.zeros(3)
        return self.segments[idx].eval(s, order)

    def corridor_index_at(self, t: float) -> int:
        """Corridor polyhedron index annotated on the segment containing ``t``."""
        idx, _, _ = self._locate(t)
        return self.segments[idx].corridor_index

    def project(self, point: np.ndarray, t_guess: float, window: float) -> float:
        """Reference time closest to ``point`` within ``t_guess +- window``.

        Dense sampling over the window followed by ternary-search refinement
        around the best sample. Robust for any polynomial degree; called once
        per run so speed is irrelevant.
        """
        if not window > 0:
            raise ValueError(f"window must be > 0, got {window}")
        point = np.asarray(point, dtype=float)
        lo = max(self.t0, t_guess - window)
        hi = min(self.tm, t_guess + window)
        if hi <= lo:
            return float(np.clip(t_guess, self.t0, self.tm))

        def dist(t: float) -> float:
            return float(np.linalg.norm(self.eval(t, 0) - point))

        samples = np.linspace(lo, hi, 2001)
        dists = [dist(t) for t in samples]
        best = int(np.argmin(dists))
        a = samples[max(best - 1, 0)]
        b = samples[min(best + 1, len(samples) - 1)]
        for _ in range(80):
            m1 = a + (b - a) / 3.0
            m2 = b - (b - a) / 3.0
            if dist(m1) <= dist(m2):
                b = m2
            else:
                a = m1
        t_star = 0.5 * (a + b)
        return t_star if dist(t_star) <= dists[best] else float(samples[best])


def trajectory_from_dict(doc: dict) -> ReferenceTrajectory:
    """Build a trajectory from the JSON document structure, validating invariants."""
    if "segments" not in doc:
        raise TrajectoryError("missing 'segments'", pointer="/segments")
    segments = []
    for i, seg in enumerate(doc["segments"]):
        ptr = f"/segments/{i}"
        try:
            coeffs_doc = seg["coeffs"]
            axes = [coeffs_doc[ax] for ax in ("x", "y", "z")]
        except (KeyError, TypeError) as exc:
            raise TrajectoryError(f"segment {i}: malformed coeffs ({exc})", pointer=ptr)
        degrees = {len(a) for a in axes}
        if len(degrees) != 1:
            raise TrajectoryError(
                f"segment {i}: axes disagree on polynomial degree {sorted(degrees)}",
                pointer=f"{ptr}/coeffs",
            )
        try:
            segments.append(
                PolySegment(
                    duration=float(seg["duration"]),
                    coeffs=np.array(axes, dtype=float),
                    corridor_index=int(seg["corridor_index"]),
                )
            )
        except TrajectoryError as exc:
            raise TrajectoryError(f"segment {i}: {exc}", pointer=ptr)
    return ReferenceTrajectory(segments=tuple(segments), t0=float(doc.get("t0", 0.0)))


def load_trajectory(path: str | Path) -> ReferenceTrajectory:
    with open(path) as fh:
        return trajectory_from_dict(json.load(fh))
