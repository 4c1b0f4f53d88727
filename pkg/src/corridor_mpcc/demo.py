"""Bundled demonstration courses and scenarios.

Two courses ship with the package:

* ``straight``: a 10 m straight line flown in 20 s with a quintic
  smoothstep timing law (rest to rest), covered by three overlapping boxes
  with a tight 0.25 m lateral half-width. Used for the nominal, timing,
  wind, and gale scenarios.
* ``arc``: a quarter circle of 3 m radius flown rest to rest in 20 s,
  fitted by a clamped cubic spline through dense waypoints and covered by
  one inflated bounding box per spline segment. Used for the impulse
  scenarios, where a velocity kick must re-time the plan, which is only
  observable on a curving course.

All artifacts are plain JSON files matching the trajectory, corridor, and
scenario schemas, so they double as documentation of the file formats.
"""

from __future__ import annotations

import json
import pathlib

import numpy as np
from scipy.interpolate import CubicSpline

__all__ = [
    "straight_course",
    "arc_course",
    "scenario_docs",
    "write_demo",
]


def _box_faces(xlo, xhi, ylo, yhi, zlo, zhi) -> list[dict]:
    return [
        {"normal": [1.0, 0.0, 0.0], "offset": float(xhi)},
        {"normal": [-1.0, 0.0, 0.0], "offset": float(-xlo)},
        {"normal": [0.0, 1.0, 0.0], "offset": float(yhi)},
        {"normal": [0.0, -1.0, 0.0], "offset": float(-ylo)},
        {"normal": [0.0, 0.0, 1.0], "offset": float(zhi)},
        {"normal": [0.0, 0.0, -1.0], "offset": float(-zlo)},
    ]


def _smoothstep_poly(length: float, total_time: float) -> np.polynomial.Polynomial:
    """Quintic rest-to-rest ramp from 0 to ``length`` over ``total_time``."""
    t3 = 10.0 * length / total_time**3
    t4 = -15.0 * length / total_time**4
    t5 = 6.0 * length / total_time**5
    return np.polynomial.Polynomial([0.0, 0.0, 0.0, t3, t4, t5])


def straight_course() -> tuple[dict, dict]:
    """10 m straight segment at z = 1 in three overlapping tight boxes."""
    total_time = 20.0
    length = 10.0
    ramp = _smoothstep_poly(length, total_time)
    cuts = [0.0, 8.0, 13.0, 20.0]
    segments = []
    for i in range(len(cuts) - 1):
        start, end = cuts[i], cuts[i + 1]
        local = ramp(np.polynomial.Polynomial([start, 1.0]))
        coeffs = local.coef.tolist()
        coeffs += [0.0] * (6 - len(coeffs))
        segments.append(
            {
                "duration": end - start,
                "corridor_index": i,
                "coeffs": {
                    "x": coeffs,
                    "y": [0.0] * 6,
                    "z": [1.0] + [0.0] * 5,
                },
            }
        )
    traj_doc = {"t0": 0.0, "segments": segments}

    # lateral half-width 0.25 m; x-spans overlap around the segment cuts
    x_cut1 = float(ramp(8.0))
    x_cut2 = float(ramp(13.0))
    corridor_doc = {
        "polyhedra": [
            {"faces": _box_faces(-0.5, x_cut1 + 0.5, -0.25, 0.25, 0.75, 1.25)},
            {"faces": _box_faces(x_cut1 - 0.5, x_cut2 + 0.5, -0.25, 0.25, 0.75, 1.25)},
            {"faces": _box_faces(x_cut2 - 0.5, 10.5, -0.25, 0.25, 0.75, 1.25)},
        ]
    }
    return traj_doc, corridor_doc


def arc_course() -> tuple[dict, dict]:
    """Quarter circle of radius 3 m at z = 1, one inflated box per segment."""
    total_time = 20.0
    radius = 3.0
    knots = np.linspace(0.0, total_time, 21)
    ramp = _smoothstep_poly(1.0, total_time)
    phi = 0.5 * np.pi * ramp(knots)
    points = np.stack(
        [radius * np.sin(phi), radius * (1.0 - np.cos(phi)), np.ones_like(phi)],
        axis=1,
    )
    spline = CubicSpline(knots, points, axis=0, bc_type="clamped")

    segments = []
    polyhedra = []
    for i in range(len(knots) - 1):
        c = spline.c[:, i, :]  # (4, 3), descending powers of local time
        coeffs = {
            axis: [float(c[3, a]), float(c[2, a]), float(c[1, a]), float(c[0, a])]
            for a, axis in enumerate("xyz")
        }
        segments.append(
            {
                "duration": float(knots[i + 1] - knots[i]),
                "corridor_index": i,
                "coeffs": coeffs,
            }
        )
        local = np.linspace(0.0, knots[i + 1] - knots[i], 25)
        sampled = spline(knots[i] + local)
        lo = sampled.min(axis=0) - 0.3
        hi = sampled.max(axis=0) + 0.3
        polyhedra.append(
            {"faces": _box_faces(lo[0], hi[0], lo[1], hi[1], lo[2], hi[2])}
        )

    return {"t0": 0.0, "segments": segments}, {"polyhedra": polyhedra}


def scenario_docs() -> dict[str, dict]:
    """Scenario documents keyed by name; file paths are course-relative."""
    scenarios: dict[str, dict] = {}

    # the demo references are slow (rest-to-rest smoothstep timing), so the
    # re-timing speed cap stays modest: the plant keeps authority to erase
    # tracking transients instead of sprinting the virtual time ahead
    def straight(name: str, **extra) -> None:
        doc = {
            "trajectory": "straight_trajectory.json",
            "corridor": "straight_corridor.json",
            "mpcc": {"limits": {"v_t_max": 1.2}},
            "start": {"position": [0.0, 0.0, 1.0], "velocity": [0.0, 0.0, 0.0]},
            "disturbances": [],
            "duration_s": 20.0,
            "seed": 0,
        }
        doc.update(extra)
        scenarios[name] = doc

    straight("straight_nominal")
    straight(
        "straight_timing",
        duration_s=25.0,
        mpcc={"limits": {"v_t_max": 0.7}},
    )
    straight(
        "straight_wind",
        disturbances=[
            {"kind": "wind", "start": 4.0, "duration": 4.0, "accel": [0.0, 1.5, 0.0]}
        ],
    )
    straight(
        "straight_gale",
        duration_s=10.0,
        disturbances=[
            {"kind": "wind", "start": 3.0, "duration": 7.0, "accel": [0.0, 40.0, 0.0]}
        ],
    )

    arc_base = {
        "trajectory": "arc_trajectory.json",
        "corridor": "arc_corridor.json",
        "mpcc": {"limits": {"v_t_max": 1.2}},
        "start": {"position": [0.0, 0.0, 1.0], "velocity": [0.0, 0.0, 0.0]},
        "duration_s": 20.0,
        "seed": 0,
    }
    scenarios["arc_nominal"] = {**arc_base, "disturbances": []}
    scenarios["arc_impulse"] = {
        **arc_base,
        "disturbances": [
            {"kind": "impulse", "start": 3.0, "duration": 0.05,
             "accel": [0.0, -10.0, 0.0]}
        ],
    }
    return scenarios


def write_demo(out_dir) -> dict[str, pathlib.Path]:
    """Write all demo courses and scenarios into ``out_dir``."""
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths: dict[str, pathlib.Path] = {}

    straight_traj, straight_corr = straight_course()
    arc_traj, arc_corr = arc_course()
    files = {
        "straight_trajectory.json": straight_traj,
        "straight_corridor.json": straight_corr,
        "arc_trajectory.json": arc_traj,
        "arc_corridor.json": arc_corr,
    }
    for name, doc in scenario_docs().items():
        files[f"{name}.json"] = doc
    for name, doc in files.items():
        path = out / name
        path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        paths[name.removesuffix(".json")] = path
    return paths
