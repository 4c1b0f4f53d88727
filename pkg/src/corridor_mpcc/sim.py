"""Point-mass closed-loop simulator with disturbance injection.

The plant integrates jerk commands exactly over each tick (constant jerk,
plus a constant disturbance acceleration active during the tick), which is
deliberately richer than the controller's internal model: the controller
must absorb the mismatch. A proportional-derivative baseline tracker that
chases the reference on a fixed clock is included as the comparison point;
it has no notion of the corridor and drifts out of it under sustained wind.
"""

from __future__ import annotations

import csv
import json
import pathlib
from dataclasses import dataclass, field, replace

import numpy as np

from .corridor import Corridor, corridor_from_dict, load_corridor
from .mpcc import Controller, MpccConfig, Limits
from .trajectory import ReferenceTrajectory, load_trajectory, trajectory_from_dict

__all__ = [
    "LOG_COLUMNS",
    "PlantState",
    "Disturbance",
    "Scenario",
    "SimResult",
    "RunSummary",
    "summarize",
    "plant_step",
    "run_scenario",
    "run_baseline",
    "scenario_from_dict",
    "load_scenario",
    "apply_overrides",
]

#: one record per tick, fixed column order
LOG_COLUMNS = [
    "wall_step", "sim_time",
    "px", "py", "pz", "vx", "vy", "vz", "ax", "ay", "az",
    "jx", "jy", "jz", "jt",
    "ctrl_t", "ctrl_vt",
    "tracking_error", "safety_margin",
    "solver_iterations", "solve_time", "recovery",
]

GOAL_POSITION_TOL = 0.1
GOAL_SPEED_TOL = 0.1


@dataclass
class PlantState:
    """Translational point-mass state."""

    position: np.ndarray
    velocity: np.ndarray
    accel: np.ndarray

    @classmethod
    def at_rest(cls, position) -> "PlantState":
        return cls(
            position=np.asarray(position, dtype=float).copy(),
            velocity=np.zeros(3),
            accel=np.zeros(3),
        )

    def copy(self) -> "PlantState":
        return PlantState(
            self.position.copy(), self.velocity.copy(), self.accel.copy()
        )


@dataclass(frozen=True)
class Disturbance:
    """Additive acceleration active on [start, start + duration)."""

    kind: str
    start: float
    duration: float
    accel: np.ndarray

    def __post_init__(self) -> None:
        if self.kind not in ("wind", "impulse"):
            raise ValueError(f"unknown disturbance kind {self.kind!r}")
        if self.duration <= 0:
            raise ValueError("disturbance duration must be positive")
        object.__setattr__(self, "accel", np.asarray(self.accel, dtype=float))
        if self.accel.shape != (3,):
            raise ValueError("disturbance accel must be a 3-vector")

    def active(self, time: float) -> bool:
        return self.start <= time < self.start + self.duration


def disturbance_accel(disturbances, time: float) -> np.ndarray:
    total = np.zeros(3)
    for d in disturbances:
        if d.active(time):
            total = total + d.accel
    return total


def plant_step(state: PlantState, jerk: np.ndarray, dt: float,
               disturbance: np.ndarray | None = None) -> PlantState:
    """Integrate one tick of constant jerk plus constant disturbance accel.

    The disturbance acts on velocity and position during the tick but is
    not absorbed into the stored acceleration: it models an external force,
    not a change of the commanded motion state.
    """
    j = np.asarray(jerk, dtype=float)
    d = np.zeros(3) if disturbance is None else np.asarray(disturbance, dtype=float)
    a, v, p = state.accel, state.velocity, state.position
    a_next = a + j * dt
    v_next = v + (a + d) * dt + 0.5 * j * dt * dt
    p_next = p + v * dt + 0.5 * (a + d) * dt * dt + (j * dt**3) / 6.0
    return PlantState(position=p_next, velocity=v_next, accel=a_next)


@dataclass
class ScenarioLog:
    """Per-tick records with a fixed CSV schema."""

    rows: list[dict] = field(default_factory=list)

    def append(self, **kwargs) -> None:
        if set(kwargs) != set(LOG_COLUMNS):
            missing = set(LOG_COLUMNS) - set(kwargs)
            extra = set(kwargs) - set(LOG_COLUMNS)
            raise ValueError(f"log record mismatch: missing {missing}, extra {extra}")
        self.rows.append(kwargs)

    def column(self, name: str) -> np.ndarray:
        return np.array([row[name] for row in self.rows], dtype=float)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=LOG_COLUMNS)
            writer.writeheader()
            writer.writerows(self.rows)


@dataclass(frozen=True)
class Scenario:
    """Fully resolved closed-loop experiment description."""

    trajectory: ReferenceTrajectory
    corridor: Corridor
    config: MpccConfig
    start_position: np.ndarray
    start_velocity: np.ndarray
    disturbances: tuple[Disturbance, ...]
    duration_s: float
    seed: int = 0
    name: str = "scenario"


@dataclass
class SimResult:
    """Outcome of a closed-loop run.

    ``outcome`` is "goal" when the plant reached the trajectory endpoint
    slowly enough, "abort" when the controller gave up after too many
    consecutive recovery or failed ticks, and "incomplete" when the time
    budget ran out first.
    """

    outcome: str
    log: ScenarioLog
    final_state: PlantState
    ticks: int
    goal_time: float | None = None
    controller: Controller | None = None


@dataclass(frozen=True)
class RunSummary:
    """Headline numbers for a finished run."""

    scenario: str
    outcome: str
    ticks: int
    goal_reached: bool
    goal_time: float | None
    max_tracking_error: float
    min_corridor_margin: float
    mean_solve_time: float
    max_solve_time: float
    recovery_ticks: int

    def format_line(self) -> str:
        goal = f"{self.goal_time:.2f}s" if self.goal_time is not None else "-"
        return (
            f"{self.scenario}: {self.outcome} ticks={self.ticks} goal={goal} "
            f"max_err={self.max_tracking_error:.4f}m "
            f"min_margin={self.min_corridor_margin:.4f}m "
            f"solve={1e3 * self.mean_solve_time:.2f}/"
            f"{1e3 * self.max_solve_time:.2f}ms "
            f"recovery={self.recovery_ticks}"
        )


def summarize(result: SimResult, scenario: Scenario) -> RunSummary:
    """Reduce a run log to its headline numbers."""
    log = result.log
    if log.rows:
        max_err = float(log.column("tracking_error").max())
        min_margin = float(log.column("safety_margin").min())
        solve = log.column("solve_time")
        mean_solve, max_solve = float(solve.mean()), float(solve.max())
        recovery = int(log.column("recovery").sum())
    else:
        max_err = min_margin = mean_solve = max_solve = 0.0
        recovery = 0
    return RunSummary(
        scenario=scenario.name,
        outcome=result.outcome,
        ticks=result.ticks,
        goal_reached=result.outcome == "goal",
        goal_time=result.goal_time,
        max_tracking_error=max_err,
        min_corridor_margin=min_margin,
        mean_solve_time=mean_solve,
        max_solve_time=max_solve,
        recovery_ticks=recovery,
    )


def _goal_reached(state: PlantState, traj: ReferenceTrajectory) -> bool:
    at_end = np.linalg.norm(state.position - traj.eval(traj.tm, 0))
    return at_end < GOAL_POSITION_TOL and np.linalg.norm(state.velocity) < GOAL_SPEED_TOL


def run_scenario(scenario: Scenario, controller: Controller | None = None) -> SimResult:
    """Run the contouring controller against the disturbed plant."""
    traj = scenario.trajectory
    cfg = scenario.config
    if controller is None:
        controller = Controller(
            traj, scenario.corridor, cfg,
            position=scenario.start_position, velocity=scenario.start_velocity,
        )
    state = PlantState(
        position=np.asarray(scenario.start_position, dtype=float).copy(),
        velocity=np.asarray(scenario.start_velocity, dtype=float).copy(),
        accel=np.zeros(3),
    )
    log = ScenarioLog()
    ticks = int(round(scenario.duration_s / cfg.dt))
    sim_time = 0.0
    outcome = "incomplete"
    goal_time = None

    for step_idx in range(ticks):
        push = disturbance_accel(scenario.disturbances, sim_time)
        # the controller sees the measured (felt) acceleration: external
        # force is observable through an accelerometer the moment it acts
        felt = state.accel + push
        result = controller.step(state.position, state.velocity, felt)
        log.append(
            wall_step=step_idx,
            sim_time=sim_time,
            px=state.position[0], py=state.position[1], pz=state.position[2],
            vx=state.velocity[0], vy=state.velocity[1], vz=state.velocity[2],
            ax=felt[0], ay=felt[1], az=felt[2],
            jx=result.jerk[0], jy=result.jerk[1], jz=result.jerk[2],
            jt=result.jerk_t,
            ctrl_t=result.virtual[0], ctrl_vt=result.virtual[1],
            tracking_error=float(
                np.linalg.norm(state.position - traj.eval(result.virtual[0], 0))
            ),
            safety_margin=scenario.corridor.membership_margin(state.position),
            solver_iterations=result.iterations,
            solve_time=result.solve_time,
            recovery=int(result.recovery or result.status == "failed"),
        )
        if result.aborted:
            outcome = "abort"
            break
        state = plant_step(state, result.jerk, cfg.dt, disturbance=push)
        sim_time += cfg.dt
        if _goal_reached(state, traj):
            outcome = "goal"
            goal_time = sim_time
            break

    return SimResult(
        outcome=outcome,
        log=log,
        final_state=state,
        ticks=len(log.rows),
        goal_time=goal_time,
        controller=controller,
    )


def run_baseline(scenario: Scenario, kp: float = 4.0, kv: float = 3.0) -> SimResult:
    """Track the reference on a fixed clock with PD feedback on acceleration.

    The commanded acceleration is the reference acceleration plus
    proportional position and velocity feedback, converted to a jerk command
    by finite difference and saturated. No corridor awareness at all: this
    is the comparison point that shows why the tube constraints matter.
    """
    traj = scenario.trajectory
    cfg = scenario.config
    dt = cfg.dt
    j_max = cfg.limits.j_max
    state = PlantState(
        position=np.asarray(scenario.start_position, dtype=float).copy(),
        velocity=np.asarray(scenario.start_velocity, dtype=float).copy(),
        accel=np.zeros(3),
    )
    log = ScenarioLog()
    ticks = int(round(scenario.duration_s / dt))
    sim_time = 0.0
    outcome = "incomplete"
    goal_time = None

    for step_idx in range(ticks):
        t_ref = min(traj.t0 + sim_time, traj.tm)
        p_ref = traj.eval(t_ref, 0)
        v_ref = traj.eval(t_ref, 1)
        a_ref = traj.eval(t_ref, 2)
        a_cmd = a_ref + kp * (p_ref - state.position) + kv * (v_ref - state.velocity)
        jerk = np.clip((a_cmd - state.accel) / dt, -j_max, j_max)
        log.append(
            wall_step=step_idx,
            sim_time=sim_time,
            px=state.position[0], py=state.position[1], pz=state.position[2],
            vx=state.velocity[0], vy=state.velocity[1], vz=state.velocity[2],
            ax=state.accel[0], ay=state.accel[1], az=state.accel[2],
            jx=jerk[0], jy=jerk[1], jz=jerk[2],
            jt=0.0,
            ctrl_t=t_ref, ctrl_vt=1.0,
            tracking_error=float(np.linalg.norm(state.position - p_ref)),
            safety_margin=scenario.corridor.membership_margin(state.position),
            solver_iterations=0,
            solve_time=0.0,
            recovery=0,
        )
        state = plant_step(
            state, jerk, dt,
            disturbance=disturbance_accel(scenario.disturbances, sim_time),
        )
        sim_time += dt
        if _goal_reached(state, traj):
            outcome = "goal"
            goal_time = sim_time
            break

    return SimResult(
        outcome=outcome,
        log=log,
        final_state=state,
        ticks=len(log.rows),
        goal_time=goal_time,
    )


def _limits_from_dict(doc: dict) -> Limits:
    known = {"v_max", "a_max", "j_max", "v_t_max", "a_t_max", "j_t_max"}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown limit fields: {sorted(unknown)}")
    return Limits(**doc)


def _config_from_dict(doc: dict) -> MpccConfig:
    scalar_fields = ("N", "dt", "rho", "terminal_eps", "jerk_reg",
                     "recovery_penalty", "max_recovery_ticks")
    kwargs = {}
    for name in scalar_fields:
        if name in doc:
            kwargs[name] = doc[name]
    if "limits" in doc:
        kwargs["limits"] = _limits_from_dict(doc["limits"])
    unknown = set(doc) - set(scalar_fields) - {"limits"}
    if unknown:
        raise ValueError(f"unknown mpcc fields: {sorted(unknown)}")
    return MpccConfig(**kwargs)


def scenario_from_dict(doc: dict, base_dir=".") -> Scenario:
    """Build a scenario from its JSON form.

    The trajectory and corridor entries are either file paths, resolved
    against base_dir, or inline documents of the corresponding schema.
    """
    base = pathlib.Path(base_dir)
    try:
        traj_ref = doc["trajectory"]
        corr_ref = doc["corridor"]
    except KeyError as exc:
        raise ValueError(f"scenario is missing required field {exc}") from exc
    if isinstance(traj_ref, dict):
        traj = trajectory_from_dict(traj_ref)
    else:
        traj = load_trajectory(base / traj_ref)
    if isinstance(corr_ref, dict):
        corridor = corridor_from_dict(corr_ref)
        corridor.validate()
    else:
        corridor = load_corridor(base / corr_ref)
    config = _config_from_dict(doc.get("mpcc", {}))
    start = doc.get("start", {})
    position = np.asarray(start.get("position", [0.0, 0.0, 0.0]), dtype=float)
    velocity = np.asarray(start.get("velocity", [0.0, 0.0, 0.0]), dtype=float)
    disturbances = tuple(
        Disturbance(
            kind=d["kind"], start=d["start"], duration=d["duration"],
            accel=np.asarray(d["accel"], dtype=float),
        )
        for d in doc.get("disturbances", [])
    )
    if "duration_s" not in doc:
        raise ValueError("scenario is missing required field 'duration_s'")
    return Scenario(
        trajectory=traj,
        corridor=corridor,
        config=config,
        start_position=position,
        start_velocity=velocity,
        disturbances=disturbances,
        duration_s=float(doc["duration_s"]),
        seed=int(doc.get("seed", 0)),
        name=str(doc.get("name", "scenario")),
    )


def load_scenario(path) -> Scenario:
    path = pathlib.Path(path)
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    doc.setdefault("name", path.stem)
    return scenario_from_dict(doc, base_dir=path.parent)


def apply_overrides(scenario: Scenario, rho: float | None = None,
                    no_recovery: bool = False, seed: int | None = None) -> Scenario:
    """Return a copy with command-line overrides applied."""
    config = scenario.config
    if rho is not None:
        config = replace(config, rho=rho)
    if no_recovery:
        config = replace(config, recovery=False)
    out = replace(scenario, config=config)
    if seed is not None:
        out = replace(out, seed=seed)
    return out
