"""Request and response bodies for the HTTP service.

Trajectory, corridor, and scenario documents travel as plain JSON objects
in the shapes accepted by the loaders; the service never reads files, so
scenario documents must inline their trajectory and corridor.
"""

from __future__ import annotations

from pydantic import BaseModel, Field

Vec3 = list[float]


class ValidateRequest(BaseModel):
    trajectory: dict
    corridor: dict


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class ValidateResponse(BaseModel):
    ok: bool
    checks: list[CheckResult]


class RunOptions(BaseModel):
    rho: float | None = None
    no_recovery: bool = False
    seed: int | None = None
    baseline: bool = False


class RunRequest(BaseModel):
    scenario: dict
    options: RunOptions = Field(default_factory=RunOptions)


class RunSummaryModel(BaseModel):
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


class RunResponse(BaseModel):
    summary: RunSummaryModel
    log_columns: list[str]
    log_rows: list[list[float]]


class TubeRequest(BaseModel):
    trajectory: dict
    corridor: dict
    thetas: list[float] = Field(default_factory=list)


class TubeRow(BaseModel):
    theta: float
    nx: float
    ny: float
    nz: float
    offset: float
    fallback: bool


class TubeVertex(BaseModel):
    theta: float
    index: int
    x: float
    y: float
    z: float


class TubeResponse(BaseModel):
    rows: list[TubeRow]
    vertices: list[TubeVertex]


class SolveDumpRequest(BaseModel):
    scenario: dict


class SolveDumpResponse(BaseModel):
    n: int
    m: int
    text: str


class SessionCreateRequest(BaseModel):
    scenario: dict


class SessionCreateResponse(BaseModel):
    session_id: str
    horizon: int
    dt: float
    thetas: list[float]


class StepRequest(BaseModel):
    position: Vec3
    velocity: Vec3 = Field(default_factory=lambda: [0.0, 0.0, 0.0])
    accel: Vec3 = Field(default_factory=lambda: [0.0, 0.0, 0.0])


class StepResponse(BaseModel):
    jerk: Vec3
    jerk_t: float
    status: str
    recovery: bool
    aborted: bool
    iterations: int
    solve_time: float
    objective: float
    virtual: list[float]
    states: list[list[float]]
    inputs: list[list[float]]
    thetas: list[float]
