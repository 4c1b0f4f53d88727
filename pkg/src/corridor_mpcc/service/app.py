"""FastAPI application exposing the controller toolkit over HTTP.

Endpoints mirror the package operations one to one: validate inputs, run a
closed-loop scenario, sample tube constraints, dump a horizon QP, and drive
a controller interactively through sessions. All domain errors surface as
HTTP 400 with a message and, where available, a JSON pointer to the
offending field.
"""

from __future__ import annotations

import uuid

import numpy as np
from fastapi import FastAPI, HTTPException

from ..corridor import (
    MIN_INTERIOR_RADIUS,
    Corridor,
    CorridorError,
    chebyshev_center,
    corridor_from_dict,
)
from ..mpcc import Controller, ControllerError
from ..qp import NonConvexError, format_problem
from ..sim import (
    LOG_COLUMNS,
    apply_overrides,
    run_baseline,
    run_scenario,
    scenario_from_dict,
    summarize,
)
from ..trajectory import ReferenceTrajectory, TrajectoryError, trajectory_from_dict
from ..tube import cross_section, tube_at
from . import schemas

__all__ = ["app", "create_app", "validate_documents"]

#: uniform reference samples for the containment check
REFERENCE_SAMPLES = 200

_DOMAIN_ERRORS = (
    ValueError,
    KeyError,
    TypeError,
    TrajectoryError,
    CorridorError,
    ControllerError,
    NonConvexError,
)


def _bad_request(exc: Exception) -> HTTPException:
    detail: dict = {"message": str(exc)}
    pointer = getattr(exc, "pointer", "")
    if pointer:
        detail["pointer"] = pointer
    return HTTPException(status_code=400, detail=detail)


def _build_scenario(doc: dict):
    if not isinstance(doc, dict):
        raise ValueError("scenario must be a JSON object")
    if not isinstance(doc.get("trajectory"), dict) or not isinstance(
        doc.get("corridor"), dict
    ):
        raise ValueError(
            "the service reads no files: scenario must inline its "
            "trajectory and corridor documents"
        )
    return scenario_from_dict(doc)


def validate_documents(traj_doc: dict, corridor_doc: dict) -> list[schemas.CheckResult]:
    """Run every input check, reporting each one individually."""
    checks: list[schemas.CheckResult] = []
    traj: ReferenceTrajectory | None = None
    corridor: Corridor | None = None

    try:
        traj = trajectory_from_dict(traj_doc)
    except (TrajectoryError, ValueError, KeyError, TypeError) as exc:
        pointer = getattr(exc, "pointer", "")
        where = f" at {pointer}" if pointer else ""
        checks.append(
            schemas.CheckResult(
                name="trajectory-continuity", passed=False, detail=f"{exc}{where}"
            )
        )
    else:
        checks.append(
            schemas.CheckResult(
                name="trajectory-continuity",
                passed=True,
                detail=(
                    f"{len(traj.segments)} segments, "
                    f"span [{traj.t0:g}, {traj.tm:g}] s, C2 at joints"
                ),
            )
        )

    try:
        corridor = corridor_from_dict(corridor_doc)
    except (CorridorError, ValueError, KeyError, TypeError) as exc:
        checks.append(
            schemas.CheckResult(
                name="corridor-polyhedra", passed=False, detail=str(exc)
            )
        )

    if corridor is not None:
        bad: list[str] = []
        for i, poly in enumerate(corridor.polyhedra):
            try:
                poly.validate()
            except CorridorError as exc:
                bad.append(f"polyhedron {i}: {exc}")
        checks.append(
            schemas.CheckResult(
                name="corridor-polyhedra",
                passed=not bad,
                detail="; ".join(bad)
                or f"{len(corridor)} polyhedra bounded with interior",
            )
        )

        gaps: list[str] = []
        for i in range(len(corridor) - 1):
            joint = corridor[i].faces + corridor[i + 1].faces
            try:
                _, radius = chebyshev_center(joint)
            except CorridorError:
                radius = -np.inf
            if radius <= MIN_INTERIOR_RADIUS:
                gaps.append(f"polyhedra {i} and {i + 1}")
        checks.append(
            schemas.CheckResult(
                name="corridor-overlap",
                passed=not gaps,
                detail="; ".join(f"no shared interior: {g}" for g in gaps)
                or "consecutive polyhedra share interior",
            )
        )

    if traj is not None and corridor is not None:
        worst_t, worst_margin = 0.0, np.inf
        for t in np.linspace(traj.t0, traj.tm, REFERENCE_SAMPLES):
            index = traj.corridor_index_at(t)
            if index >= len(corridor):
                checks.append(
                    schemas.CheckResult(
                        name="reference-in-corridor",
                        passed=False,
                        detail=f"segment at t={t:g} names polyhedron {index} "
                        f"but corridor has {len(corridor)}",
                    )
                )
                break
            margin = corridor[index].margin(traj.eval(t, 0))
            if margin < worst_margin:
                worst_t, worst_margin = float(t), float(margin)
        else:
            checks.append(
                schemas.CheckResult(
                    name="reference-in-corridor",
                    passed=worst_margin >= 0.0,
                    detail=(
                        f"{REFERENCE_SAMPLES} samples, worst margin "
                        f"{worst_margin:.4f} m at t={worst_t:.3f} s"
                    ),
                )
            )
    else:
        checks.append(
            schemas.CheckResult(
                name="reference-in-corridor",
                passed=False,
                detail="not checked: invalid trajectory or corridor",
            )
        )
    return checks


def create_app() -> FastAPI:
    app = FastAPI(title="corridor-mpcc")
    sessions: dict[str, Controller] = {}

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.post("/validate", response_model=schemas.ValidateResponse)
    def validate(req: schemas.ValidateRequest) -> schemas.ValidateResponse:
        checks = validate_documents(req.trajectory, req.corridor)
        return schemas.ValidateResponse(
            ok=all(c.passed for c in checks), checks=checks
        )

    @app.post("/run", response_model=schemas.RunResponse)
    def run(req: schemas.RunRequest) -> schemas.RunResponse:
        try:
            scenario = _build_scenario(req.scenario)
            scenario = apply_overrides(
                scenario,
                rho=req.options.rho,
                no_recovery=req.options.no_recovery,
                seed=req.options.seed,
            )
            if req.options.baseline:
                result = run_baseline(scenario)
            else:
                result = run_scenario(scenario)
        except _DOMAIN_ERRORS as exc:
            raise _bad_request(exc) from exc
        summary = summarize(result, scenario)
        rows = [
            [float(row[name]) for name in LOG_COLUMNS] for row in result.log.rows
        ]
        return schemas.RunResponse(
            summary=schemas.RunSummaryModel(**summary.__dict__),
            log_columns=list(LOG_COLUMNS),
            log_rows=rows,
        )

    @app.post("/tube", response_model=schemas.TubeResponse)
    def tube(req: schemas.TubeRequest) -> schemas.TubeResponse:
        try:
            traj = trajectory_from_dict(req.trajectory)
            corridor = corridor_from_dict(req.corridor)
            corridor.validate()
            rows: list[schemas.TubeRow] = []
            vertices: list[schemas.TubeVertex] = []
            for theta in req.thetas:
                constraints = tube_at(corridor, traj, theta)
                for normal, offset in constraints.rows:
                    rows.append(
                        schemas.TubeRow(
                            theta=theta,
                            nx=normal[0], ny=normal[1], nz=normal[2],
                            offset=offset,
                            fallback=constraints.fallback,
                        )
                    )
                if not constraints.fallback:
                    poly = corridor[traj.corridor_index_at(theta)]
                    section = cross_section(
                        poly, traj.eval(theta, 0), traj.eval(theta, 1)
                    )
                    for i, v in enumerate(section.vertices3d):
                        vertices.append(
                            schemas.TubeVertex(
                                theta=theta, index=i, x=v[0], y=v[1], z=v[2]
                            )
                        )
        except _DOMAIN_ERRORS as exc:
            raise _bad_request(exc) from exc
        return schemas.TubeResponse(rows=rows, vertices=vertices)

    @app.post("/solve-dump", response_model=schemas.SolveDumpResponse)
    def solve_dump(req: schemas.SolveDumpRequest) -> schemas.SolveDumpResponse:
        try:
            scenario = _build_scenario(req.scenario)
            controller = Controller(
                scenario.trajectory,
                scenario.corridor,
                scenario.config,
                position=scenario.start_position,
                velocity=scenario.start_velocity,
            )
            asm = controller.assemble_current(
                scenario.start_position, scenario.start_velocity, np.zeros(3)
            )
        except _DOMAIN_ERRORS as exc:
            raise _bad_request(exc) from exc
        problem = asm.problem
        return schemas.SolveDumpResponse(
            n=problem.n, m=problem.m, text=format_problem(problem)
        )

    @app.post("/sessions", response_model=schemas.SessionCreateResponse)
    def create_session(
        req: schemas.SessionCreateRequest,
    ) -> schemas.SessionCreateResponse:
        try:
            scenario = _build_scenario(req.scenario)
            controller = Controller(
                scenario.trajectory,
                scenario.corridor,
                scenario.config,
                position=scenario.start_position,
                velocity=scenario.start_velocity,
            )
        except _DOMAIN_ERRORS as exc:
            raise _bad_request(exc) from exc
        session_id = uuid.uuid4().hex
        sessions[session_id] = controller
        return schemas.SessionCreateResponse(
            session_id=session_id,
            horizon=controller.config.N,
            dt=controller.config.dt,
            thetas=[float(t) for t in controller.thetas],
        )

    @app.post("/sessions/{session_id}/step", response_model=schemas.StepResponse)
    def step_session(session_id: str, req: schemas.StepRequest) -> schemas.StepResponse:
        controller = sessions.get(session_id)
        if controller is None:
            raise HTTPException(status_code=404, detail={"message": "unknown session"})
        try:
            result = controller.step(req.position, req.velocity, req.accel)
        except _DOMAIN_ERRORS as exc:
            raise _bad_request(exc) from exc
        plan = result.plan
        return schemas.StepResponse(
            jerk=[float(v) for v in result.jerk],
            jerk_t=float(result.jerk_t),
            status=result.status,
            recovery=result.recovery,
            aborted=result.aborted,
            iterations=result.iterations,
            solve_time=result.solve_time,
            objective=result.objective,
            virtual=[float(v) for v in result.virtual],
            states=plan.states.tolist() if plan is not None else [],
            inputs=plan.inputs.tolist() if plan is not None else [],
            thetas=plan.thetas.tolist() if plan is not None else [],
        )

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str) -> dict:
        if sessions.pop(session_id, None) is None:
            raise HTTPException(status_code=404, detail={"message": "unknown session"})
        return {"deleted": session_id}

    return app


app = create_app()
