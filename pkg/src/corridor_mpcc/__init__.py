"""Corridor-constrained model predictive contouring control.

A receding-horizon controller that tracks a piecewise-polynomial reference
while re-timing its progress along it, subject to hard safety constraints
from a corridor of overlapping convex polyhedra. The horizon problem is a
single convex QP solved by a warm-started operator-splitting method; a
point-mass simulator with disturbance injection closes the loop.
"""

from .corridor import (
    Corridor,
    CorridorError,
    EmptyPolyhedronError,
    Halfspace,
    Polyhedron,
    UnboundedPolyhedronError,
    corridor_from_dict,
    load_corridor,
)
from .mpcc import (
    AssembledQp,
    Controller,
    ControllerError,
    HorizonPlan,
    Limits,
    MpccConfig,
    StepResult,
    assemble,
    cost_blocks,
    dynamics_matrices,
)
from .qp import (
    KktResiduals,
    NonConvexError,
    QpProblem,
    QpSolution,
    Settings,
    SparseMatrix,
    dump_problem,
    kkt_residuals,
    load_problem,
    solve,
)
from .sim import (
    Disturbance,
    PlantState,
    RunSummary,
    Scenario,
    SimResult,
    load_scenario,
    plant_step,
    run_baseline,
    run_scenario,
    scenario_from_dict,
    summarize,
)
from .trajectory import (
    PolySegment,
    ReferenceTrajectory,
    TrajectoryError,
    load_trajectory,
    trajectory_from_dict,
)
from .tube import (
    CrossSection,
    DegenerateSectionError,
    TubeConstraints,
    cross_section,
    sweep,
    tube_at,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # trajectory
    "PolySegment",
    "ReferenceTrajectory",
    "TrajectoryError",
    "trajectory_from_dict",
    "load_trajectory",
    # corridor
    "Halfspace",
    "Polyhedron",
    "Corridor",
    "CorridorError",
    "EmptyPolyhedronError",
    "UnboundedPolyhedronError",
    "corridor_from_dict",
    "load_corridor",
    # tube
    "CrossSection",
    "TubeConstraints",
    "DegenerateSectionError",
    "cross_section",
    "sweep",
    "tube_at",
    # qp
    "SparseMatrix",
    "QpProblem",
    "QpSolution",
    "Settings",
    "KktResiduals",
    "NonConvexError",
    "solve",
    "kkt_residuals",
    "dump_problem",
    "load_problem",
    # mpcc
    "Limits",
    "MpccConfig",
    "Controller",
    "ControllerError",
    "HorizonPlan",
    "StepResult",
    "AssembledQp",
    "dynamics_matrices",
    "cost_blocks",
    "assemble",
    # sim
    "PlantState",
    "Disturbance",
    "Scenario",
    "SimResult",
    "RunSummary",
    "plant_step",
    "run_scenario",
    "run_baseline",
    "summarize",
    "scenario_from_dict",
    "load_scenario",
]
