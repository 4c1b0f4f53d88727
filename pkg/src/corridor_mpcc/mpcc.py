"""Receding-horizon contouring controller.

The controller tracks a timed reference while optimizing its own progress
along it. The physical state is augmented with a virtual time triplet
(t, vt, at) driven by a virtual jerk input, so the point the drone chases is
re-timed by the optimizer instead of marching on a fixed clock: under
disturbance the controller can slow the reference down rather than cut a
corner to catch up.

State layout (12): axis-major triplets (p, v, a) for x, y, z, then the
virtual triplet (t, vt, at). Input layout (4): physical jerk (jx, jy, jz)
plus virtual jerk jt. The decision vector stacks N blocks [state(12),
input(4)], one per horizon step; step k is bound to step k-1 through the
discrete dynamics, with x^(1) anchored to the measured state via
x^(1) = A x_current + B u^(1), and u^(1) is the input actually applied.

Per step the quadratic cost is the tracking error to the reference point,
linearized at the previous plan's time t = theta, minus a progress reward
rho * vt; the constant completing the square is kept in the problem offset
so the reported objective equals the exact quadratic it approximates.
Constraints per step: 12 dynamics equalities, the polygon-tube safety rows,
velocity/acceleration boxes, input boxes, and bounds on the virtual triplet
(vt >= 0, t inside the reference's time span). A terminal row per axis
keeps the final planned velocity within the local reference speed plus a
small margin, which keeps the shrinking-horizon endgame recursively
feasible: the reference itself is a dynamically feasible continuation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from . import qp
from .corridor import Corridor
from .trajectory import ReferenceTrajectory
from .tube import TubeConstraints, tube_at

__all__ = [
    "NX",
    "NU",
    "BLOCK",
    "Limits",
    "MpccConfig",
    "StepRows",
    "AssembledQp",
    "HorizonPlan",
    "StepResult",
    "ControllerError",
    "Controller",
    "dynamics_matrices",
    "cost_blocks",
    "assemble",
]

NX = 12
NU = 4
BLOCK = NX + NU

#: state-vector index groups
POS = np.array([0, 3, 6])
VEL = np.array([1, 4, 7])
ACC = np.array([2, 5, 8])
SEL_TRACK = np.array([0, 3, 6, 9])        # positions plus virtual time
SEL_COST = np.array([0, 3, 6, 9, 10])     # tracked entries plus progress rate
SEL_BOX = np.array([1, 2, 4, 5, 7, 8])    # physical velocities and accelerations
T_IDX = 9
VT_IDX = 10
AT_IDX = 11

#: containment slack allowed for the start position, meters
START_MARGIN_TOL = 1e-3


class ControllerError(RuntimeError):
    """Raised when the controller cannot be started from the given state."""


@dataclass(frozen=True)
class Limits:
    """Symmetric dynamic-feasibility bounds (vt is bounded to [0, v_t_max])."""

    v_max: float = 3.0
    a_max: float = 6.0
    j_max: float = 30.0
    v_t_max: float = 3.0
    a_t_max: float = 5.0
    j_t_max: float = 50.0

    def __post_init__(self) -> None:
        for name in ("v_max", "a_max", "j_max", "v_t_max", "a_t_max", "j_t_max"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class MpccConfig:
    """Horizon, weights, limits and recovery policy."""

    N: int = 20
    dt: float = 0.05
    rho: float = 1.0
    terminal_eps: float = 0.1
    # small quadratic weight on the four jerk inputs; the tracking cost has
    # no curvature along them, and a first-order solver crawls on the
    # resulting flat valley unless they are regularized
    jerk_reg: float = 3e-3
    # trust region for the contour linearization: plan times t^(k) may not
    # leave [theta_k - band, theta_k + band], where the frozen-tangent
    # expansion of the reference is trustworthy; 0 disables
    theta_band: float = 0.3
    limits: Limits = field(default_factory=Limits)
    # logged plans are consumed as feasibility evidence, so the controller
    # polishes by default: the plain first-order iterate respects the limit
    # rows only to the termination tolerance (~1e-4 here), the polished
    # point to near machine precision
    solver: qp.Settings = field(default_factory=lambda: qp.Settings(polish=True))
    recovery: bool = True
    recovery_penalty: float = 1e4
    max_recovery_ticks: int = 10

    def __post_init__(self) -> None:
        if self.N < 2:
            raise ValueError("horizon length must be at least 2")
        if self.dt <= 0:
            raise ValueError("step length must be positive")
        if self.rho < 0:
            raise ValueError("progress weight must be nonnegative")
        if self.terminal_eps < 0:
            raise ValueError("terminal margin must be nonnegative")
        if self.jerk_reg < 0:
            raise ValueError("input regularization must be nonnegative")
        if self.theta_band < 0:
            raise ValueError("linearization band must be nonnegative")


def dynamics_matrices(dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Discrete triple-integrator pair (A, B) for all four axes.

    B injects jerk into acceleration only; the sub-step position and
    velocity contributions of the jerk are deliberately dropped from the
    prediction model. The simulator integrates exactly, and the resulting
    model mismatch is absorbed by receding-horizon feedback.
    """
    if dt <= 0:
        raise ValueError("step length must be positive")
    a = np.array([[1.0, dt, 0.5 * dt * dt], [0.0, 1.0, dt], [0.0, 0.0, 1.0]])
    b = np.array([[0.0], [0.0], [dt]])
    return np.kron(np.eye(4), a), np.kron(np.eye(4), b)


def cost_blocks(
    traj: ReferenceTrajectory, theta: float, rho: float
) -> tuple[np.ndarray, np.ndarray]:
    """Per-step cost of the tracking error linearized at reference time theta.

    Returns the 4x4 quadratic block on (px, py, pz, t) and the length-5
    linear term on (px, py, pz, t, vt): expanding the reference position
    around theta turns each axis error into (mu - mu'(theta) t + c_mu)^2
    with c_mu = mu'(theta) theta - mu(theta), whose quadratic part is the
    block returned here; the progress reward contributes -rho on vt. The
    constant sum of c_mu^2 completing the square is not returned; the
    assembly accumulates it into the problem offset.
    """
    p = traj.eval(theta, 0)
    d = traj.eval(theta, 1)
    c = d * theta - p
    quad = np.empty((4, 4))
    quad[:3, :3] = np.eye(3)
    quad[:3, 3] = -d
    quad[3, :3] = -d
    quad[3, 3] = d @ d
    lin = np.array([2 * c[0], 2 * c[1], 2 * c[2], -2 * (d @ c), -rho])
    return quad, lin


@dataclass(frozen=True)
class StepRows:
    """Constraint-row slices of one horizon step."""

    eq: slice
    tube: slice
    box_state: slice
    box_input: slice
    time: slice


@dataclass(frozen=True)
class AssembledQp:
    """QP plus the metadata needed to shift warm starts between ticks."""

    problem: qp.QpProblem
    steps: tuple[StepRows, ...]
    terminal: slice
    tubes: tuple[TubeConstraints, ...]
    thetas: np.ndarray
    n_slack: int = 0

    @property
    def soft(self) -> bool:
        return self.n_slack > 0

    def state_block(self, k: int) -> slice:
        """Columns of state k (1-based step index) in the decision vector."""
        base = (k - 1) * BLOCK
        return slice(base, base + NX)

    def input_block(self, k: int) -> slice:
        base = (k - 1) * BLOCK + NX
        return slice(base, base + NU)


def assemble(
    config: MpccConfig,
    traj: ReferenceTrajectory,
    corridor: Corridor,
    current: np.ndarray,
    thetas: np.ndarray,
    tubes: list[TubeConstraints] | None = None,
    soft_safety: bool = False,
) -> AssembledQp:
    """Build the horizon QP around the linearization times ``thetas``.

    ``current`` is the full 12-dimensional augmented state. With
    ``soft_safety`` every tube row gets a nonnegative slack with a linear
    penalty, which is the recovery formulation used when the hard problem
    is infeasible.
    """
    n_steps = config.N
    current = np.asarray(current, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    if current.shape != (NX,):
        raise ValueError(f"current state must have length {NX}")
    if thetas.shape != (n_steps,):
        raise ValueError("one linearization time per horizon step required")
    if tubes is None:
        tubes = [tube_at(corridor, traj, float(th)) for th in thetas]
    if len(tubes) != n_steps:
        raise ValueError("one tube row set per horizon step required")

    ad, bd = dynamics_matrices(config.dt)
    lim = config.limits
    inf = qp.INFINITY
    n_tube = sum(len(t) for t in tubes)
    n_slack = n_tube if soft_safety else 0
    n = BLOCK * n_steps + n_slack
    m = n_steps * (NX + 6 + NU + 3) + n_tube + 3 + n_slack

    rows_i: list[int] = []
    cols_j: list[int] = []
    vals: list[float] = []
    lower = np.empty(m)
    upper = np.empty(m)

    def put(i: int, j: int, v: float) -> None:
        if v != 0.0:
            rows_i.append(i)
            cols_j.append(j)
            vals.append(v)

    q_lin = np.zeros(n)
    cost_i: list[int] = []
    cost_j: list[int] = []
    cost_v: list[float] = []
    offset = 0.0

    nz_ad = [(r, c) for r in range(NX) for c in range(NX) if ad[r, c] != 0.0]
    nz_bd = [(r, c) for r in range(NX) for c in range(NU) if bd[r, c] != 0.0]

    row = 0
    slack_col = BLOCK * n_steps
    steps: list[StepRows] = []
    for k in range(1, n_steps + 1):
        xb = (k - 1) * BLOCK
        ub = xb + NX

        eq = slice(row, row + NX)
        for i in range(NX):
            put(row + i, xb + i, 1.0)
        for r, c in nz_bd:
            put(row + r, ub + c, -bd[r, c])
        if k == 1:
            rhs = ad @ current
        else:
            xb_prev = (k - 2) * BLOCK
            for r, c in nz_ad:
                put(row + r, xb_prev + c, -ad[r, c])
            rhs = np.zeros(NX)
        lower[eq] = rhs
        upper[eq] = rhs
        row += NX

        tube_rows = tubes[k - 1]
        tb = slice(row, row + len(tube_rows))
        for i in range(len(tube_rows)):
            normal = tube_rows.normals[i]
            for axis in range(3):
                put(row, xb + POS[axis], normal[axis])
            if soft_safety:
                put(row, slack_col, -1.0)
                slack_col += 1
            lower[row] = -inf
            upper[row] = tube_rows.offsets[i]
            row += 1

        box_state = slice(row, row + 6)
        box_bounds = np.array(
            [lim.v_max, lim.a_max, lim.v_max, lim.a_max, lim.v_max, lim.a_max]
        )
        for i, idx in enumerate(SEL_BOX):
            put(row + i, xb + idx, 1.0)
        lower[box_state] = -box_bounds
        upper[box_state] = box_bounds
        row += 6

        box_input = slice(row, row + NU)
        in_bounds = np.array([lim.j_max, lim.j_max, lim.j_max, lim.j_t_max])
        for i in range(NU):
            put(row + i, ub + i, 1.0)
        lower[box_input] = -in_bounds
        upper[box_input] = in_bounds
        row += NU

        time_rows = slice(row, row + 3)
        put(row, xb + T_IDX, 1.0)
        lower[row] = traj.t0
        if config.theta_band > 0.0:
            # one-sided trust region: never plan past the reach of the
            # frozen-tangent expansion; one dynamics step must stay inside
            reach = config.dt * lim.v_t_max + 0.5 * config.dt**2 * lim.a_t_max
            band = max(config.theta_band, reach)
            upper[row] = min(traj.tm, float(thetas[k - 1]) + band)
        else:
            upper[row] = traj.tm
        put(row + 1, xb + VT_IDX, 1.0)
        lower[row + 1] = 0.0
        upper[row + 1] = lim.v_t_max
        put(row + 2, xb + AT_IDX, 1.0)
        lower[row + 2] = -lim.a_t_max
        upper[row + 2] = lim.a_t_max
        row += 3

        steps.append(StepRows(eq, tb, box_state, box_input, time_rows))

        theta_k = float(thetas[k - 1])
        quad, lin = cost_blocks(traj, theta_k, config.rho)
        c_vec = traj.eval(theta_k, 1) * theta_k - traj.eval(theta_k, 0)
        offset += float(c_vec @ c_vec)
        cols = xb + SEL_TRACK
        for a in range(4):
            for b in range(a, 4):
                v = 2.0 * quad[a, b]
                if v != 0.0:
                    cost_i.append(cols[a])
                    cost_j.append(cols[b])
                    cost_v.append(v)
        q_lin[xb + SEL_COST] += lin
        if config.jerk_reg > 0.0:
            for i in range(NU):
                cost_i.append(ub + i)
                cost_j.append(ub + i)
                cost_v.append(2.0 * config.jerk_reg)

    terminal = slice(row, row + 3)
    xb_last = (n_steps - 1) * BLOCK
    d_end = traj.eval(float(thetas[-1]), 1)
    for axis in range(3):
        put(row + axis, xb_last + VEL[axis], 1.0)
        bound = abs(float(d_end[axis])) + config.terminal_eps
        lower[row + axis] = -bound
        upper[row + axis] = bound
    row += 3

    if soft_safety:
        for s in range(n_slack):
            put(row + s, BLOCK * n_steps + s, 1.0)
            lower[row + s] = 0.0
            upper[row + s] = inf
        q_lin[BLOCK * n_steps :] = config.recovery_penalty
        row += n_slack
    assert row == m

    a_mat = qp.SparseMatrix.from_scipy(
        scipy.sparse.coo_matrix((vals, (rows_i, cols_j)), shape=(m, n))
    )
    q_mat = qp.SparseMatrix.from_scipy(
        scipy.sparse.coo_matrix((cost_v, (cost_i, cost_j)), shape=(n, n))
    )
    problem = qp.QpProblem(Q=q_mat, q=q_lin, A=a_mat, l=lower, u=upper, offset=offset)
    return AssembledQp(
        problem=problem,
        steps=tuple(steps),
        terminal=terminal,
        tubes=tuple(tubes),
        thetas=thetas.copy(),
        n_slack=n_slack,
    )


@dataclass(frozen=True)
class HorizonPlan:
    """Solved horizon: per-step augmented states, inputs, and time samples."""

    states: np.ndarray   # (N, 12)
    inputs: np.ndarray   # (N, 4)
    thetas: np.ndarray   # solved t^(k), the next cycle's linearization times
    solve_time: float
    solver_status: str

    @classmethod
    def from_solution(cls, solution: qp.QpSolution, asm: AssembledQp, n_steps: int) -> "HorizonPlan":
        states = np.stack([solution.primal[asm.state_block(k)] for k in range(1, n_steps + 1)])
        inputs = np.stack([solution.primal[asm.input_block(k)] for k in range(1, n_steps + 1)])
        return cls(
            states=states,
            inputs=inputs,
            thetas=states[:, T_IDX].copy(),
            solve_time=solution.solve_time,
            solver_status=solution.status,
        )


@dataclass(frozen=True)
class StepResult:
    """Outcome of one controller tick."""

    jerk: np.ndarray
    jerk_t: float
    status: str
    recovery: bool
    warned: bool
    aborted: bool
    iterations: int
    solve_time: float
    objective: float
    virtual: np.ndarray  # (t, vt, at) after this tick
    plan: HorizonPlan | None
    solution: qp.QpSolution | None


class Controller:
    """Warm-started receding-horizon controller over a corridor tube.

    Construction seeds the linearization times by projecting the start
    position onto the reference and rejects starts outside the corridor.
    Each :meth:`step` call solves one horizon problem, applies the first
    input, advances the virtual time triplet along the solved plan (the
    virtual subsystem has no sensor, so it evolves open loop by its own
    planned dynamics), and shifts the plan one step to warm start the next
    tick. A primal infeasible tick falls back to a recovery problem
    (nearest polyhedron's raw faces, slack-softened); if even that fails
    the tick commands zero jerk. Too many consecutive recovery or failed
    ticks abort the run.
    """

    def __init__(
        self,
        traj: ReferenceTrajectory,
        corridor: Corridor,
        config: MpccConfig | None = None,
        position: np.ndarray | None = None,
        velocity: np.ndarray | None = None,
    ) -> None:
        self.traj = traj
        self.corridor = corridor
        self.config = config or MpccConfig()
        position = np.zeros(3) if position is None else np.asarray(position, float)
        velocity = np.zeros(3) if velocity is None else np.asarray(velocity, float)

        margins = [poly.margin(position) for poly in corridor.polyhedra]
        best = int(np.argmax(margins))
        if margins[best] < -START_MARGIN_TOL:
            poly = corridor[best]
            a_mat, b_vec = poly.matrix_form()
            viol = a_mat @ position - b_vec
            face = int(np.argmax(viol / np.linalg.norm(a_mat, axis=1)))
            raise ControllerError(
                f"start position {position.tolist()} lies outside the corridor; "
                f"nearest polyhedron {best} is violated at face {face} "
                f"by {-margins[best]:.6f} m"
            )

        theta0 = traj.project(position, traj.t0, traj.span)
        d0 = traj.eval(theta0, 1)
        speed_sq = float(d0 @ d0)
        vt0 = 0.0
        if speed_sq > 1e-18:
            # least-squares fit of v ~ mu'(theta0) * vt: only the tangential
            # velocity component seeds the clock rate; a sideways start must
            # not launch the virtual time ahead of the trust region
            vt0 = float(np.clip(velocity @ d0 / speed_sq, 0.0,
                                self.config.limits.v_t_max))
        self.virtual = np.array([theta0, vt0, 0.0])
        # seed the linearization grid at the faster of the seeded clock rate
        # and nominal playback, so the coasting clock stays inside the
        # one-sided band until the first solve takes over
        ks = np.arange(self.config.N, dtype=float)
        spacing = self.config.dt * max(vt0, 1.0)
        self.thetas = np.clip(theta0 + ks * spacing, traj.t0, traj.tm)

        self.last_assembled: AssembledQp | None = None
        self.last_solution: qp.QpSolution | None = None
        self.recovery_ticks = 0
        self._position = position.copy()

    def full_state(self, position, velocity, accel) -> np.ndarray:
        """Augment the physical state with the internal virtual triplet."""
        state = np.empty(NX)
        state[POS] = position
        state[VEL] = velocity
        state[ACC] = accel
        state[[T_IDX, VT_IDX, AT_IDX]] = self.virtual
        return state

    def assemble_current(self, position, velocity, accel,
                         soft_safety: bool = False) -> AssembledQp:
        """Horizon problem for the given physical state, without stepping."""
        current = self.full_state(position, velocity, accel)
        return assemble(
            self.config, self.traj, self.corridor, current, self.thetas,
            soft_safety=soft_safety,
        )

    def _warm_start(
        self, asm: AssembledQp, current: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray] | None:
        """Shift the previous solution one step; the last block repeats.

        Without a previous solution, seed the primal with a zero-input
        rollout from the current state: it already satisfies the dynamics
        rows, which cuts the cold-start iteration count substantially.
        """
        if self.last_solution is None or self.last_assembled is None:
            a_mat, _ = dynamics_matrices(self.config.dt)
            x0 = np.zeros(asm.problem.n)
            state = current
            for k in range(self.config.N):
                state = a_mat @ state
                x0[k * BLOCK : k * BLOCK + NX] = state
            return x0, np.zeros(asm.problem.m)
        prev = self.last_assembled
        n_steps = self.config.N
        x0 = np.zeros(asm.problem.n)
        core = BLOCK * n_steps
        x_prev = self.last_solution.primal
        x0[: core - BLOCK] = x_prev[BLOCK:core]
        x0[core - BLOCK : core] = x_prev[core - BLOCK : core]

        y0 = np.zeros(asm.problem.m)
        y_prev = self.last_solution.dual
        for k in range(n_steps):
            src = prev.steps[min(k + 1, n_steps - 1)]
            dst = asm.steps[k]
            for name in ("eq", "box_state", "box_input", "time"):
                y0[getattr(dst, name)] = y_prev[getattr(src, name)]
            n_copy = min(src.tube.stop - src.tube.start,
                         dst.tube.stop - dst.tube.start)
            y0[dst.tube.start : dst.tube.start + n_copy] = y_prev[
                src.tube.start : src.tube.start + n_copy
            ]
        y0[asm.terminal] = y_prev[prev.terminal]
        return x0, y0

    def _advance_virtual(self, plan: HorizonPlan) -> None:
        """Step the open-loop virtual subsystem along the solved plan."""
        lim = self.config.limits
        traj = self.traj
        first = plan.states[0]
        self.virtual = np.array([
            float(np.clip(first[T_IDX], traj.t0, traj.tm)),
            float(np.clip(first[VT_IDX], 0.0, lim.v_t_max)),
            float(np.clip(first[AT_IDX], -lim.a_t_max, lim.a_t_max)),
        ])
        # theta for next cycle: solved t one step ahead, last one
        # extrapolated by its own rate
        n_steps = self.config.N
        new_thetas = np.empty(n_steps)
        new_thetas[: n_steps - 1] = plan.states[1:, T_IDX]
        new_thetas[-1] = plan.states[-1, T_IDX] + self.config.dt * plan.states[-1, VT_IDX]
        new_thetas = np.clip(new_thetas, traj.t0, traj.tm)
        self.thetas = np.maximum.accumulate(new_thetas)

    def _coast_virtual(self) -> None:
        """Propagate the virtual triplet with zero virtual jerk."""
        dt = self.config.dt
        t, vt, at = self.virtual
        t = t + vt * dt + 0.5 * at * dt * dt
        vt = vt + at * dt
        t = float(np.clip(t, self.traj.t0, self.traj.tm))
        vt = float(np.clip(vt, 0.0, self.config.limits.v_t_max))
        self.virtual = np.array([t, vt, at])

    def _recovery_tubes(self) -> list[TubeConstraints]:
        """Raw faces of the least-violated polyhedron at each plan position."""
        tubes = []
        for k in range(1, self.config.N + 1):
            if self.last_solution is not None and self.last_assembled is not None:
                point = self.last_solution.primal[self.last_assembled.state_block(k)][POS]
            else:
                point = self._position
            margins = [poly.margin(point) for poly in self.corridor.polyhedra]
            poly = self.corridor[int(np.argmax(margins))]
            a_mat, b_vec = poly.matrix_form()
            tubes.append(
                TubeConstraints(normals=a_mat, offsets=b_vec, axis=None, fallback=True)
            )
        return tubes

    def step(self, position, velocity, accel) -> StepResult:
        """Advance one tick; returns the jerk command to apply over dt."""
        self._position = np.asarray(position, dtype=float)
        current = self.full_state(position, velocity, accel)
        asm = assemble(self.config, self.traj, self.corridor, current, self.thetas)
        warm = self._warm_start(asm, current)
        sol = qp.solve(asm.problem, warm=warm, settings=self.config.solver)

        recovery = False
        if sol.status == "primal_infeasible" and self.config.recovery:
            recovery = True
            asm_soft = assemble(
                self.config, self.traj, self.corridor, current, self.thetas,
                tubes=self._recovery_tubes(), soft_safety=True,
            )
            warm_soft = None
            if warm is not None:
                x0 = np.zeros(asm_soft.problem.n)
                x0[: len(warm[0])] = warm[0]
                warm_soft = (x0, np.zeros(asm_soft.problem.m))
            sol = qp.solve(asm_soft.problem, warm=warm_soft,
                           settings=self.config.solver)
            asm = asm_soft

        if sol.status in ("solved", "max_iterations"):
            plan = HorizonPlan.from_solution(sol, asm, self.config.N)
            jerk = plan.inputs[0]
            self._advance_virtual(plan)
            self.last_assembled = asm
            self.last_solution = sol
            self.recovery_ticks = self.recovery_ticks + 1 if recovery else 0
            return StepResult(
                jerk=jerk[:3].copy(),
                jerk_t=float(jerk[3]),
                status=sol.status,
                recovery=recovery,
                warned=sol.status == "max_iterations",
                aborted=self.recovery_ticks > self.config.max_recovery_ticks,
                iterations=sol.iterations,
                solve_time=sol.solve_time,
                objective=sol.objective,
                virtual=self.virtual.copy(),
                plan=plan,
                solution=sol,
            )

        # even the recovery problem failed (or recovery is disabled):
        # command zero jerk and let the virtual time coast
        self._coast_virtual()
        self.recovery_ticks += 1
        return StepResult(
            jerk=np.zeros(3),
            jerk_t=0.0,
            status="failed",
            recovery=recovery,
            warned=True,
            aborted=self.recovery_ticks > self.config.max_recovery_ticks,
            iterations=sol.iterations,
            solve_time=sol.solve_time,
            objective=np.nan,
            virtual=self.virtual.copy(),
            plan=None,
            solution=None,
        )
