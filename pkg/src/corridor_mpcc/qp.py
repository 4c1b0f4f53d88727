"""Convex QP solver based on operator splitting.

Solves

    minimize   0.5 x' Q x + q' x  (+ offset)
    subject to l <= A x <= u

with an ADMM iteration on Ruiz-equilibrated data. The linear system of each
iteration is reduced to the positive definite form Q + sigma I + A' R A and
factored once per solve with a dense Cholesky decomposition; a failed
factorization of Q + sigma I reports the problem as non-convex instead of
silently iterating on an indefinite objective. Primal and dual infeasibility
are detected from the one-iteration increments of the iterates and reported
with normalized certificates.

Supports warm starting from a previous solution, which is what makes the
receding-horizon controller cheap: consecutive problems differ only by one
shifted step.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

__all__ = [
    "INFINITY",
    "NonConvexError",
    "SparseMatrix",
    "QpProblem",
    "QpSolution",
    "KktResiduals",
    "Settings",
    "solve",
    "kkt_residuals",
    "format_problem",
    "dump_problem",
    "load_problem",
]


class NonConvexError(ValueError):
    """The cost matrix is not positive semidefinite (factorization failed)."""

#: bounds at or beyond this magnitude are treated as absent
INFINITY = 1e30

_MIN_SCALING = 1e-4
_MAX_SCALING = 1e4


@dataclass(frozen=True)
class SparseMatrix:
    """Compressed sparse column matrix with explicit shape.

    The on-the-wire representation used by the QP layer; conversion to and
    from scipy is loss-free.
    """

    data: np.ndarray
    indices: np.ndarray
    indptr: np.ndarray
    shape: tuple[int, int]

    @classmethod
    def from_scipy(cls, mat) -> "SparseMatrix":
        csc = scipy.sparse.csc_matrix(mat)
        csc.sort_indices()
        return cls(
            data=np.asarray(csc.data, dtype=float),
            indices=np.asarray(csc.indices, dtype=np.int64),
            indptr=np.asarray(csc.indptr, dtype=np.int64),
            shape=(int(csc.shape[0]), int(csc.shape[1])),
        )

    @classmethod
    def from_dense(cls, mat: np.ndarray) -> "SparseMatrix":
        return cls.from_scipy(scipy.sparse.csc_matrix(np.asarray(mat, dtype=float)))

    def to_scipy(self) -> scipy.sparse.csc_matrix:
        return scipy.sparse.csc_matrix(
            (self.data, self.indices, self.indptr), shape=self.shape
        )

    def to_dense(self) -> np.ndarray:
        return self.to_scipy().toarray()

    @property
    def nnz(self) -> int:
        return len(self.data)

    def validate(self) -> None:
        rows, cols = self.shape
        if rows < 0 or cols < 0:
            raise ValueError("negative dimension in sparse matrix shape")
        if len(self.indptr) != cols + 1:
            raise ValueError("indptr length must be ncols + 1")
        if self.indptr[0] != 0 or self.indptr[-1] != len(self.data):
            raise ValueError("indptr must start at 0 and end at nnz")
        if np.any(np.diff(self.indptr) < 0):
            raise ValueError("indptr must be nondecreasing")
        if len(self.indices) != len(self.data):
            raise ValueError("indices and data length mismatch")
        if len(self.indices) and (self.indices.min() < 0 or self.indices.max() >= rows):
            raise ValueError("row index out of range")
        if len(self.indices) > 1:
            gaps = np.diff(self.indices)
            within_col = np.ones(len(gaps), dtype=bool)
            starts = np.asarray(self.indptr[1:-1])
            starts = starts[(starts > 0) & (starts < len(self.indices))]
            within_col[starts - 1] = False
            bad = np.flatnonzero(within_col & (gaps <= 0))
            if len(bad):
                j = int(np.searchsorted(self.indptr, bad[0], side="right") - 1)
                raise ValueError(f"rows of column {j} must be strictly increasing")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("sparse matrix entries must be finite")


@dataclass(frozen=True)
class QpProblem:
    """Quadratic program in standard two-sided form.

    ``Q`` holds the upper triangle of the symmetric cost matrix (the lower
    triangle is implied). ``offset`` is a constant added to the reported
    objective so linearized costs can reproduce the value of the function
    they approximate.
    """

    Q: SparseMatrix
    q: np.ndarray
    A: SparseMatrix
    l: np.ndarray
    u: np.ndarray
    offset: float = 0.0

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    @property
    def m(self) -> int:
        return self.A.shape[0]

    def validate(self) -> None:
        self.Q.validate()
        self.A.validate()
        n, m = self.n, self.m
        if self.Q.shape != (n, n):
            raise ValueError("Q must be square")
        if np.any(self.Q.indices > np.repeat(np.arange(n), np.diff(self.Q.indptr))):
            raise ValueError("Q must store the upper triangle only")
        if self.A.shape[1] != n:
            raise ValueError("A column count must match Q dimension")
        if self.q.shape != (n,):
            raise ValueError("q length must match Q dimension")
        if self.l.shape != (m,) or self.u.shape != (m,):
            raise ValueError("bound lengths must match A row count")
        if not np.all(np.isfinite(self.q)):
            raise ValueError("q must be finite")
        if np.any(np.minimum(self.l, INFINITY) > np.minimum(self.u, INFINITY)):
            raise ValueError("lower bound exceeds upper bound")

    def dense_cost(self) -> np.ndarray:
        """Full symmetric cost matrix."""
        upper = self.Q.to_dense()
        return upper + upper.T - np.diag(np.diag(upper))

    def objective(self, x: np.ndarray) -> float:
        upper = self.Q.to_scipy()
        quad = 2.0 * (x @ (upper @ x)) - float(upper.diagonal() @ (x * x))
        return float(0.5 * quad + self.q @ x + self.offset)


@dataclass(frozen=True)
class Settings:
    """Solver parameters; defaults are tuned for the contouring horizon."""

    rho: float = 0.1
    rho_eq_scale: float = 1e3
    sigma: float = 1e-6
    alpha: float = 1.6
    eps_abs: float = 1e-5
    eps_rel: float = 1e-5
    eps_pinf: float = 1e-4
    eps_dinf: float = 1e-4
    max_iter: int = 4000
    check_interval: int = 10
    scaling_iters: int = 10
    # step-size adaptation: rebalance rho toward the primal/dual residual
    # ratio and refactorize, but only when it drifts by the tolerance factor
    adaptive_rho: bool = True
    adaptive_rho_interval: int = 50
    adaptive_rho_tolerance: float = 5.0
    rho_min: float = 1e-6
    rho_max: float = 1e6
    # after convergence, re-solve the KKT system restricted to the active
    # rows (identified by the dual signs) once, exactly: first-order iterates
    # satisfy the bounds only to the termination tolerance, the polished
    # point to near machine precision; adopted only if both residuals improve
    polish: bool = False
    polish_delta: float = 1e-6
    polish_refine: int = 3

    def __post_init__(self) -> None:
        if self.rho <= 0 or self.sigma <= 0:
            raise ValueError("rho and sigma must be positive")
        if not 0 < self.alpha < 2:
            raise ValueError("relaxation alpha must be in (0, 2)")
        if self.max_iter < 1 or self.check_interval < 1:
            raise ValueError("iteration counts must be positive")
        if self.adaptive_rho_interval < 1 or self.adaptive_rho_tolerance < 1:
            raise ValueError("rho adaptation parameters out of range")
        if not 0 < self.rho_min <= self.rho <= self.rho_max:
            raise ValueError("rho must lie within [rho_min, rho_max]")
        if self.polish_delta <= 0 or self.polish_refine < 0:
            raise ValueError("polish parameters out of range")


@dataclass(frozen=True)
class QpSolution:
    """Result of one solve.

    ``status`` is one of solved, max_iterations, primal_infeasible,
    dual_infeasible. Iterates are always present (best effort on early
    exits); ``certificate`` carries the normalized infeasibility ray when
    one was found. ``polished`` reports whether the exact active-set
    refinement was applied (see Settings.polish). Dual sign convention: at
    optimality Q x + q + A' y = 0, so for min x^2 + y^2 s.t. x + y = 1 the
    equality multiplier is -1.
    """

    primal: np.ndarray
    dual: np.ndarray
    status: str
    iterations: int
    primal_residual: float
    dual_residual: float
    objective: float
    solve_time: float
    certificate: np.ndarray | None = None
    polished: bool = False

    @property
    def solved(self) -> bool:
        return self.status == "solved"


@dataclass
class _Scaled:
    P: scipy.sparse.csc_matrix
    q: np.ndarray
    A: scipy.sparse.csc_matrix
    l: np.ndarray
    u: np.ndarray
    D: np.ndarray
    E: np.ndarray
    c: float


def _limit(values: np.ndarray) -> np.ndarray:
    out = np.where(values < _MIN_SCALING, 1.0, values)
    return np.minimum(out, _MAX_SCALING)


def _csc_col_abs_max(data: np.ndarray, indptr: np.ndarray, ncols: int) -> np.ndarray:
    """Per-column infinity norm of a CSC array triplet."""
    out = np.zeros(ncols)
    if len(data) == 0:
        return out
    nonempty = np.flatnonzero(np.diff(indptr) > 0)
    # consecutive starts of nonempty columns bound exactly one column's data
    out[nonempty] = np.maximum.reduceat(np.abs(data), indptr[nonempty])
    return out


def _csc_row_abs_max(data: np.ndarray, indices: np.ndarray, nrows: int) -> np.ndarray:
    """Per-row infinity norm of a CSC array triplet."""
    out = np.zeros(nrows)
    if len(data):
        np.maximum.at(out, indices, np.abs(data))
    return out


def _ruiz(P: scipy.sparse.csc_matrix, q: np.ndarray, A: scipy.sparse.csc_matrix,
          l: np.ndarray, u: np.ndarray, iters: int) -> _Scaled:
    """Symmetric equilibration of the KKT matrix plus cost normalization.

    Works on the raw CSC arrays: each pass is a handful of vectorized
    passes over the nonzeros, so the cost stays negligible next to a
    single factorization.
    """
    n = P.shape[0]
    m = A.shape[0]
    D = np.ones(n)
    E = np.ones(m)
    c = 1.0
    P = P.copy()
    P.sort_indices()
    q = q.copy()
    A = A.copy()
    A.sort_indices()
    p_col = np.repeat(np.arange(n), np.diff(P.indptr))
    a_col = np.repeat(np.arange(n), np.diff(A.indptr))
    for _ in range(iters):
        col_p = _csc_col_abs_max(P.data, P.indptr, n)
        col_a = _csc_col_abs_max(A.data, A.indptr, n)
        dx = 1.0 / np.sqrt(_limit(np.maximum(col_p, col_a)))
        row_a = _csc_row_abs_max(A.data, A.indices, m)
        dz = 1.0 / np.sqrt(_limit(row_a))
        P.data *= dx[P.indices] * dx[p_col]
        q *= dx
        A.data *= dz[A.indices] * dx[a_col]
        D *= dx
        E *= dz
        col_mean = float(np.mean(_csc_col_abs_max(P.data, P.indptr, n))) if n else 0.0
        q_max = np.linalg.norm(q, np.inf) if n else 0.0
        gamma = 1.0 / _limit(np.array([max(col_mean, q_max)]))[0]
        P.data *= gamma
        q *= gamma
        c *= gamma
    l_inf = l <= -INFINITY
    u_inf = u >= INFINITY
    ls = np.where(l_inf, -np.inf, E * l)
    us = np.where(u_inf, np.inf, E * u)
    return _Scaled(P=P, q=q, A=A, l=ls, u=us, D=D, E=E, c=c)


def _norm_inf(v: np.ndarray) -> float:
    return float(np.linalg.norm(v, np.inf)) if len(v) else 0.0


def _polish(P0, q0, A0, l0, u0, z0, y, r_prim, r_dual, cfg):
    """Exact re-solve on the active rows identified by the converged iterate.

    A row is classified lower-active when its slack is smaller than the
    magnitude of its (negative) dual, upper-active symmetrically — both
    quantities converge to zero only on the correct side, so the comparison
    is robust to termination noise on the duals. Equality rows are active
    regardless of sign. The equality-constrained KKT system on those rows is
    factored once with a small regularization and refined against the
    unregularized system; the polished pair replaces the ADMM iterate only
    if it improves both residuals (a failed factorization or a misidentified
    active set leaves the iterate untouched).

    Returns (x, y, r_prim, r_dual) or None when polishing is rejected.
    """
    n = P0.shape[0]
    m = A0.shape[0]
    eq = u0 - l0 < 1e-10
    low = ((z0 - l0 < -y) & (l0 > -INFINITY)) | eq
    upp = (u0 - z0 < y) & (u0 < INFINITY) & ~eq
    rows = np.flatnonzero(low | upp)
    na = len(rows)
    b_act = np.where(low[rows], l0[rows], u0[rows])
    delta = cfg.polish_delta

    a_act = A0.tocsr()[rows].tocsc() if na else scipy.sparse.csc_matrix((0, n))
    ident = scipy.sparse.identity(n, format="csc")
    if na == 0:
        kkt_reg = (P0 + delta * ident).tocsc()
    else:
        kkt_reg = scipy.sparse.bmat(
            [[P0 + delta * ident, a_act.T],
             [a_act, -delta * scipy.sparse.identity(na)]],
            format="csc",
        )
    rhs = np.concatenate([-q0, b_act])
    try:
        lu = scipy.sparse.linalg.splu(kkt_reg)
        sol = lu.solve(rhs)
    except RuntimeError:
        return None
    if not np.all(np.isfinite(sol)):
        return None
    for _ in range(cfg.polish_refine):
        # residual of the unregularized KKT system
        r_top = P0 @ sol[:n] + q0
        if na:
            r_top = r_top + a_act.T @ sol[n:]
            r_bot = a_act @ sol[:n] - b_act
        else:
            r_bot = np.zeros(0)
        sol = sol - lu.solve(np.concatenate([r_top, r_bot]))
    x_pol = sol[:n]
    y_pol = np.zeros(m)
    y_pol[rows] = sol[n:]

    ax = A0 @ x_pol if m else np.zeros(0)
    viol = np.maximum(np.maximum(l0 - ax, ax - u0), 0.0) if m else np.zeros(0)
    r_prim_pol = _norm_inf(viol)
    grad = P0 @ x_pol + q0
    if m:
        grad = grad + A0.T @ y_pol
    r_dual_pol = _norm_inf(grad)
    ok = (np.all(np.isfinite(x_pol)) and r_prim_pol <= max(r_prim, 1e-12)
          and r_dual_pol <= max(r_dual, 1e-12))
    if not ok:
        return None
    return x_pol, y_pol, r_prim_pol, r_dual_pol


def solve(
    problem: QpProblem,
    warm: tuple[np.ndarray, np.ndarray] | None = None,
    settings: Settings | None = None,
) -> QpSolution:
    """Solve the QP, optionally warm starting from a (primal, dual) pair."""
    t_start = time.perf_counter()
    cfg = settings or Settings()
    problem.validate()
    n, m = problem.n, problem.m
    x0, y0 = (None, None) if warm is None else warm

    upper = problem.Q.to_scipy()
    P0 = (upper + upper.T - scipy.sparse.diags(upper.diagonal())).tocsc()
    q0 = problem.q.astype(float)
    A0 = problem.A.to_scipy()
    l0 = np.maximum(problem.l.astype(float), -INFINITY)
    u0 = np.minimum(problem.u.astype(float), INFINITY)

    sc = _ruiz(P0, q0, A0, l0, u0, cfg.scaling_iters)

    # convexity check on the regularized cost alone; the reduced system
    # below could be positive definite even for indefinite Q
    P_dense = sc.P.toarray()
    try:
        scipy.linalg.cholesky(P_dense + cfg.sigma * np.eye(n), lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise NonConvexError(
            "cost matrix is not positive semidefinite"
        ) from exc

    A = sc.A
    At = A.T.tocsc()
    eq_row = u0 - l0 < 1e-10

    def _factorize(rho_bar: float):
        # constraint stepsizes: stiffen equality rows so they bind quickly
        rho = np.full(m, rho_bar)
        rho[eq_row] *= cfg.rho_eq_scale
        reduced = P_dense + cfg.sigma * np.eye(n)
        if m:
            reduced = reduced + (At @ scipy.sparse.diags(rho) @ A).toarray()
        chol, _ = scipy.linalg.cho_factor(
            np.asfortranarray(reduced), lower=True, check_finite=False
        )
        # keep the factor Fortran-ordered so the triangular solves skip copies
        solve_kkt = scipy.linalg.get_lapack_funcs(("potrs",), (chol,))[0]
        return rho, (1.0 / rho if m else np.zeros(0)), chol, solve_kkt

    rho_bar = cfg.rho
    rho, rho_inv, chol, solve_kkt = _factorize(rho_bar)

    x = np.zeros(n) if x0 is None else x0 / sc.D
    y = np.zeros(m) if y0 is None else sc.c * (y0 / sc.E) if m else np.zeros(0)
    z = np.clip(A @ x, sc.l, sc.u) if m else np.zeros(0)

    d_inv = 1.0 / sc.D
    e_inv = 1.0 / sc.E if m else np.zeros(0)

    status = "max_iterations"
    iterations = cfg.max_iter
    r_prim = np.nan
    r_dual = np.nan
    certificate = None

    for k in range(1, cfg.max_iter + 1):
        x_prev, y_prev = x, y
        rhs = cfg.sigma * x - sc.q
        if m:
            rhs = rhs + At @ (rho * z - y)
        x_tilde, _ = solve_kkt(chol, rhs, lower=True)
        x = cfg.alpha * x_tilde + (1.0 - cfg.alpha) * x
        if m:
            z_tilde = A @ x_tilde
            z_relaxed = cfg.alpha * z_tilde + (1.0 - cfg.alpha) * z
            z = np.clip(z_relaxed + rho_inv * y, sc.l, sc.u)
            y = y + rho * (z_relaxed - z)

        if k % cfg.check_interval and k != cfg.max_iter:
            continue

        # unscaled residuals and relative tolerance scales
        ax = e_inv * (A @ x) if m else np.zeros(0)
        zu = e_inv * z
        r_prim = _norm_inf(ax - zu)
        px = d_inv * (sc.P @ x)
        aty = d_inv * (At @ y) if m else np.zeros(n)
        r_dual = _norm_inf(px + d_inv * sc.q + aty) / sc.c
        eps_prim = cfg.eps_abs + cfg.eps_rel * max(_norm_inf(ax), _norm_inf(zu))
        eps_dual = cfg.eps_abs + cfg.eps_rel * max(
            _norm_inf(px), _norm_inf(aty), _norm_inf(d_inv * sc.q)
        ) / sc.c
        if r_prim <= eps_prim and r_dual <= eps_dual:
            status = "solved"
            iterations = k
            break

        if cfg.adaptive_rho and m and k % cfg.adaptive_rho_interval == 0:
            rp_rel = r_prim / max(_norm_inf(ax), _norm_inf(zu), 1e-30)
            denom_d = max(
                _norm_inf(px), _norm_inf(aty), _norm_inf(d_inv * sc.q)
            ) / sc.c
            rd_rel = r_dual / max(denom_d, 1e-30)
            candidate = rho_bar * np.sqrt(rp_rel / max(rd_rel, 1e-30))
            candidate = float(np.clip(candidate, cfg.rho_min, cfg.rho_max))
            ratio = candidate / rho_bar
            if (ratio > cfg.adaptive_rho_tolerance
                    or ratio < 1.0 / cfg.adaptive_rho_tolerance):
                rho_bar = candidate
                rho, rho_inv, chol, solve_kkt = _factorize(rho_bar)

        if m:
            dy = sc.E * (y - y_prev) / sc.c
            cert = _primal_infeasibility(dy, A0, l0, u0, cfg.eps_pinf)
            if cert is not None:
                status = "primal_infeasible"
                iterations = k
                certificate = cert
                break
        dx = sc.D * (x - x_prev)
        cert = _dual_infeasibility(dx, P0, q0, A0, l0, u0, cfg.eps_dinf)
        if cert is not None:
            status = "dual_infeasible"
            iterations = k
            certificate = cert
            break

    x_out = sc.D * x
    y_out = sc.E * y / sc.c if m else np.zeros(0)
    polished = False
    if cfg.polish and status == "solved":
        z_out = e_inv * z if m else np.zeros(0)
        pol = _polish(P0, q0, A0, l0, u0, z_out, y_out, r_prim, r_dual, cfg)
        if pol is not None:
            x_out, y_out, r_prim, r_dual = pol
            polished = True
    return QpSolution(
        primal=x_out,
        dual=y_out,
        status=status,
        iterations=iterations,
        primal_residual=r_prim,
        dual_residual=r_dual,
        objective=problem.objective(x_out) if status in ("solved", "max_iterations")
        else np.nan,
        solve_time=time.perf_counter() - t_start,
        certificate=certificate,
        polished=polished,
    )


def _primal_infeasibility(
    dy: np.ndarray,
    A0: scipy.sparse.csc_matrix,
    l0: np.ndarray,
    u0: np.ndarray,
    eps: float,
) -> np.ndarray | None:
    """Certificate dy with A' dy = 0 and u'(dy)+ + l'(dy)- < 0."""
    norm = _norm_inf(dy)
    if norm <= eps:
        return None
    tol = eps * norm
    if _norm_inf(A0.T @ dy) > tol:
        return None
    pos = np.maximum(dy, 0.0)
    neg = np.minimum(dy, 0.0)
    # rows with an absent bound contribute +infinity unless inactive
    if np.any(pos[u0 >= INFINITY] > tol) or np.any(-neg[l0 <= -INFINITY] > tol):
        return None
    support = float(
        u0[u0 < INFINITY] @ pos[u0 < INFINITY]
        + l0[l0 > -INFINITY] @ neg[l0 > -INFINITY]
    )
    if support < -tol:
        return dy / norm
    return None


def _dual_infeasibility(
    dx: np.ndarray,
    P0: np.ndarray,
    q0: np.ndarray,
    A0: scipy.sparse.csc_matrix,
    l0: np.ndarray,
    u0: np.ndarray,
    eps: float,
) -> np.ndarray | None:
    """Certificate dx: unbounded descent ray of the objective."""
    norm = _norm_inf(dx)
    if norm <= eps:
        return None
    tol = eps * norm
    if float(q0 @ dx) >= -tol:
        return None
    if _norm_inf(P0 @ dx) > tol:
        return None
    adx = A0 @ dx
    if np.any(adx[u0 < INFINITY] > tol) or np.any(adx[l0 > -INFINITY] < -tol):
        return None
    return dx / norm


class KktResiduals(NamedTuple):
    """Feasibility, stationarity, and complementarity violations."""

    r_prim: float
    r_dual: float
    comp_slack: float


def kkt_residuals(problem: QpProblem, primal: np.ndarray, dual: np.ndarray) -> KktResiduals:
    """Optimality residuals of a candidate primal/dual pair.

    r_prim is the worst bound violation of A x, r_dual the stationarity
    violation of Q x + q + A' y, comp_slack the largest product of a
    multiplier and the slack of the bound it pushes against (a multiplier
    pressing an absent bound counts as an outright violation).
    """
    x, y = primal, dual
    P = problem.dense_cost()
    A = problem.A.to_scipy()
    ax = A @ x if problem.m else np.zeros(0)
    l = np.maximum(problem.l, -INFINITY)
    u = np.minimum(problem.u, INFINITY)
    prim = max(
        float(np.max(np.maximum(ax - u, 0.0), initial=0.0)),
        float(np.max(np.maximum(l - ax, 0.0), initial=0.0)),
    )
    stat = _norm_inf(P @ x + problem.q + (A.T @ y if problem.m else 0.0))
    comp = 0.0
    if problem.m:
        y_pos = np.maximum(y, 0.0)
        y_neg = np.maximum(-y, 0.0)
        slack_u = np.where(u < INFINITY, np.maximum(u - ax, 0.0), np.inf)
        slack_l = np.where(l > -INFINITY, np.maximum(ax - l, 0.0), np.inf)
        up = np.zeros(problem.m)
        low = np.zeros(problem.m)
        pushing_u = y_pos > 0.0
        pushing_l = y_neg > 0.0
        up[pushing_u] = y_pos[pushing_u] * slack_u[pushing_u]
        low[pushing_l] = y_neg[pushing_l] * slack_l[pushing_l]
        comp = float(np.max(np.maximum(up, low), initial=0.0))
    return KktResiduals(r_prim=prim, r_dual=stat, comp_slack=comp)


def format_problem(problem: QpProblem) -> str:
    """Serialize the QP in a line-oriented plain-text form (loadable back)."""
    A = problem.A
    Q = problem.Q
    # repr of a builtin float round-trips exactly; numpy scalars do not
    lines = ["qp 1", f"dims {problem.n} {problem.m}", f"offset {float(problem.offset)!r}"]
    lines.append(f"Q {Q.nnz}")
    for j in range(Q.shape[1]):
        for p in range(Q.indptr[j], Q.indptr[j + 1]):
            lines.append(f"{Q.indices[p]} {j} {float(Q.data[p])!r}")
    lines.append("q")
    lines.extend(f"{float(v)!r}" for v in problem.q)
    lines.append(f"A {A.nnz}")
    for j in range(A.shape[1]):
        for p in range(A.indptr[j], A.indptr[j + 1]):
            lines.append(f"{A.indices[p]} {j} {float(A.data[p])!r}")
    lines.append("l")
    lines.extend(f"{float(v)!r}" for v in problem.l)
    lines.append("u")
    lines.extend(f"{float(v)!r}" for v in problem.u)
    return "\n".join(lines) + "\n"


def dump_problem(problem: QpProblem, path) -> None:
    """Write :func:`format_problem` output to ``path``."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_problem(problem))


def load_problem(path) -> QpProblem:
    """Read a QP written by :func:`dump_problem`."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0].split() != ["qp", "1"]:
        raise ValueError("not a qp dump file")
    pos = 1
    tag, n_s, m_s = lines[pos].split()
    if tag != "dims":
        raise ValueError("missing dims line")
    n, m = int(n_s), int(m_s)
    pos += 1
    offset = float(lines[pos].split()[1])
    pos += 1

    def read_matrix(tag: str, rows: int, cols: int) -> SparseMatrix:
        nonlocal pos
        head = lines[pos].split()
        if head[0] != tag:
            raise ValueError(f"expected section {tag}")
        nnz = int(head[1])
        pos += 1
        triples = []
        for _ in range(nnz):
            i_s, j_s, v_s = lines[pos].split()
            triples.append((int(i_s), int(j_s), float(v_s)))
            pos += 1
        if triples:
            i, j, v = zip(*triples)
        else:
            i, j, v = (), (), ()
        coo = scipy.sparse.coo_matrix((v, (i, j)), shape=(rows, cols))
        return SparseMatrix.from_scipy(coo)

    def read_vector(tag: str, size: int) -> np.ndarray:
        nonlocal pos
        if lines[pos] != tag:
            raise ValueError(f"expected section {tag}")
        pos += 1
        vals = [float(lines[pos + i]) for i in range(size)]
        pos += size
        return np.array(vals)

    Q = read_matrix("Q", n, n)
    q = read_vector("q", n)
    A = read_matrix("A", m, n)
    l = read_vector("l", m)
    u = read_vector("u", m)
    return QpProblem(Q=Q, q=q, A=A, l=l, u=u, offset=offset)
