"""Independent reference implementations used to pin expected values.

Every function here deliberately takes a different route from the package
under test (exhaustive enumeration, polygon clipping, finite differences)
so agreement between the two is meaningful evidence, not a tautology.
"""

from __future__ import annotations

import itertools

import numpy as np

#: feasibility / dual-sign slack used by the active-set enumeration
KKT_TOL = 1e-7


class EnumerationBudgetError(RuntimeError):
    """The instance demands more candidate active sets than the budget allows."""


def active_set_solve(
    Q: np.ndarray,
    q: np.ndarray,
    A: np.ndarray,
    l: np.ndarray,
    u: np.ndarray,
    tol: float = KKT_TOL,
    max_subsets: int = 200_000,
) -> tuple[np.ndarray, np.ndarray]:
    """Globally solve min 1/2 x'Qx + q'x  s.t.  l <= Ax <= u by enumeration.

    ``Q`` must be symmetric positive definite, so the optimum is the unique
    point satisfying the KKT conditions. Candidate active sets are tried in
    order of increasing size; for every row subset all 2^k lower/upper side
    assignments are solved in one batched KKT system (they share the matrix
    and differ only in the right-hand side). Equality rows, ``l == u``, are
    always active with a free-sign multiplier. Dual convention matches the
    package: Q x + q + A' y = 0 with y >= 0 on active upper bounds and
    y <= 0 on active lower bounds.
    """
    Q = np.asarray(Q, dtype=float)
    q = np.asarray(q, dtype=float)
    l = np.asarray(l, dtype=float)
    u = np.asarray(u, dtype=float)
    A = np.asarray(A, dtype=float).reshape(len(l), -1)
    n = len(q)
    m = len(l)

    eq_rows = [i for i in range(m) if u[i] - l[i] <= 1e-11]
    ineq_rows = [i for i in range(m) if u[i] - l[i] > 1e-11]
    n_eq = len(eq_rows)
    lo = l[:, None]
    hi = u[:, None]

    examined = 0
    max_size = max(0, min(n - n_eq, len(ineq_rows)))
    for size in range(0, max_size + 1):
        patterns = 1 << size
        bits = (np.arange(patterns)[None, :] >> np.arange(size)[:, None]) & 1
        for subset in itertools.combinations(ineq_rows, size):
            examined += 1
            if examined > max_subsets:
                raise EnumerationBudgetError(
                    f"exceeded {max_subsets} candidate active sets"
                )
            rows = eq_rows + list(subset)
            k = len(rows)
            kkt = np.zeros((n + k, n + k))
            kkt[:n, :n] = Q
            kkt[:n, n:] = A[rows].T
            kkt[n:, :n] = A[rows]
            rhs = np.zeros((n + k, patterns))
            rhs[:n] = -q[:, None]
            rhs[n : n + n_eq] = l[eq_rows, None]
            if size:
                sub = np.array(subset)
                rhs[n + n_eq :] = np.where(bits == 1, u[sub, None], l[sub, None])
            try:
                sol = np.linalg.solve(kkt, rhs)
            except np.linalg.LinAlgError:
                continue
            X = sol[:n]
            ok = np.all(np.isfinite(sol), axis=0)
            ax = A @ X
            ok &= np.all((ax >= lo - tol) & (ax <= hi + tol), axis=0)
            if size:
                Ysub = sol[n + n_eq :]
                ok &= np.all(
                    np.where(bits == 1, Ysub >= -tol, Ysub <= tol), axis=0
                )
            hits = np.flatnonzero(ok)
            if len(hits):
                j = int(hits[0])
                y = np.zeros(m)
                y[rows] = sol[n:, j]
                return X[:, j], y
    raise ValueError("active-set enumeration found no KKT point (infeasible?)")


def clip_polygon(A: np.ndarray, d: np.ndarray, bound: float = 50.0) -> np.ndarray:
    """Vertices of the bounded 2D region {p : A p <= d} by polygon clipping.

    Starts from a large axis-aligned square and clips it against every
    halfspace with the Sutherland-Hodgman algorithm. The result covers the
    true intersection as long as it fits inside the starting square.
    """
    poly = [
        np.array([-bound, -bound]),
        np.array([bound, -bound]),
        np.array([bound, bound]),
        np.array([-bound, bound]),
    ]
    for a, dd in zip(np.asarray(A, dtype=float), np.asarray(d, dtype=float)):
        if not poly:
            break
        clipped: list[np.ndarray] = []
        for i, p in enumerate(poly):
            p_prev = poly[i - 1]
            inside = a @ p <= dd
            inside_prev = a @ p_prev <= dd
            if inside_prev != inside:
                denom = a @ (p - p_prev)
                t = (dd - a @ p_prev) / denom
                clipped.append(p_prev + t * (p - p_prev))
            if inside:
                clipped.append(p)
        poly = clipped
    return np.array(poly).reshape(-1, 2)


def dedupe_points(points: np.ndarray, tol: float = 1e-7) -> np.ndarray:
    """Drop points that repeat within ``tol`` (keeps first occurrences)."""
    kept: list[np.ndarray] = []
    for p in np.asarray(points, dtype=float):
        if all(np.linalg.norm(p - k) > tol for k in kept):
            kept.append(p)
    return np.array(kept).reshape(-1, points.shape[-1] if points.size else 2)


def set_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two finite point sets."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) == 0 or len(b) == 0:
        return np.inf if len(a) != len(b) else 0.0
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def polytope_vertices(A: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Vertices of {q : A q <= b} in 3D by exhaustive triple-plane intersection."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    verts: list[np.ndarray] = []
    for rows in itertools.combinations(range(len(b)), 3):
        M = A[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        p = np.linalg.solve(M, b[list(rows)])
        if np.all(A @ p <= b + tol * np.maximum(1.0, np.abs(b))):
            verts.append(p)
    return dedupe_points(np.array(verts).reshape(-1, 3))


def central_gradient(fun, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central finite-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    g = np.empty(len(x))
    for i in range(len(x)):
        step = np.zeros(len(x))
        step[i] = h
        g[i] = (fun(x + step) - fun(x - step)) / (2.0 * h)
    return g
