"""Small dense linear programming and a planar modulus-maximization sweep.

solve_lp maximizes objective @ x subject to dense rows that are either
inequalities (<=) or equalities, with per-variable lower bound 0 or -inf.
The kernel is a two-phase dense tableau simplex (Dantzig pricing, switching
to Bland's rule after a run of degenerate pivots).  Programs with many rows
and few variables (the cutting-plane and fine-grid solvers) are dualized
internally so the basis stays small; the optimal primal point is recovered
from the dual prices.

max_modulus maximizes |ell(x)| for a complex linear functional ell over the
feasible set by sweeping the direction angle: a 64-point grid on one symmetry
period followed by golden-section refinement of the best arc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

PIVOT_TOL = 1e-10
BLAND_AFTER = 40  # consecutive degenerate pivots before switching rule


class LpError(RuntimeError):
    """Internal solver failure (iteration limit, basis breakdown)."""


@dataclass
class LinearProgram:
    objective: np.ndarray          # maximized
    constraint_matrix: np.ndarray  # (m, n)
    rhs: np.ndarray                # (m,)
    row_kinds: tuple[str, ...]     # "le" | "eq"
    var_lower: np.ndarray          # (n,) each 0.0 or -inf

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        self.constraint_matrix = np.asarray(self.constraint_matrix, dtype=float)
        self.rhs = np.asarray(self.rhs, dtype=float)
        self.var_lower = np.asarray(self.var_lower, dtype=float)
        m, n = self.constraint_matrix.shape
        if self.objective.shape != (n,) or self.rhs.shape != (m,):
            raise ValueError("inconsistent LP dimensions")
        if len(self.row_kinds) != m:
            raise ValueError("row_kinds length mismatch")
        if any(k not in ("le", "eq") for k in self.row_kinds):
            raise ValueError("row kinds must be 'le' or 'eq'")
        if not (np.all(np.isfinite(self.objective))
                and np.all(np.isfinite(self.constraint_matrix))
                and np.all(np.isfinite(self.rhs))):
            raise ValueError("LP data must be finite")
        ok = (self.var_lower == 0.0) | np.isneginf(self.var_lower)
        if not np.all(ok):
            raise ValueError("variable lower bounds must be 0 or -inf")


def nonneg_lower(n: int) -> np.ndarray:
    return np.zeros(n)


def free_lower(n: int) -> np.ndarray:
    return np.full(n, -np.inf)


@dataclass
class LpSolution:
    status: str                 # optimal | infeasible | unbounded
    value: float
    point: np.ndarray | None
    primal_residual: float
    dual_residual: float
    iterations: int


# ---------------------------------------------------------------------------
# tableau kernel: min c @ x  s.t.  A x = b, x >= 0


def _kernel(c, A, b, basis_hint=None, maxit=None):
    """Two-phase tableau simplex on equality-standard form.

    Returns (status, x, pi, iterations, dual_residual); pi are prices for the
    rows as given (sign-corrected for internal flips, zero for rows found
    redundant in phase 1).
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    c = np.array(c, dtype=float)
    m_orig, n = A.shape
    if m_orig == 0:
        if np.any(c < -PIVOT_TOL):
            return "unbounded", None, np.zeros(0), 0, 0.0
        return "optimal", np.zeros(n), np.zeros(0), 0, 0.0

    b_scale = 1.0 + float(np.max(np.abs(b), initial=0.0))
    # Bound-shift anti-degeneracy: solve with x >= -w for a tiny fixed w > 0,
    # i.e. substitute u = x + w >= 0 and rhs b + A w.  This stays consistent
    # for dependent equality rows (unlike raw rhs perturbation); the final
    # refactorization against the pristine b removes the shift again.
    shift = (1e-10 * b_scale) * (1.0 + ((np.arange(n) * 2654435761) % 97) / 97.0)
    b0 = b.copy()
    b = b + A @ shift
    signs = np.where(b < 0, -1.0, 1.0)
    A *= signs[:, None]
    b *= signs
    b0 *= signs
    A0 = A.copy()
    row_ids = np.arange(m_orig)
    m = m_orig

    basis = np.full(m, -1, dtype=int)
    if basis_hint is not None:
        for i, j in enumerate(basis_hint):
            if j >= 0 and signs[i] > 0:
                basis[i] = j
    art_rows = np.flatnonzero(basis < 0)
    n_art = art_rows.size
    T = np.hstack([A, np.zeros((m, n_art)), b[:, None]])
    for a, i in enumerate(art_rows):
        T[i, n + a] = 1.0
        basis[i] = n + a
    n_tot = n + n_art
    allowed = np.ones(n_tot, dtype=bool)

    if maxit is None:
        maxit = 50 * (m + n_tot) + 5000
    iters = 0

    def pivot(i, j):
        T[i, :] /= T[i, j]
        delta = np.outer(T[:, j], T[i, :])
        delta[i, :] = 0.0
        T[:, :] -= delta
        T[:, j] = 0.0
        T[i, j] = 1.0
        basis[i] = j

    def leaving_row(j, rows):
        """Lexicographic tie-break: argmin of T[i, :] / T[i, j] among ties."""
        for col in range(n_tot):
            if rows.size == 1:
                break
            v = T[rows, col] / T[rows, j]
            rows = rows[v <= np.min(v) + 1e-12]
        return int(rows[0])

    def run_phase(cost, stop_at=None):
        nonlocal iters
        refreshes = 0
        z = cost - cost[basis] @ T[:, :n_tot]
        degenerate = 0
        bland = False
        since_refresh = 0
        while True:
            if iters > maxit:
                raise LpError("simplex iteration limit exceeded")
            if stop_at is not None and float(cost[basis] @ T[:, n_tot]) <= stop_at:
                return "optimal", z
            if since_refresh >= 256:  # kill incremental z-row drift
                z = cost - cost[basis] @ T[:, :n_tot]
                since_refresh = 0
            cand = np.where(allowed, z, np.inf)
            if bland:
                neg = np.flatnonzero(cand < -PIVOT_TOL)
                j = int(neg[0]) if neg.size else -1
            else:
                j = int(np.argmin(cand))
                if cand[j] >= -PIVOT_TOL:
                    j = -1
            if j < 0:
                if refreshes < 3:  # re-derive before declaring optimality
                    refreshes += 1
                    z = cost - cost[basis] @ T[:, :n_tot]
                    cand = np.where(allowed, z, np.inf)
                    if np.min(cand) < -10 * PIVOT_TOL:
                        continue
                return "optimal", z
            col = T[:, j]
            pos = col > PIVOT_TOL
            if not np.any(pos):
                return "unbounded", z
            ratios = np.where(pos, T[:, n_tot] / np.where(pos, col, 1.0), np.inf)
            r = float(np.min(ratios))
            rows = np.flatnonzero(ratios <= r + 1e-12 * (1.0 + abs(r)))
            if bland and rows.size > 1:
                i = int(rows[np.argmin(basis[rows])])
            else:
                i = leaving_row(j, rows)
            zj = z[j]
            pivot(i, j)
            z = z - zj * T[i, :n_tot]
            iters += 1
            since_refresh += 1
            if r <= 1e-12 * b_scale:
                degenerate += 1
                if degenerate >= BLAND_AFTER:
                    bland = True
            else:
                degenerate = 0

    # phase 1: only optimality of the artificial sum matters, so stop as soon
    # as it reaches the feasibility threshold
    feas_tol = 1e-10 * b_scale
    if n_art > 0:
        cost1 = np.zeros(n_tot)
        cost1[n:] = 1.0
        status, _ = run_phase(cost1, stop_at=feas_tol)
        infeas = float(T[basis >= n, n_tot].sum())
        if status != "optimal" or infeas > 1e-9 * b_scale:
            return "infeasible", None, None, iters, 0.0
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] >= n:
                cands = np.flatnonzero(np.abs(T[i, :n]) > PIVOT_TOL)
                if cands.size:
                    pivot(i, int(cands[0]))
                else:
                    keep[i] = False  # redundant row
        if not np.all(keep):
            T = T[keep]
            basis = basis[keep]
            A0 = A0[keep]
            b0 = b0[keep]
            signs = signs[keep]
            row_ids = row_ids[keep]
            m = T.shape[0]
        allowed[n:] = False

    # phase 2
    cost2 = np.concatenate([c, np.zeros(n_tot - n)])
    status, _ = run_phase(cost2)
    if status == "unbounded":
        return "unbounded", None, None, iters, 0.0

    # refactorize against the pristine data: removes accumulated pivot drift
    # and the anti-degeneracy shift
    B = A0[:, basis]
    try:
        xb = np.linalg.solve(B, b0)
        pi = np.linalg.solve(B.T, c[basis])
    except np.linalg.LinAlgError:
        xb = np.linalg.lstsq(B, b0, rcond=None)[0]
        pi = np.linalg.lstsq(B.T, c[basis], rcond=None)[0]
    if float(np.min(xb, initial=0.0)) < -1e-7 * b_scale:
        raise LpError("refactorized basis is infeasible; numerically "
                      "defective program")
    x = np.zeros(n_tot)
    x[basis] = np.maximum(xb, 0.0)
    x = x[:n]
    reduced = c - A0.T @ pi
    dual_res = max(0.0, float(-np.min(reduced, initial=0.0)))
    pi_full = np.zeros(m_orig)
    pi_full[row_ids] = pi * signs
    return "optimal", x, pi_full, iters, dual_res


# ---------------------------------------------------------------------------
# public solver


def _primal_path(lp: LinearProgram):
    A, b, c = lp.constraint_matrix, lp.rhs, lp.objective
    m, n = A.shape
    free = np.isneginf(lp.var_lower)
    nf = int(free.sum())
    A_ext = np.hstack([A, -A[:, free]]) if nf else A
    c_ext = np.concatenate([c, -c[free]]) if nf else c
    le = np.array([k == "le" for k in lp.row_kinds])
    n_slack = int(le.sum())
    S = np.zeros((m, n_slack))
    hint = np.full(m, -1, dtype=int)
    for s, i in enumerate(np.flatnonzero(le)):
        S[i, s] = 1.0
        hint[i] = A_ext.shape[1] + s
    A_full = np.hstack([A_ext, S])
    c_full = np.concatenate([-c_ext, np.zeros(n_slack)])  # kernel minimizes
    status, x_full, _pi, iters, dual_res = _kernel(c_full, A_full, b, basis_hint=hint)
    if status != "optimal":
        return LpSolution(status, math.nan, None, math.nan, math.nan, iters)
    x = x_full[:n].copy()
    if nf:
        x[free] -= x_full[n:n + nf]
    return _finish(lp, x, dual_res, iters)


def _dual_path(lp: LinearProgram):
    """Pure-<= programs with many rows: solve the dual, read x off the prices."""
    A, b, c = lp.constraint_matrix, lp.rhs, lp.objective
    n = A.shape[1]
    pos = lp.var_lower == 0.0
    npos = int(pos.sum())
    S = np.zeros((n, npos))
    for s, j in enumerate(np.flatnonzero(pos)):
        S[j, s] = -1.0
    A_dual = np.hstack([A.T, S])    # rows indexed by primal variables
    c_dual = np.concatenate([b, np.zeros(npos)])
    status, _y, pi, iters, dual_res = _kernel(c_dual, A_dual, c)
    if status == "optimal":
        sol = _finish(lp, pi, dual_res, iters)
        scale = 1.0 + float(np.max(np.abs(b), initial=0.0))
        if sol.primal_residual <= 1e-7 * scale:
            return sol
        return None  # numerically suspect recovery: re-solve on the primal
    if status == "unbounded":
        return LpSolution("infeasible", math.nan, None, math.nan, math.nan, iters)
    return None  # dual infeasible: classify on the primal


def _finish(lp: LinearProgram, x: np.ndarray, dual_res: float, iters: int):
    Ax = lp.constraint_matrix @ x
    viol = 0.0
    for i, kind in enumerate(lp.row_kinds):
        gap = float(Ax[i] - lp.rhs[i])
        viol = max(viol, gap if kind == "le" else abs(gap))
    pos = lp.var_lower == 0.0
    if np.any(pos):
        viol = max(viol, float(-np.min(x[pos], initial=0.0)))
    value = float(lp.objective @ x)
    return LpSolution("optimal", value, x, max(0.0, viol), dual_res, iters)


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Maximize lp.objective @ x over the constraint set.

    Infeasible and unbounded outcomes are reported in the status field.
    """
    m, n = lp.constraint_matrix.shape
    all_le = all(k == "le" for k in lp.row_kinds)
    n_eff = n + int(np.isneginf(lp.var_lower).sum())
    if all_le and m >= max(4 * n_eff, 16):
        sol = _dual_path(lp)
        if sol is not None:
            return sol
    return _primal_path(lp)


# ---------------------------------------------------------------------------
# modulus maximization


@dataclass
class MaxModulusResult:
    value: float
    point: np.ndarray
    theta: float
    upper_bound: float
    iterations: int


def max_modulus(lp: LinearProgram, ell_re: np.ndarray, ell_im: np.ndarray,
                symmetry_angle: float = 2 * math.pi, grid: int = 64,
                theta_tol: float = 1e-10) -> MaxModulusResult:
    """Maximize |ell_re @ x + i ell_im @ x| over the feasible set of lp.

    The objective field of lp is ignored.  If the attainable planar set is
    invariant under rotation by symmetry_angle, the sweep over one period is
    exhaustive.  The support function is assumed unimodal on the refined arc,
    which pins the upper bound to value / cos(final bracket width).
    """
    ell_re = np.asarray(ell_re, dtype=float)
    ell_im = np.asarray(ell_im, dtype=float)
    iterations = 0

    def h(theta: float):
        nonlocal iterations
        obj = math.cos(theta) * ell_re + math.sin(theta) * ell_im
        sol = solve_lp(replace(lp, objective=obj))
        if sol.status != "optimal":
            raise LpError(f"direction LP ended {sol.status}")
        iterations += sol.iterations
        return sol.value, sol.point

    best_v = -math.inf
    best_x = None
    best_t = 0.0
    step = symmetry_angle / grid
    for i in range(grid):
        t = i * step
        v, x = h(t)
        if v > best_v:
            best_v, best_x, best_t = v, x, t

    a, bnd = best_t - step, best_t + step
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    t1 = bnd - phi * (bnd - a)
    t2 = a + phi * (bnd - a)
    f1, x1 = h(t1)
    f2, x2 = h(t2)
    while bnd - a > theta_tol:
        if f1 < f2:
            a = t1
            t1, f1, x1 = t2, f2, x2
            t2 = a + phi * (bnd - a)
            f2, x2 = h(t2)
        else:
            bnd = t2
            t2, f2, x2 = t1, f1, x1
            t1 = bnd - phi * (bnd - a)
            f1, x1 = h(t1)
        for tv, fv, xv in ((t1, f1, x1), (t2, f2, x2)):
            if fv > best_v:
                best_v, best_x, best_t = fv, xv, tv

    width = max(bnd - a, theta_tol)
    upper = best_v / math.cos(min(width, math.pi / 4))
    return MaxModulusResult(best_v, best_x, best_t % symmetry_angle,
                            upper, iterations)
