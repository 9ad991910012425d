"""Dense two-phase primal simplex for small and medium LPs.

Solves

    min  c.x   s.t.  A_ub x <= b_ub,  A_eq x == b_eq,  lb <= x <= ub

with finite bounds required on every variable (the SCOPF always has them
through the base-case generator limits). The tableau is dense numpy;
pivoting uses Dantzig's rule with a Bland fallback once the objective
stalls, which rules out cycling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverFailureError

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-10
STALL_LIMIT = 80          # non-improving pivots before switching to Bland


@dataclass
class LpResult:
    status: str                    # 'optimal' | 'infeasible' | 'unbounded'
    x: np.ndarray | None
    objective: float | None


def _pivot(tableau: np.ndarray, basis: np.ndarray, row: int, col: int):
    tableau[row] /= tableau[row, col]
    factors = tableau[:, col].copy()
    factors[row] = 0.0
    tableau -= np.outer(factors, tableau[row])
    basis[row] = col


def _run_simplex(tableau, basis, cost_row, n_total, max_iter):
    """Minimize cost_row over the tableau in place. Returns status."""
    stall = 0
    best = np.inf
    for _ in range(max_iter):
        reduced = cost_row[:n_total]
        if stall < STALL_LIMIT:
            col = int(np.argmin(reduced))
            if reduced[col] >= -FEAS_TOL:
                return "optimal"
        else:  # Bland: smallest eligible index
            eligible = np.flatnonzero(reduced < -FEAS_TOL)
            if eligible.size == 0:
                return "optimal"
            col = int(eligible[0])
        column = tableau[:, col]
        rhs = tableau[:, -1]
        positive = column > PIVOT_TOL
        if not positive.any():
            return "unbounded"
        ratios = np.full(column.shape, np.inf)
        ratios[positive] = rhs[positive] / column[positive]
        row = int(np.argmin(ratios))
        if stall >= STALL_LIMIT:
            # Bland tie-break on smallest basis index
            min_ratio = ratios[row]
            ties = np.flatnonzero(ratios <= min_ratio + 1e-12)
            row = int(ties[np.argmin(basis[ties])])
        _pivot(tableau, basis, row, col)
        cost_row -= cost_row[col] * tableau[row]
        value = cost_row[-1]
        if value < best - 1e-12:
            best = value
            stall = 0
        else:
            stall += 1
    raise SolverFailureError("simplex iteration limit exceeded")


def solve_lp(c, a_ub=None, b_ub=None, a_eq=None, b_eq=None,
             lb=None, ub=None, max_iter=200_000) -> LpResult:
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    lb = np.zeros(n) if lb is None else np.asarray(lb, dtype=float)
    ub = np.full(n, np.inf) if ub is None else np.asarray(ub, dtype=float)
    if not (np.isfinite(lb).all() and np.isfinite(ub).all()):
        raise SolverFailureError("solve_lp requires finite variable bounds")
    if (lb > ub + FEAS_TOL).any():
        return LpResult("infeasible", None, None)

    rows = []
    rhs = []
    if a_ub is not None and len(a_ub):
        a_ub = np.asarray(a_ub, dtype=float)
        b_ub = np.asarray(b_ub, dtype=float)
        rows.append(a_ub)
        rhs.append(b_ub - a_ub @ lb)       # shift x = lb + y, y >= 0
    # upper bounds as rows on y
    bound_rows = np.eye(n)
    rows.append(bound_rows)
    rhs.append(ub - lb)
    a_all = np.vstack(rows)
    b_all = np.concatenate(rhs)
    p = a_all.shape[0]

    if a_eq is not None and len(a_eq):
        a_eq = np.asarray(a_eq, dtype=float)
        b_eq = np.asarray(b_eq, dtype=float)
        e_all = a_eq
        f_all = b_eq - a_eq @ lb
    else:
        e_all = np.zeros((0, n))
        f_all = np.zeros(0)
    q = e_all.shape[0]

    m = p + q
    # columns: y (n) | slacks (p) | artificials (<= m) | rhs
    slack = np.zeros((m, p))
    slack[:p, :] = np.eye(p)
    body = np.vstack([a_all, e_all])
    b_col = np.concatenate([b_all, f_all])
    neg = b_col < 0
    body[neg] *= -1.0
    slack[neg] *= -1.0
    b_col = np.abs(b_col)

    basis = np.full(m, -1, dtype=int)
    needs_artificial = []
    for i in range(m):
        if i < p and slack[i, i] > 0:      # usable identity slack
            basis[i] = n + i
        else:
            needs_artificial.append(i)
    n_art = len(needs_artificial)
    art = np.zeros((m, n_art))
    for j, i in enumerate(needs_artificial):
        art[i, j] = 1.0
        basis[i] = n + p + j

    tableau = np.hstack([body, slack, art, b_col[:, None]])
    n_total = n + p + n_art

    # phase 1: drive artificials out
    if n_art:
        phase1 = np.zeros(n_total + 1)
        phase1[n + p:n + p + n_art] = 1.0
        # price out the artificial basis
        for i in needs_artificial:
            phase1 -= tableau[i]
        status = _run_simplex(tableau, basis, phase1, n_total, max_iter)
        if status != "optimal" or -phase1[-1] > 1e-7 * max(1.0, np.abs(b_col).max()):
            return LpResult("infeasible", None, None)
        # pivot remaining artificials out of the basis where possible
        for i in range(m):
            if basis[i] >= n + p:
                cols = np.flatnonzero(
                    np.abs(tableau[i, :n + p]) > 1e-7)
                if cols.size:
                    _pivot(tableau, basis, i, int(cols[0]))
        # degenerate rows still holding an artificial are redundant; the
        # artificial stays basic at zero and its column is frozen below
        tableau[:, n + p:n + p + n_art] = 0.0
        for i in range(m):
            if basis[i] >= n + p:
                tableau[i, basis[i]] = 1.0

    # phase 2
    cost_row = np.zeros(n_total + 1)
    cost_row[:n] = c
    for i in range(m):                      # price out the current basis
        if cost_row[basis[i]] != 0.0:
            cost_row -= cost_row[basis[i]] * tableau[i]
    status = _run_simplex(tableau, basis, cost_row, n + p, max_iter)
    if status == "unbounded":
        return LpResult("unbounded", None, None)

    y = np.zeros(n_total)
    for i in range(m):
        y[basis[i]] = tableau[i, -1]
    x = lb + y[:n]
    return LpResult("optimal", x, float(c @ x))
