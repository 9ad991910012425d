"""Assembly and solution of the margin-tightened security-constrained OPF.

Every chance constraint becomes a linear row: the nominal generation or
line-flow expression backed off from its limit by a precomputed uncertainty
margin. The resulting LP is solved with the in-repo simplex behind a row
generation loop: start from the balance equation and base-case generator
bounds, then repeatedly add the constraint rows the current dispatch
violates until none remain. Rows are never removed, so the loop terminates.

Generator constraints for line-outage contingencies duplicate the base-case
rows (same participation vector, no outage mismatch) and are deduplicated
during assembly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .caseio import ForecastModel, NetworkCase
from .errors import DimensionError, SolverFailureError
from .margins import DistributionAssumption, UncertaintyMargin, f_inv
from .network import ContingencySet
from .simplex import solve_lp

GEN_UPPER = "gen-upper"
GEN_LOWER = "gen-lower"
FLOW_UPPER = "flow-upper"
FLOW_LOWER = "flow-lower"

FEASIBILITY_TOL = 1e-6
BINDING_TOL = 1e-6

MAX_ROWGEN_ITERS = 400
MAX_ROWS_PER_ITER = 400


@dataclass(frozen=True)
class ConstraintRecord:
    kind: str                   # gen-upper | gen-lower | flow-upper | flow-lower
    contingency: int            # index into ContingencySet.contingencies
    element: int                # generator index or line index
    nominal_limit: float        # c, MW
    margin: UncertaintyMargin
    flagged_infeasible: bool = False

    @property
    def is_upper(self) -> bool:
        return self.kind in (GEN_UPPER, FLOW_UPPER)

    @property
    def effective_limit(self) -> float:
        """Margin-tightened limit the nominal expression is held to."""
        if self.is_upper:
            return self.nominal_limit - self.margin.total
        return self.nominal_limit - self.margin.lower_total


@dataclass
class ScopfProblem:
    case: NetworkCase
    contingencies: ContingencySet
    model: ForecastModel
    assumption: DistributionAssumption
    eps: float
    records: list[ConstraintRecord]
    cost: np.ndarray            # dense bus-indexed $/MWh
    balance_rhs: float          # sum(P_D - P_R), MW

    def record_id(self, rec: ConstraintRecord) -> str:
        cont = self.contingencies.contingencies[rec.contingency]
        if rec.kind.startswith("gen"):
            elem = f"gen@{self.case.buses[self.case.generators[rec.element].bus].id}"
        else:
            ln = self.case.lines[rec.element]
            elem = (f"line{rec.element}:"
                    f"{self.case.buses[ln.from_bus].id}-"
                    f"{self.case.buses[ln.to_bus].id}")
        return f"{rec.kind}|{cont.label(self.case)}|{elem}"

    def dispatch_row(self, rec: ConstraintRecord) -> tuple[np.ndarray, float]:
        """Coefficients on the dispatch vector and the constant term of the
        nominal constraint expression."""
        cont = self.contingencies.contingencies[rec.contingency]
        n = self.case.n
        out_bus = None
        if cont.kind == "gen":
            out_bus = self.case.generators[cont.index].bus
        if rec.kind.startswith("gen"):
            gb = self.case.generators[rec.element].bus
            row = np.zeros(n)
            row[gb] += 1.0
            if out_bus is not None:
                row[out_bus] += cont.d[gb]
            return row, 0.0
        a_l = cont.A[rec.element]
        row = a_l.copy()
        if out_bus is not None:
            # outaged unit's injection is removed and redistributed via d^i
            row[out_bus] += float(a_l @ cont.d) - a_l[out_bus]
        const = float(a_l @ (self.case.infeeds - self.case.loads))
        return row, const

    def uncertainty_row(self, rec: ConstraintRecord) -> np.ndarray:
        """Sensitivity b of the constraint expression to the forecast errors."""
        cont = self.contingencies.contingencies[rec.contingency]
        if rec.kind.startswith("gen"):
            gb = self.case.generators[rec.element].bus
            return -cont.d[gb] * np.ones(self.case.n)
        a_l = cont.A[rec.element]
        return a_l - float(a_l @ cont.d) * np.ones(self.case.n)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Nominal constraint expressions at dispatch x, aligned with records."""
        chunks = []
        inj_const = self.case.infeeds - self.case.loads
        gb = self.case.gen_bus_indices()
        for cont in self.contingencies.contingencies:
            inj = x + inj_const
            x_out = 0.0
            if cont.kind == "gen":
                out_bus = self.case.generators[cont.index].bus
                x_out = x[out_bus]
                inj = inj + cont.d * x_out
                inj[out_bus] -= x_out      # unit is off in the outage case
            if cont.kind != "line":
                gen_vals = x[gb] + cont.d[gb] * x_out
                chunks.append(np.repeat(gen_vals, 2))
            chunks.append(np.repeat(cont.A @ inj, 2))
        return np.concatenate(chunks) if chunks else np.zeros(0)

    def effective_limits(self) -> tuple[np.ndarray, np.ndarray]:
        """(limits, upper_mask) aligned with records."""
        eff = np.array([r.effective_limit for r in self.records])
        upper = np.array([r.is_upper for r in self.records])
        return eff, upper

    def violations(self, values: np.ndarray) -> np.ndarray:
        """Positive entries are constraint violations in MW."""
        eff, upper = self.effective_limits()
        return np.where(upper, values - eff, eff - values)


@dataclass
class ScopfSolution:
    p_g: np.ndarray | None       # dense bus-indexed dispatch, MW
    objective: float | None      # $/h
    status: str                  # optimal | infeasible | unbounded
    binding: list[ConstraintRecord] = field(default_factory=list)
    margins_applied: list[ConstraintRecord] = field(default_factory=list)


def assemble(case: NetworkCase, contingencies: ContingencySet,
             model: ForecastModel, assumption: DistributionAssumption,
             eps: float) -> ScopfProblem:
    """Build all margin-tightened constraint records and the LP skeleton."""
    if model.n != case.n:
        raise DimensionError(
            f"forecast model has n={model.n}, case has n={case.n}")
    q = f_inv(assumption, eps)
    one_mu = float(model.mu.sum())
    one_spread = float(np.linalg.norm(np.ones(case.n) @ model.sigma_sqrt))
    cost, p_min, p_max = case.dense_gen_vectors()
    gen_bus = case.gen_bus_indices()

    records: list[ConstraintRecord] = []
    for ci, cont in enumerate(contingencies.contingencies):
        if cont.kind != "line":
            # line-outage generator rows duplicate the base case: skip them
            for gi, g in enumerate(case.generators):
                dg = cont.d[g.bus]
                m = UncertaintyMargin(-dg * one_mu, dg * one_spread, q)
                bad = (g.p_max - m.total) < (g.p_min - m.lower_total) - 1e-9
                records.append(ConstraintRecord(
                    GEN_UPPER, ci, gi, g.p_max, m, flagged_infeasible=bad))
                records.append(ConstraintRecord(
                    GEN_LOWER, ci, gi, g.p_min, m, flagged_infeasible=bad))
        v = cont.A @ cont.d
        m_flow = cont.A - np.outer(v, np.ones(case.n))
        shifts = m_flow @ model.mu
        spreads = np.linalg.norm(m_flow @ model.sigma_sqrt, axis=1)
        for l, ln in enumerate(case.lines):
            m = UncertaintyMargin(float(shifts[l]), float(spreads[l]), q)
            bad = (ln.flow_limit - m.total) < (-ln.flow_limit - m.lower_total) - 1e-9
            records.append(ConstraintRecord(
                FLOW_UPPER, ci, l, ln.flow_limit, m, flagged_infeasible=bad))
            records.append(ConstraintRecord(
                FLOW_LOWER, ci, l, -ln.flow_limit, m, flagged_infeasible=bad))

    balance_rhs = float((case.loads - case.infeeds).sum())
    return ScopfProblem(case, contingencies, model, assumption, eps,
                        records, cost, balance_rhs)


def _base_bounds(problem: ScopfProblem) -> tuple[np.ndarray, np.ndarray, set]:
    """Variable bounds from base-case generator records; returns the record
    indices enforced through bounds."""
    case = problem.case
    lb = np.zeros(case.n)
    ub = np.zeros(case.n)
    via_bounds = set()
    for k, rec in enumerate(problem.records):
        cont = problem.contingencies.contingencies[rec.contingency]
        if cont.kind != "base" or not rec.kind.startswith("gen"):
            continue
        gb = case.generators[rec.element].bus
        if rec.kind == GEN_UPPER:
            ub[gb] = rec.effective_limit
        else:
            lb[gb] = rec.effective_limit
        via_bounds.add(k)
    return lb, ub, via_bounds


def solve(problem: ScopfProblem) -> ScopfSolution:
    """Solve the assembled problem by row generation over the record pool."""
    case = problem.case
    n = case.n
    lb, ub, via_bounds = _base_bounds(problem)
    if (lb > ub + FEASIBILITY_TOL).any():
        return ScopfSolution(None, None, "infeasible",
                             margins_applied=problem.records)
    a_eq = np.ones((1, n))
    b_eq = np.array([problem.balance_rhs])

    rows: list[np.ndarray] = []
    rhs: list[float] = []
    added: set[int] = set(via_bounds)
    eff, upper = problem.effective_limits()
    scale = np.maximum(1.0, np.abs(
        np.array([r.nominal_limit for r in problem.records])))

    res = None
    for _ in range(MAX_ROWGEN_ITERS):
        a_ub = np.vstack(rows) if rows else None
        b_ub = np.array(rhs) if rows else None
        res = solve_lp(problem.cost, a_ub, b_ub, a_eq, b_eq, lb, ub)
        if res.status != "optimal":
            return ScopfSolution(None, None, res.status,
                                 margins_applied=problem.records)
        values = problem.evaluate(res.x)
        viol = np.where(upper, values - eff, eff - values)
        viol[list(added)] = -np.inf
        candidates = np.flatnonzero(viol > FEASIBILITY_TOL * scale)
        if candidates.size == 0:
            break
        worst = candidates[np.argsort(viol[candidates])[::-1]]
        for k in worst[:MAX_ROWS_PER_ITER]:
            rec = problem.records[k]
            row, const = problem.dispatch_row(rec)
            if rec.is_upper:
                rows.append(row)
                rhs.append(rec.effective_limit - const)
            else:
                rows.append(-row)
                rhs.append(const - rec.effective_limit)
            added.add(int(k))
    else:
        raise SolverFailureError("row generation did not converge")

    x = res.x
    values = problem.evaluate(x)
    slack = np.abs(values - eff)
    binding = [problem.records[k]
               for k in np.flatnonzero(slack <= BINDING_TOL * scale)]
    return ScopfSolution(x, float(problem.cost @ x), "optimal",
                         binding=binding, margins_applied=problem.records)


def solve_deterministic(case: NetworkCase,
                        contingencies: ContingencySet) -> ScopfSolution:
    """Classical DC SCOPF: zero forecast errors, zero margins."""
    problem = assemble(case, contingencies, ForecastModel.zero(case.n),
                       DistributionAssumption("deterministic"), 0.5)
    return solve(problem)


def export_lp_text(problem: ScopfProblem) -> str:
    """Full problem in CPLEX LP text format for external cross-checks."""
    out = ["Minimize", " obj: " + " + ".join(
        f"{problem.cost[g.bus]:.12g} p{g.bus}" for g in problem.case.generators)]
    out.append("Subject To")
    terms = " + ".join(f"p{g.bus}" for g in problem.case.generators)
    out.append(f" balance: {terms} = {problem.balance_rhs:.12g}")
    for k, rec in enumerate(problem.records):
        row, const = problem.dispatch_row(rec)
        nz = np.flatnonzero(np.abs(row) > 1e-12)
        if nz.size == 0:
            continue
        expr = " ".join(f"{'+' if row[j] >= 0 else '-'} {abs(row[j]):.12g} p{j}"
                        for j in nz)
        sense = "<=" if rec.is_upper else ">="
        out.append(f" r{k}: {expr} {sense} {rec.effective_limit - const:.12g}")
    out.append("Bounds")
    for g in problem.case.generators:
        out.append(f" -1e30 <= p{g.bus} <= 1e30")
    for i in range(problem.case.n):
        if i not in set(problem.case.gen_bus_indices()):
            out.append(f" p{i} = 0")
    out.append("End")
    return "\n".join(out) + "\n"
