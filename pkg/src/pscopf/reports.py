"""Deterministic report serialization (JSON and CSV).

All emitters are pure functions of their inputs; identical inputs produce
byte-identical output (sorted keys, repr-based float formatting, no
timestamps).
"""

from __future__ import annotations

import io
import csv
import json

from .scopf import ScopfProblem, ScopfSolution
from .validation import ComparisonRow, ViolationReport


def _num(x):
    return None if x is None else float(x)


def solution_report(problem: ScopfProblem, solution: ScopfSolution) -> dict:
    report = {
        "status": solution.status,
        "assumption": problem.assumption.name,
        "eps": problem.eps,
        "objective": _num(solution.objective),
        "dispatch": None,
        "binding_constraints": [],
        "flagged_infeasible_margins": [
            problem.record_id(r) for r in problem.records
            if r.flagged_infeasible],
        "excluded_contingencies": [
            {"kind": kind, "index": idx, "reason": reason}
            for kind, idx, reason in problem.contingencies.excluded],
    }
    if solution.status == "optimal":
        report["dispatch"] = {
            problem.case.buses[g.bus].id: float(solution.p_g[g.bus])
            for g in problem.case.generators}
        report["binding_constraints"] = [
            {"id": problem.record_id(r),
             "limit": r.nominal_limit,
             "margin_shift": r.margin.shift,
             "margin_spread": r.margin.spread,
             "quantile": r.margin.quantile,
             "effective_limit": r.effective_limit}
            for r in solution.binding]
    return report


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def comparison_csv(rows: list[ComparisonRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["assumption", "status", "objective", "normalized_cost",
                "f_inv", "eps_avg_active", "eps_max"])
    for r in rows:
        w.writerow([r.assumption, r.status, _num(r.objective),
                    _num(r.normalized_cost), r.quantile,
                    _num(r.eps_avg_active), _num(r.eps_max)])
    return buf.getvalue()


def margins_csv(eps_values, table: dict[str, list[float]]) -> str:
    """One row per eps, one column per assumption."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = list(table)
    w.writerow(["eps"] + names)
    for i, eps in enumerate(eps_values):
        w.writerow([eps] + [table[name][i] for name in names])
    return buf.getvalue()


def violations_csv(report: ViolationReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["constraint", "eps_hat", "active"])
    for item in report.per_constraint:
        w.writerow([item.record_id, item.eps_hat, int(item.active)])
    return buf.getvalue()


def violations_summary(report: ViolationReport) -> dict:
    return {
        "samples_used": report.samples_used,
        "eps_avg_active": report.eps_avg_active,
        "eps_max": report.eps_max,
        "n_constraints": len(report.per_constraint),
        "n_active": sum(1 for i in report.per_constraint if i.active),
    }
