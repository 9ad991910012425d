"""Sample replay: empirical violation probabilities, empirical margins and
cross-assumption comparison tables.

Replay evaluates the physical constraint expressions at a fixed dispatch for
every historical (or synthetic) forecast-error sample and counts limit
violations per constraint. A constraint counts as *active* when its nominal
slack is at most 1e-5 relative to the limit.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .caseio import ForecastModel
from .errors import DimensionError, DomainError, InsufficientDataError, PscopfError
from .margins import DistributionAssumption, f_inv, REPORT_ORDER
from .scopf import ScopfProblem, ScopfSolution, assemble, solve

ACTIVE_TOL = 1e-5


@dataclass
class ConstraintViolation:
    record_index: int
    record_id: str
    eps_hat: float
    active: bool


@dataclass
class ViolationReport:
    per_constraint: list[ConstraintViolation]
    eps_avg_active: float
    eps_max: float
    samples_used: int


def empirical_violations(solution: ScopfSolution, problem: ScopfProblem,
                         samples) -> ViolationReport:
    """Replay forecast-error samples through a fixed dispatch."""
    if solution.status != "optimal":
        raise PscopfError("replay needs an optimal solution, "
                          f"got status {solution.status!r}")
    samples = np.asarray(samples, dtype=float)
    case = problem.case
    if samples.ndim != 2 or samples.shape[1] != case.n:
        raise DimensionError(
            f"samples must be s x {case.n}, got {samples.shape}")
    s = samples.shape[0]
    x = solution.p_g
    inj_const = case.infeeds - case.loads
    row_sums = samples.sum(axis=1)
    gb = case.gen_bus_indices()

    nominal = problem.evaluate(x)
    eff, upper = problem.effective_limits()
    limits = np.array([r.nominal_limit for r in problem.records])
    counts = np.zeros(len(problem.records))

    pos = 0
    for cont in problem.contingencies.contingencies:
        inj = x + inj_const
        x_out = 0.0
        if cont.kind == "gen":
            out_bus = case.generators[cont.index].bus
            x_out = x[out_bus]
            inj = inj + cont.d * x_out
            inj[out_bus] -= x_out          # unit is off in the outage case
        if cont.kind != "line":
            # deviation of gen g under sample k: -d_g * sum(delta_k)
            dev = -np.outer(row_sums, cont.d[gb])          # s x n_gen
            vals = x[gb] + cont.d[gb] * x_out + dev
            for j in range(len(gb)):
                counts[pos] = np.count_nonzero(vals[:, j] > limits[pos])
                pos += 1
                counts[pos] = np.count_nonzero(vals[:, j] < limits[pos])
                pos += 1
        # flows: A (inj + delta - d * sum(delta))
        base_flow = cont.A @ inj
        dev = samples @ cont.A.T - np.outer(row_sums, cont.A @ cont.d)
        vals = base_flow[None, :] + dev                     # s x n_L
        for l in range(case.n_lines):
            counts[pos] = np.count_nonzero(vals[:, l] > limits[pos])
            pos += 1
            counts[pos] = np.count_nonzero(vals[:, l] < limits[pos])
            pos += 1

    eps_hat = counts / s
    scale = np.maximum(1.0, np.abs(limits))
    active = np.abs(nominal - eff) <= ACTIVE_TOL * scale
    per = [ConstraintViolation(k, problem.record_id(problem.records[k]),
                               float(eps_hat[k]), bool(active[k]))
           for k in range(len(problem.records))]
    avg = float(eps_hat[active].mean()) if active.any() else 0.0
    return ViolationReport(per, avg, float(eps_hat.max(initial=0.0)), s)


def empirical_margin(deviation_samples, eps: float) -> float:
    """(1-eps) empirical quantile: 1-based order statistic ceil((1-eps)*s)."""
    if not (0.0 < eps < 1.0):
        raise DomainError(f"eps must be in (0, 1), got {eps}")
    dev = np.sort(np.asarray(deviation_samples, dtype=float).reshape(-1))
    s = dev.shape[0]
    if s < 1.0 / eps:
        raise InsufficientDataError(
            f"need at least {math.ceil(1 / eps)} samples for eps={eps}, got {s}")
    return float(dev[math.ceil((1.0 - eps) * s) - 1])


@dataclass
class ComparisonRow:
    assumption: str
    status: str
    objective: float | None
    normalized_cost: float | None
    quantile: float
    eps_avg_active: float | None
    eps_max: float | None


def compare_assumptions(case, contingencies, model: ForecastModel, eps: float,
                        samples, dof: float | None = None) -> list[ComparisonRow]:
    """One row per distributional assumption, in order of decreasing assumed
    knowledge starting from the uncertainty-blind baseline."""
    rows = []
    base_cost = None
    for kind in REPORT_ORDER:
        assumption = DistributionAssumption(
            kind, dof if kind == "student_t" else None)
        used_model = ForecastModel.zero(case.n) if kind == "deterministic" else model
        problem = assemble(case, contingencies, used_model, assumption, eps)
        sol = solve(problem)
        quantile = f_inv(assumption, eps)
        if sol.status != "optimal":
            rows.append(ComparisonRow(assumption.name, sol.status, None, None,
                                      quantile, None, None))
            continue
        if base_cost is None:
            base_cost = sol.objective
        report = empirical_violations(sol, problem, samples)
        rows.append(ComparisonRow(
            assumption.name, "optimal", sol.objective,
            sol.objective / base_cost if base_cost else None,
            quantile, report.eps_avg_active, report.eps_max))
    return rows


def synthetic_model_from_case(case, scale: float = 0.2,
                              rho: float = 0.4) -> ForecastModel:
    """Forecast-error moments derived from the case itself.

    Uncertainty sits at the forecast in-feed buses when the case declares
    any, otherwise at the load buses. Standard deviations are ``scale``
    times the forecasted injection (the cross-correlation structure of the
    original data is not recoverable, so an exponential-decay correlation
    ``rho ** distance`` over the uncertain-bus ordering is used instead;
    this is a documented modeling choice, not a fidelity claim).
    """
    basis = case.infeeds if np.any(case.infeeds != 0) else case.loads
    idx = np.flatnonzero(basis != 0)
    if idx.size == 0:
        raise DomainError("case has neither in-feeds nor loads to attach "
                          "uncertainty to")
    std = np.zeros(case.n)
    std[idx] = scale * np.abs(basis[idx])
    corr = np.eye(case.n)
    for a in range(idx.size):
        for b in range(a + 1, idx.size):
            corr[idx[a], idx[b]] = corr[idx[b], idx[a]] = rho ** (b - a)
    sigma = corr * np.outer(std, std)
    return ForecastModel.from_moments(np.zeros(case.n), sigma)


def _standardized(family: str, size, rng: np.random.Generator) -> np.ndarray:
    """Zero-mean unit-variance draws from the named family."""
    m = re.fullmatch(r"student_t\(([^)]+)\)", family)
    if m:
        nu = float(m.group(1))
        if nu <= 2:
            raise DomainError("student_t family needs dof > 2")
        return rng.standard_t(nu, size) * math.sqrt((nu - 2.0) / nu)
    if family == "gaussian":
        return rng.standard_normal(size)
    if family == "student_t":
        return _standardized("student_t(4)", size, rng)
    if family == "triangular":
        a = math.sqrt(6.0)       # Var of triangular on [-a, a] is a^2/6
        return rng.triangular(-a, 0.0, a, size)
    if family == "skewed":
        # two-sided lognormal mixture: right-skewed, heavy-tailed, matched
        # to zero mean and unit variance analytically
        w, s1, s2 = 0.65, 0.55, 0.75
        m1, m2 = math.exp(s1 ** 2 / 2), math.exp(s2 ** 2 / 2)
        v1 = (math.exp(s1 ** 2) - 1) * math.exp(s1 ** 2)
        v2 = (math.exp(s2 ** 2) - 1) * math.exp(s2 ** 2)
        pick = rng.random(size) < w
        z = np.where(pick,
                     rng.lognormal(0.0, s1, size) - m1,
                     -(rng.lognormal(0.0, s2, size) - m2))
        return z / math.sqrt(w * v1 + (1 - w) * v2)
    raise DomainError(f"unknown sample family {family!r}")


def synthesize_samples(model: ForecastModel, family: str, count: int,
                       seed: int) -> np.ndarray:
    """Seeded samples with population mean mu and covariance sigma.

    Draws are built as mu + L z with iid standardized z, so the first two
    population moments match the model exactly for every family.
    """
    if count < 1:
        raise DomainError("count must be at least 1")
    rng = np.random.default_rng(seed)
    z = _standardized(family, (count, model.n), rng)
    return model.mu[None, :] + z @ model.sigma_sqrt.T
