"""Acceptance gate: eight criteria, one printed pass/fail line each.

Run with  pytest tests/test_acceptance.py -v  (add -s to see the lines on
success; pytest prints captured output for failures automatically).
"""

import math
import time

import numpy as np
import pytest
from click.testing import CliRunner

from pscopf.caseio import ForecastModel
from pscopf.cli import main as cli_main
from pscopf.margins import KINDS, DistributionAssumption, f_inv
from pscopf.network import enumerate_contingencies
from pscopf.scopf import assemble, solve, solve_deterministic
from pscopf.validation import (
    compare_assumptions,
    empirical_violations,
    synthesize_samples,
    synthetic_model_from_case,
)

import frozen_quantiles as fq
import oracles
from conftest import CASE3_TEXT

A = DistributionAssumption


def _report(n, text):
    print(f"PASS criterion {n}: {text}")


def test_criterion_1_quantile_factor_exactness():
    t0 = time.perf_counter()
    worst = 0.0
    for eps, ref in zip(fq.EPS_GRID, fq.NORMAL):
        worst = max(worst, abs(f_inv(A("normal"), eps) - ref))
    for eps, ref in zip(fq.EPS_GRID, fq.STUDENT_T):
        worst = max(worst, abs(f_inv(A("student_t", 4.0), eps) - ref))
    for kind in ("symmetric_unimodal", "unimodal", "mean_covariance"):
        for eps in fq.EPS_GRID:
            worst = max(worst, abs(f_inv(A(kind), eps)
                                   - oracles.invert_tail(kind, eps)))
    assert worst < 1e-9

    jump = 0.0
    delta = 2e-14
    for kind in KINDS:
        for b in (1.0 / 6.0, 0.5):
            vals = [f_inv(A(kind), b - delta), f_inv(A(kind), b),
                    f_inv(A(kind), b + delta)]
            jump = max(jump, max(vals) - min(vals))
    assert jump < 1e-12

    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    _report(1, f"50-point oracle match (max err {worst:.2e}), branch "
               f"continuity (max jump {jump:.2e}), {elapsed:.2f} s")


def test_criterion_2_bound_validity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240817)
    n = 1_000_000
    draws = {
        "gaussian": rng.standard_normal(n),
        "student_t(4)": rng.standard_t(4, n) * math.sqrt(0.5),
        "triangular": rng.triangular(-math.sqrt(6), 0.0, math.sqrt(6), n),
        "two_point": rng.choice([-1.0, 1.0], size=n),
    }
    admissible = {
        "normal": ["gaussian"],
        "student_t": ["student_t(4)"],
        "symmetric_unimodal": ["gaussian", "student_t(4)", "triangular"],
        "unimodal": ["gaussian", "student_t(4)", "triangular"],
        "mean_covariance": list(draws),
    }
    checked = 0
    for kind, families in admissible.items():
        assumption = A(kind, 4.0) if kind == "student_t" else A(kind)
        for family in families:
            for eps in (0.1, 0.05, 0.01):
                k = f_inv(assumption, eps)
                freq = np.count_nonzero(draws[family] >= k) / n
                bound = eps + 3.0 * math.sqrt(eps * (1.0 - eps) / n)
                assert freq <= bound, (kind, family, eps, freq, bound)
                checked += 1
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0
    _report(2, f"{checked} (class, distribution, eps) frequency checks "
               f"within Monte Carlo bound, {elapsed:.1f} s")


def test_criterion_3_dc_network_invariants(case3):
    from pscopf.network import build_flow_matrix

    a3 = build_flow_matrix(case3)
    hand = np.array([[1 / 3, -1 / 3, 0.0],
                     [1 / 3, 2 / 3, 0.0],
                     [2 / 3, 1 / 3, 0.0]])
    assert np.abs(a3 - hand).max() < 1e-10

    rng = np.random.default_rng(303)
    worst = 0.0
    for trial in range(100):
        n = int(rng.integers(4, 31))
        case = oracles.random_connected_case(rng, n, n_gens=2)
        a = build_flow_matrix(case)
        inj = rng.normal(size=n)
        inj -= inj.mean()
        flows = a @ inj
        m = np.zeros((case.n_lines, n))
        for l, ln in enumerate(case.lines):
            m[l, ln.from_bus] = 1.0
            m[l, ln.to_bus] = -1.0
        worst = max(worst, np.abs(m.T @ flows - inj).max())   # KCL
        v = np.array([ln.reactance for ln in case.lines]) * flows
        theta, *_ = np.linalg.lstsq(m, v, rcond=None)
        worst = max(worst, np.abs(m @ theta - v).max())       # KVL
        other = case.with_slack(case.buses[0].id)
        perm = [[b.id for b in case.buses].index(b.id) for b in other.buses]
        worst = max(worst,
                    np.abs(build_flow_matrix(other) @ inj[perm] - flows).max())
    assert worst < 1e-8
    _report(3, f"3-bus PTDF exact; KCL/KVL/slack invariance on 100 random "
               f"graphs, worst residual {worst:.2e}")


def test_criterion_4_lp_oracle_equivalence(case3, cset3, model3):
    rng = np.random.default_rng(404)
    matched = 0
    attempts = 0
    worst = 0.0
    while matched < 20 and attempts < 80:
        attempts += 1
        n = int(rng.integers(3, 6))
        n_gens = int(rng.integers(2, min(4, n + 1)))
        case = oracles.random_connected_case(
            rng, n, n_gens, line_limit_frac=float(rng.uniform(0.7, 1.6)))
        cset = enumerate_contingencies(case)
        model = synthetic_model_from_case(case, scale=0.15)
        problem = assemble(case, cset, model, A("normal"), 0.1)
        sol = solve(problem)
        status, obj = oracles.vertex_enumerate(*oracles.full_lp(problem))
        assert sol.status == status, (attempts, sol.status, status)
        if status != "optimal":
            continue
        rel = abs(sol.objective - obj) / max(1.0, abs(obj))
        worst = max(worst, rel)
        assert rel < 1e-4, (attempts, sol.objective, obj)
        matched += 1
    assert matched >= 20, f"only {matched} optimal cases in {attempts} draws"

    det = solve_deterministic(case3, cset3)
    zero_mu = ForecastModel.from_moments(np.zeros(case3.n), model3.sigma)
    as_det = solve(assemble(case3, cset3, zero_mu, A("deterministic"), 0.1))
    assert as_det.objective == det.objective
    np.testing.assert_array_equal(as_det.p_g, det.p_g)
    no_cov = solve(assemble(case3, cset3, ForecastModel.zero(case3.n),
                            A("normal"), 0.1))
    assert no_cov.objective == det.objective
    np.testing.assert_array_equal(no_cov.p_g, det.p_g)
    _report(4, f"{matched} random cases match vertex enumeration "
               f"(worst rel err {worst:.2e}); deterministic and zero-"
               f"covariance solves equal classical SCOPF exactly")


def test_criterion_5_gaussian_tightness(case118, cset118):
    t0 = time.perf_counter()
    model = synthetic_model_from_case(case118)
    problem = assemble(case118, cset118, model, A("normal"), 0.1)
    sol = solve(problem)
    assert sol.status == "optimal"
    samples = synthesize_samples(model, "gaussian", 10_000, seed=505)
    report = empirical_violations(sol, problem, samples)
    active = [c.eps_hat for c in report.per_constraint if c.active]
    assert active
    lo, hi = min(active), max(active)
    assert lo >= 0.08 and hi <= 0.12, (lo, hi)
    elapsed = time.perf_counter() - t0
    assert elapsed < 300.0
    _report(5, f"{len(active)} active constraints, eps-hat in "
               f"[{lo:.4f}, {hi:.4f}] within [0.08, 0.12], {elapsed:.0f} s")


def test_criterion_6_skewed_data_orderings(case118, cset118):
    model = synthetic_model_from_case(case118)
    samples = synthesize_samples(model, "skewed", 10_000, seed=606)
    rows = {r.assumption: r
            for r in compare_assumptions(case118, cset118, model, 0.1, samples)}
    order = ["deterministic", "normal", "symmetric_unimodal", "unimodal",
             "mean_covariance"]
    assert all(rows[k].status == "optimal" for k in order)
    costs = [rows[k].objective for k in order]
    assert all(a <= b for a, b in zip(costs, costs[1:])), costs
    eps_hats = [rows[k].eps_avg_active for k in order]
    assert all(a >= b for a, b in zip(eps_hats, eps_hats[1:])), eps_hats
    assert rows["mean_covariance"].eps_avg_active <= 0.02
    _report(6, "cost ordering det<=N<=S<=U<=C ("
               + " <= ".join(f"{c:.1f}" for c in costs)
               + "), eps-hat reversed ("
               + " >= ".join(f"{e:.4f}" for e in eps_hats)
               + f"), Cantelli eps-hat {eps_hats[-1]:.4f} <= 0.02")


def test_criterion_7_student_t_normal_crossover():
    gap_loose = f_inv(A("normal"), 0.1) - f_inv(A("student_t", 4.0), 0.1)
    gap_tight = f_inv(A("student_t", 4.0), 0.01) - f_inv(A("normal"), 0.01)
    assert gap_loose > 0.05
    assert gap_tight > 0.05
    _report(7, f"Student-t(4) below normal by {gap_loose:.3f} at eps=0.1, "
               f"above by {gap_tight:.3f} at eps=0.01")


def test_criterion_8_byte_identical_reports(tmp_path):
    case_path = tmp_path / "case3.case"
    case_path.write_text(CASE3_TEXT)
    runner = CliRunner()
    outputs = []
    for run in ("first", "second"):
        out = tmp_path / run
        for cmd, name in (("solve", "solution.json"),
                          ("validate", "violations.csv"),
                          ("compare", "comparison.csv")):
            res = runner.invoke(cli_main, [
                cmd, "--case", str(case_path), "--synthetic", "count=500",
                "--eps", "0.1", "--seed", "11", "--out", str(out)])
            assert res.exit_code == 0, res.output
        outputs.append({name: (out / name).read_bytes()
                        for name in ("solution.json", "violations.csv",
                                     "comparison.csv")})
    assert outputs[0] == outputs[1]
    _report(8, "solve/validate/compare reports byte-identical across two "
               "seeded runs")
