"""Independent reference implementations used only by the tests.

Everything here is deliberately written from first principles (bisection on
tail bounds, brute-force vertex enumeration, graph bridges) so the library
is checked against code that shares none of its logic.
"""

import itertools

import numpy as np

from pscopf.caseio import Bus, Generator, Line, NetworkCase


def worst_tail(kind, k):
    """Worst-case P(delta >= k) over the family, for standardized delta."""
    if kind == "symmetric_unimodal":
        # Gauss inequality
        if k >= np.sqrt(4.0 / 3.0):
            return 2.0 / (9.0 * k * k)
        return 0.5 - k / (2.0 * np.sqrt(3.0))
    if kind == "unimodal":
        # one-sided Vysochanskij-Petunin
        if k >= np.sqrt(5.0 / 3.0):
            return 4.0 / (9.0 * (1.0 + k * k))
        return 1.0 - (4.0 / 3.0) * k * k / (1.0 + k * k)
    if kind == "mean_covariance":
        # Cantelli
        return 1.0 / (1.0 + k * k)
    raise ValueError(kind)


def invert_tail(kind, eps, iters=200):
    """Smallest k >= 0 with worst_tail(kind, k) <= eps, by bisection."""
    if worst_tail(kind, 0.0) <= eps:
        return 0.0
    lo, hi = 0.0, 1e9
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if worst_tail(kind, mid) <= eps:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def vertex_enumerate(c, a_ub, b_ub, a_eq, b_eq, tol=1e-7):
    """Brute-force LP: try every basis of m active constraints.

    Returns (status, objective). Assumes the feasible region, if nonempty,
    is bounded with at least one vertex (true whenever variable bounds are
    among the inequality rows).
    """
    c = np.asarray(c, dtype=float)
    m = c.shape[0]
    a_eq = np.asarray(a_eq, dtype=float).reshape(-1, m)
    b_eq = np.asarray(b_eq, dtype=float).reshape(-1)
    a_ub = np.asarray(a_ub, dtype=float).reshape(-1, m)
    b_ub = np.asarray(b_ub, dtype=float).reshape(-1)
    n_eq = a_eq.shape[0]
    need = m - n_eq
    best = None
    scale = max(1.0, np.abs(b_ub).max(initial=0.0), np.abs(b_eq).max(initial=0.0))
    for combo in itertools.combinations(range(a_ub.shape[0]), need):
        mat = np.vstack([a_eq, a_ub[list(combo)]])
        rhs = np.concatenate([b_eq, b_ub[list(combo)]])
        try:
            x = np.linalg.solve(mat, rhs)
        except np.linalg.LinAlgError:
            continue
        if (a_ub @ x <= b_ub + tol * scale).all() and \
                np.abs(a_eq @ x - b_eq).max(initial=0.0) <= tol * scale:
            val = float(c @ x)
            if best is None or val < best:
                best = val
    if best is None:
        return "infeasible", None
    return "optimal", best


def full_lp(problem):
    """Materialize every constraint row of a ScopfProblem over the
    generator-bus variables (non-generator injections are fixed at zero)."""
    gb = problem.case.gen_bus_indices()
    a_ub, b_ub = [], []
    for rec in problem.records:
        row, const = problem.dispatch_row(rec)
        if rec.is_upper:
            a_ub.append(row[gb])
            b_ub.append(rec.effective_limit - const)
        else:
            a_ub.append(-row[gb])
            b_ub.append(const - rec.effective_limit)
    a_eq = np.ones((1, gb.size))
    b_eq = np.array([problem.balance_rhs])
    return problem.cost[gb], np.array(a_ub), np.array(b_ub), a_eq, b_eq


def random_connected_case(rng, n_buses, n_gens, line_limit_frac=None):
    """Random connected network: spanning tree plus extra edges."""
    edges = [(int(rng.integers(0, i)), i) for i in range(1, n_buses)]
    extra = max(1, n_buses // 2)
    for _ in range(extra):
        a, b = rng.integers(0, n_buses, size=2)
        if a != b:
            edges.append((int(min(a, b)), int(max(a, b))))
    loads = np.zeros(n_buses)
    load_buses = rng.choice(n_buses, size=max(1, n_buses // 2), replace=False)
    loads[load_buses] = rng.uniform(20.0, 80.0, size=load_buses.size)
    total = loads.sum()
    limit = total * (line_limit_frac if line_limit_frac else 10.0)
    lines = [Line(f, t, float(rng.uniform(0.05, 0.5)), float(limit))
             for f, t in edges]
    gen_buses = rng.choice(n_buses, size=n_gens, replace=False)
    gens = [Generator(int(b), float(rng.uniform(5.0, 50.0)), 0.0,
                      float(rng.uniform(1.0, 1.6) * total))
            for b in sorted(gen_buses)]
    buses = [Bus(f"n{i}", i == n_buses - 1) for i in range(n_buses)]
    return NetworkCase(100.0, buses, lines, gens, loads, np.zeros(n_buses))


def islanding_lines(case):
    """Line outages that disconnect the grid, via networkx bridges.

    A parallel circuit is never a bridge, so the multigraph is collapsed to
    a simple graph first and only single-circuit corridors can island.
    """
    import networkx as nx

    counts = {}
    for ln in case.lines:
        key = (min(ln.from_bus, ln.to_bus), max(ln.from_bus, ln.to_bus))
        counts[key] = counts.get(key, 0) + 1
    g = nx.Graph()
    g.add_nodes_from(range(case.n))
    g.add_edges_from(counts)
    bridges = set(nx.bridges(g))
    out = set()
    for l, ln in enumerate(case.lines):
        key = (min(ln.from_bus, ln.to_bus), max(ln.from_bus, ln.to_bus))
        if counts[key] == 1 and (key in bridges or key[::-1] in bridges):
            out.add(l)
    return out
