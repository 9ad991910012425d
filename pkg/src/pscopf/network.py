"""DC susceptance matrices, injection-to-flow maps and participation vectors.

For every contingency i the flow matrix A^i maps nodal active-power
injections (MW) to line flows (MW): the line susceptance matrix B_f and the
bus susceptance matrix B_bus are rebuilt with the outaged line removed, the
slack row/column (always last) is deleted before inversion, and the result
is zero-padded back to full bus dimension. The row of an outaged line is
zeroed.

Participation vectors d^i distribute any system power imbalance over the
generators proportionally to maximum output; an outaged generator gets zero
and is excluded from the denominator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .caseio import NetworkCase
from .errors import IslandingError, NoBalancingCapacityError, SolverFailureError


@dataclass(frozen=True)
class Contingency:
    kind: str                      # 'base' | 'line' | 'gen'
    index: int | None              # line index or generator index
    A: np.ndarray                  # n_L x n, MW injections -> MW flows
    d: np.ndarray                  # length n, participation per bus

    def label(self, case: NetworkCase) -> str:
        if self.kind == "base":
            return "base"
        if self.kind == "line":
            ln = case.lines[self.index]
            return (f"line {case.buses[ln.from_bus].id}-"
                    f"{case.buses[ln.to_bus].id} (#{self.index})")
        g = case.generators[self.index]
        return f"gen @{case.buses[g.bus].id}"


@dataclass
class ContingencySet:
    contingencies: list[Contingency]
    excluded: list[tuple[str, int, str]] = field(default_factory=list)

    def __len__(self):
        return len(self.contingencies)


def _susceptance_matrices(case: NetworkCase, skip_line: int | None):
    n, n_l = case.n, case.n_lines
    b_f = np.zeros((n_l, n))
    b_bus = np.zeros((n, n))
    for l, ln in enumerate(case.lines):
        if l == skip_line:
            continue
        b = 1.0 / ln.reactance
        f, t = ln.from_bus, ln.to_bus
        b_f[l, f] += b
        b_f[l, t] -= b
        b_bus[f, f] += b
        b_bus[t, t] += b
        b_bus[f, t] -= b
        b_bus[t, f] -= b
    return b_f, b_bus


def _connected_component(case: NetworkCase, skip_line: int | None,
                         start: int = 0) -> set[int]:
    adj: list[list[int]] = [[] for _ in range(case.n)]
    for l, ln in enumerate(case.lines):
        if l == skip_line:
            continue
        adj[ln.from_bus].append(ln.to_bus)
        adj[ln.to_bus].append(ln.from_bus)
    seen = {start}
    stack = [start]
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return seen


def build_flow_matrix(case: NetworkCase, outage=None) -> np.ndarray:
    """Injection-to-flow matrix A^i (n_L x n).

    ``outage`` is None for the base case or ('line', l) / ('gen', g).
    Generator outages leave the network unchanged.
    """
    skip_line = None
    if outage is not None and outage[0] == "line":
        skip_line = outage[1]
    component = _connected_component(case, skip_line)
    if len(component) != case.n:
        island = sorted(case.buses[i].id for i in range(case.n)
                        if i not in component)
        raise IslandingError(
            f"outage disconnects buses {island}", island=island)
    b_f, b_bus = _susceptance_matrices(case, skip_line)
    reduced = b_bus[:-1, :-1]          # slack is the last bus
    try:
        inv = np.linalg.inv(reduced)
    except np.linalg.LinAlgError as exc:
        raise SolverFailureError(
            f"reduced bus matrix is singular: {exc}") from exc
    padded = np.zeros((case.n, case.n))
    padded[:-1, :-1] = inv
    a = b_f @ padded
    if skip_line is not None:
        a[skip_line, :] = 0.0
    return a


def participation_vector(case: NetworkCase, outage=None) -> np.ndarray:
    """Participation vector d^i over buses, entries summing to one."""
    d = np.zeros(case.n)
    outaged_bus = None
    if outage is not None and outage[0] == "gen":
        outaged_bus = case.generators[outage[1]].bus
    total = 0.0
    for g in case.generators:
        if g.bus == outaged_bus:
            continue
        d[g.bus] = g.p_max
        total += g.p_max
    if total <= 0:
        raise NoBalancingCapacityError(
            "no in-service generator with positive maximum output")
    return d / total


def enumerate_contingencies(case: NetworkCase) -> ContingencySet:
    """Base case plus every single line and generator outage.

    Outages that disconnect the grid or leave no balancing capacity are
    moved to the exclusion list with a reason instead of failing the solve.
    """
    base_a = build_flow_matrix(case, None)     # raises if base is disconnected
    base_d = participation_vector(case, None)
    cset = ContingencySet([Contingency("base", None, base_a, base_d)])
    for l in range(case.n_lines):
        try:
            a = build_flow_matrix(case, ("line", l))
        except IslandingError as exc:
            cset.excluded.append(("line", l, str(exc)))
            continue
        # line outages reuse the base participation vector
        cset.contingencies.append(Contingency("line", l, a, base_d))
    for g in range(len(case.generators)):
        try:
            d = participation_vector(case, ("gen", g))
        except NoBalancingCapacityError as exc:
            cset.excluded.append(("gen", g, str(exc)))
            continue
        cset.contingencies.append(Contingency("gen", g, base_a, d))
    return cset
