#!/usr/bin/env python3
"""Generate data/case118.case.

Reconstructs the classic 118-bus transmission test system: 118 buses, 186
lines (including the seven double-circuit pairs), 54 generators at the
standard generator buses, slack at bus 69. Electrical parameters and loads
are representative values generated deterministically (fixed seed), not the
published data set, which is not redistributable here; capacities of the
large units follow the well-known pattern.

Flow limits are calibrated so the deterministic N-1 dispatch keeps 25 %
headroom on every line (floor 150 MW), which leaves room for probabilistic
margins to bind without making the case trivially unconstrained.

Run from the repository root:  python3 scripts/make_case118.py
"""

from pathlib import Path

import numpy as np

import sys
sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from pscopf.caseio import Bus, Generator, Line, NetworkCase, serialize_case
from pscopf.network import enumerate_contingencies
from pscopf.scopf import solve_deterministic

BRANCHES = [
    (1, 2), (1, 3), (4, 5), (3, 5), (5, 6), (6, 7), (8, 9), (8, 5), (9, 10),
    (4, 11), (5, 11), (11, 12), (2, 12), (3, 12), (7, 12), (11, 13), (12, 14),
    (13, 15), (14, 15), (12, 16), (15, 17), (16, 17), (17, 18), (18, 19),
    (19, 20), (15, 19), (20, 21), (21, 22), (22, 23), (23, 24), (23, 25),
    (26, 25), (25, 27), (27, 28), (28, 29), (30, 17), (8, 30), (26, 30),
    (17, 31), (29, 31), (23, 32), (31, 32), (27, 32), (15, 33), (19, 34),
    (35, 36), (35, 37), (33, 37), (34, 36), (34, 37), (38, 37), (37, 39),
    (37, 40), (30, 38), (39, 40), (40, 41), (40, 42), (41, 42), (43, 44),
    (34, 43), (44, 45), (45, 46), (46, 47), (46, 48), (47, 49), (42, 49),
    (42, 49), (45, 49), (48, 49), (49, 50), (49, 51), (51, 52), (52, 53),
    (53, 54), (49, 54), (49, 54), (54, 55), (54, 56), (55, 56), (56, 57),
    (50, 57), (56, 58), (51, 58), (54, 59), (56, 59), (56, 59), (55, 59),
    (59, 60), (59, 61), (60, 61), (60, 62), (61, 62), (63, 59), (63, 64),
    (64, 61), (38, 65), (64, 65), (49, 66), (49, 66), (62, 66), (62, 67),
    (65, 66), (66, 67), (65, 68), (47, 69), (49, 69), (68, 69), (69, 70),
    (24, 70), (70, 71), (24, 72), (71, 72), (71, 73), (70, 74), (70, 75),
    (69, 75), (74, 75), (76, 77), (69, 77), (75, 77), (77, 78), (78, 79),
    (77, 80), (77, 80), (79, 80), (68, 81), (81, 80), (77, 82), (82, 83),
    (83, 84), (83, 85), (84, 85), (85, 86), (86, 87), (85, 88), (85, 89),
    (88, 89), (89, 90), (89, 90), (90, 91), (89, 92), (89, 92), (91, 92),
    (92, 93), (92, 94), (93, 94), (94, 95), (80, 96), (82, 96), (94, 96),
    (80, 97), (80, 98), (80, 99), (92, 100), (94, 100), (95, 96), (96, 97),
    (98, 100), (99, 100), (100, 101), (92, 102), (101, 102), (100, 103),
    (100, 104), (103, 104), (103, 105), (100, 106), (104, 105), (105, 106),
    (105, 107), (105, 108), (106, 107), (108, 109), (103, 110), (109, 110),
    (110, 111), (110, 112), (17, 113), (32, 113), (32, 114), (27, 115),
    (114, 115), (68, 116), (12, 117), (75, 118), (76, 118),
]

GEN_BUSES = [
    1, 4, 6, 8, 10, 12, 15, 18, 19, 24, 25, 26, 27, 31, 32, 34, 36, 40, 42,
    46, 49, 54, 55, 56, 59, 61, 62, 65, 66, 69, 70, 72, 73, 74, 76, 77, 80,
    85, 87, 89, 90, 91, 92, 99, 100, 103, 104, 105, 107, 110, 111, 112, 113,
    116,
]

# large units; every other generator gets 100 MW
BIG_UNITS = {
    10: 550, 12: 185, 25: 320, 26: 414, 31: 107, 46: 119, 49: 304, 54: 148,
    59: 255, 61: 260, 65: 491, 66: 492, 69: 805, 80: 577, 87: 104, 89: 707,
    100: 352, 103: 140, 111: 136,
}

SLACK = 69
TOTAL_LOAD = 4242.0
N_UNCERTAIN = 54


def build() -> NetworkCase:
    assert len(BRANCHES) == 186, len(BRANCHES)
    assert len(GEN_BUSES) == 54, len(GEN_BUSES)
    bus_ids = sorted({b for e in BRANCHES for b in e})
    assert bus_ids == list(range(1, 119)), "topology must cover buses 1..118"

    rng = np.random.default_rng(118)
    order = [b for b in bus_ids if b != SLACK] + [SLACK]
    index = {b: i for i, b in enumerate(order)}
    buses = [Bus(str(b), b == SLACK) for b in order]

    # representative series reactances; limits calibrated below
    lines = [Line(index[f], index[t], float(rng.uniform(0.02, 0.20)), 1e6)
             for f, t in BRANCHES]

    gens = []
    for b in GEN_BUSES:
        p_max = float(BIG_UNITS.get(b, 100.0))
        cost = float(rng.uniform(5.0, 45.0))
        gens.append(Generator(index[b], round(cost, 2), 0.0, p_max))

    loads = np.zeros(118)
    load_buses = [b for b in bus_ids if b not in BIG_UNITS]
    raw = rng.uniform(10.0, 90.0, size=len(load_buses))
    raw *= TOTAL_LOAD / raw.sum()
    for b, mw in zip(load_buses, raw):
        loads[index[b]] = round(float(mw), 2)

    # uncertain in-feed sites: the N_UNCERTAIN largest loads
    infeeds = np.zeros(118)
    biggest = np.argsort(loads)[::-1][:N_UNCERTAIN]
    infeeds[biggest] = np.round(0.3 * loads[biggest], 2)

    return NetworkCase(100.0, buses, lines, gens, loads, infeeds)


def calibrate_limits(case: NetworkCase) -> NetworkCase:
    cset = enumerate_contingencies(case)
    sol = solve_deterministic(case, cset)
    assert sol.status == "optimal", sol.status
    # headroom: 25 % over the worst deterministic N-1 flow, plus room for a
    # 3.2-sigma uncertainty margin at std = 0.5 * infeed so even the most
    # conservative probabilistic tightening stays feasible at eps = 0.1
    from pscopf.validation import synthetic_model_from_case
    model = synthetic_model_from_case(case, scale=0.5, rho=0.4)
    max_flow = np.zeros(case.n_lines)
    max_spread = np.zeros(case.n_lines)
    inj = sol.p_g + case.infeeds - case.loads
    for cont in cset.contingencies:
        inj_i = inj.copy()
        if cont.kind == "gen":
            out_bus = case.generators[cont.index].bus
            x_out = sol.p_g[out_bus]
            inj_i += cont.d * x_out
            inj_i[out_bus] -= x_out
        flows = cont.A @ inj_i
        max_flow = np.maximum(max_flow, np.abs(flows))
        m_flow = cont.A - np.outer(cont.A @ cont.d, np.ones(case.n))
        spread = np.linalg.norm(m_flow @ model.sigma_sqrt, axis=1)
        max_spread = np.maximum(max_spread, spread)
    limits = np.maximum(150.0, np.round(1.25 * max_flow + 3.2 * max_spread, 1))
    lines = [Line(ln.from_bus, ln.to_bus, ln.reactance, float(lim))
             for ln, lim in zip(case.lines, limits)]
    return NetworkCase(case.base_mva, case.buses, lines, case.generators,
                       case.loads, case.infeeds)


def main():
    case = calibrate_limits(build())
    out = Path(__file__).resolve().parents[1] / "data" / "case118.case"
    out.parent.mkdir(exist_ok=True)
    out.write_text(serialize_case(case))
    print(f"wrote {out}: {case.n} buses, {case.n_lines} lines, "
          f"{len(case.generators)} generators, "
          f"total load {case.loads.sum():.1f} MW")


if __name__ == "__main__":
    main()
