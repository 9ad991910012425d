"""Converter from the common matrix-oriented (MATPOWER-style) case layout.

Reads ``mpc.baseMVA`` and the ``mpc.bus``, ``mpc.branch``, ``mpc.gen`` and
``mpc.gencost`` matrices from a ``.m`` case file and builds a NetworkCase.
Only the columns needed for the DC model are used; the linear cost
coefficient is taken from polynomial gencost rows.
"""

from __future__ import annotations

import re

import numpy as np

from .caseio import Bus, Generator, Line, NetworkCase
from .errors import CaseParseError, CaseValidationError

_MATRIX_RE = re.compile(
    r"mpc\.(?P<name>\w+)\s*=\s*\[(?P<body>.*?)\]\s*;", re.DOTALL)
_SCALAR_RE = re.compile(r"mpc\.baseMVA\s*=\s*(?P<val>[0-9.eE+-]+)\s*;")


def _parse_matrix(body: str) -> np.ndarray:
    rows = []
    for raw in body.replace(";", "\n").splitlines():
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([float(t) for t in line.split()])
        except ValueError as exc:
            raise CaseParseError(f"bad matrix row: {line!r}") from exc
    return np.array(rows, dtype=float)


def convert_matpower(text, default_flow_limit: float = 9900.0,
                     zero_p_min: bool = False) -> NetworkCase:
    """Convert MATPOWER-style ``.m`` text into a NetworkCase.

    Branches with rateA <= 0 (unlimited in the source convention) get
    ``default_flow_limit``. Out-of-service branches and generators are
    dropped; multiple generators on one bus are aggregated (summed limits,
    capacity-weighted linear cost).
    """
    if hasattr(text, "read"):
        text = text.read()
    m = _SCALAR_RE.search(text)
    if not m:
        raise CaseParseError("missing mpc.baseMVA")
    base_mva = float(m.group("val"))
    mats = {mm.group("name"): _parse_matrix(mm.group("body"))
            for mm in _MATRIX_RE.finditer(text)}
    for name in ("bus", "branch", "gen"):
        if name not in mats or mats[name].size == 0:
            raise CaseParseError(f"missing mpc.{name} matrix")
    bus_m, branch_m, gen_m = mats["bus"], mats["branch"], mats["gen"]
    gencost = mats.get("gencost")

    slack_rows = np.flatnonzero(bus_m[:, 1] == 3)
    if len(slack_rows) != 1:
        raise CaseValidationError(
            f"exactly one slack (type 3) bus required, found {len(slack_rows)}")
    slack_id = int(bus_m[slack_rows[0], 0])

    ordered = [int(b) for b in bus_m[:, 0] if int(b) != slack_id] + [slack_id]
    index = {bid: i for i, bid in enumerate(ordered)}
    buses = [Bus(str(bid), bid == slack_id) for bid in ordered]

    n = len(buses)
    loads = np.zeros(n)
    for row in bus_m:
        loads[index[int(row[0])]] += row[2]

    lines = []
    for row in branch_m:
        if row.shape[0] > 10 and row[10] == 0:  # status column
            continue
        limit = row[5] if row[5] > 0 else default_flow_limit
        lines.append(Line(index[int(row[0])], index[int(row[1])],
                          float(row[3]), float(limit)))

    # aggregate per bus: summed limits, capacity-weighted linear cost
    agg: dict[int, list[float]] = {}
    for k, row in enumerate(gen_m):
        if row.shape[0] > 7 and row[7] <= 0:  # status column
            continue
        bus = index[int(row[0])]
        p_max, p_min = float(row[8]), float(row[9])
        cost = 0.0
        if gencost is not None and k < gencost.shape[0]:
            gc = gencost[k]
            if gc[0] == 2 and gc[3] >= 2:       # polynomial model
                cost = float(gc[int(4 + gc[3] - 2)])  # linear coefficient
        if bus not in agg:
            agg[bus] = [0.0, 0.0, 0.0, 0.0]     # pmax, pmin, cost*pmax, pmax acc
        agg[bus][0] += p_max
        agg[bus][1] += p_min
        agg[bus][2] += cost * max(p_max, 1e-9)
        agg[bus][3] += max(p_max, 1e-9)
    gens = [Generator(bus, c_acc / w, 0.0 if zero_p_min else p_min, p_max)
            for bus, (p_max, p_min, c_acc, w) in sorted(agg.items())]

    return NetworkCase(base_mva, buses, lines, gens, loads, np.zeros(n))
