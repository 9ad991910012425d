"""Case and sample file ingestion, moment estimation, covariance factorization.

The native case format is a sectioned text file with sections ``[bus]``,
``[line]``, ``[gen]``, ``[load]``, ``[infeed]``. Fields are whitespace
separated, ``#`` starts a comment, and exactly one bus row carries the
``slack`` keyword. An optional ``base_mva <value>`` line may appear before
the first section (default 100). Loads, in-feeds and limits are in MW,
reactances in p.u.

Buses are remapped internally to contiguous 0-based indices with the slack
bus placed last, so the reduced susceptance matrix is obtained by deleting
the final row and column.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    CaseParseError,
    CaseValidationError,
    DimensionError,
    InsufficientDataError,
    NotPsdError,
)

SECTIONS = ("bus", "line", "gen", "load", "infeed")


@dataclass(frozen=True)
class Bus:
    id: str
    is_slack: bool = False


@dataclass(frozen=True)
class Line:
    from_bus: int          # internal bus index
    to_bus: int
    reactance: float       # p.u.
    flow_limit: float      # MW


@dataclass(frozen=True)
class Generator:
    bus: int               # internal bus index
    cost: float            # $/MWh
    p_min: float           # MW
    p_max: float           # MW


@dataclass
class NetworkCase:
    """A validated DC network model.

    Load and in-feed vectors are dense over buses (zeros where absent).
    The slack bus is always at index ``n - 1``.
    """

    base_mva: float
    buses: list[Bus]
    lines: list[Line]
    generators: list[Generator]
    loads: np.ndarray      # MW, length n
    infeeds: np.ndarray    # MW, length n

    def __post_init__(self):
        self.loads = np.asarray(self.loads, dtype=float)
        self.infeeds = np.asarray(self.infeeds, dtype=float)
        self.validate()

    @property
    def n(self) -> int:
        return len(self.buses)

    @property
    def n_lines(self) -> int:
        return len(self.lines)

    @property
    def slack(self) -> int:
        return self.n - 1

    def validate(self):
        slacks = [b for b in self.buses if b.is_slack]
        if len(slacks) != 1:
            raise CaseValidationError(
                f"exactly one slack bus required, found {len(slacks)}")
        if not self.buses[-1].is_slack:
            raise CaseValidationError("slack bus must be at the last index")
        ids = [b.id for b in self.buses]
        if len(set(ids)) != len(ids):
            raise CaseValidationError("duplicate bus ids")
        n = self.n
        for ln in self.lines:
            if ln.reactance <= 0:
                raise CaseValidationError(
                    f"line {ids[ln.from_bus]}-{ids[ln.to_bus]}: "
                    f"reactance must be positive, got {ln.reactance}")
            if ln.flow_limit <= 0:
                raise CaseValidationError(
                    f"line {ids[ln.from_bus]}-{ids[ln.to_bus]}: "
                    f"flow limit must be positive, got {ln.flow_limit}")
            if not (0 <= ln.from_bus < n and 0 <= ln.to_bus < n):
                raise CaseValidationError("line endpoint is not a declared bus")
            if ln.from_bus == ln.to_bus:
                raise CaseValidationError("line endpoints coincide")
        seen_gen_buses = set()
        for g in self.generators:
            if not (0 <= g.bus < n):
                raise CaseValidationError("generator bus is not declared")
            if g.bus in seen_gen_buses:
                raise CaseValidationError(
                    f"multiple generators at bus {ids[g.bus]}; aggregate them")
            seen_gen_buses.add(g.bus)
            if g.p_min > g.p_max:
                raise CaseValidationError(
                    f"generator at bus {ids[g.bus]}: p_min > p_max")
        if self.loads.shape != (n,) or self.infeeds.shape != (n,):
            raise DimensionError("load/infeed vectors must be dense over buses")

    # dense bus-indexed views (zero padding at buses without a generator)

    def gen_bus_indices(self) -> np.ndarray:
        return np.array([g.bus for g in self.generators], dtype=int)

    def dense_gen_vectors(self):
        """Return bus-indexed (cost, p_min, p_max) with zero padding."""
        n = self.n
        cost = np.zeros(n)
        p_min = np.zeros(n)
        p_max = np.zeros(n)
        for g in self.generators:
            cost[g.bus] = g.cost
            p_min[g.bus] = g.p_min
            p_max[g.bus] = g.p_max
        return cost, p_min, p_max

    def with_slack(self, bus_id: str) -> "NetworkCase":
        """Rebuild the case with a different slack bus (for invariance tests)."""
        old_ids = [b.id for b in self.buses]
        if bus_id not in old_ids:
            raise CaseValidationError(f"unknown bus id {bus_id!r}")
        new_order = [i for i, b in enumerate(self.buses) if b.id != bus_id]
        new_order.append(old_ids.index(bus_id))
        remap = {old: new for new, old in enumerate(new_order)}
        buses = [Bus(self.buses[i].id, self.buses[i].id == bus_id)
                 for i in new_order]
        lines = [replace(ln, from_bus=remap[ln.from_bus], to_bus=remap[ln.to_bus])
                 for ln in self.lines]
        gens = [replace(g, bus=remap[g.bus]) for g in self.generators]
        perm = np.array(new_order, dtype=int)
        return NetworkCase(self.base_mva, buses, lines, gens,
                           self.loads[perm], self.infeeds[perm])


@dataclass
class ForecastModel:
    """First and second moments of the forecast errors, with a square-root
    factor of the covariance. ``samples`` optionally keeps the raw data."""

    mu: np.ndarray                  # MW, length n
    sigma: np.ndarray               # MW^2, n x n
    sigma_sqrt: np.ndarray          # L with L @ L.T == sigma
    samples: np.ndarray | None = None

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        self.sigma = np.asarray(self.sigma, dtype=float)
        self.sigma_sqrt = np.asarray(self.sigma_sqrt, dtype=float)
        n = self.mu.shape[0]
        if self.sigma.shape != (n, n) or self.sigma_sqrt.shape[0] != n:
            raise DimensionError("moment dimensions disagree")
        if not np.allclose(self.sigma, self.sigma.T, atol=1e-8):
            raise CaseValidationError("covariance must be symmetric")
        recon = self.sigma_sqrt @ self.sigma_sqrt.T
        scale = max(1.0, float(np.linalg.norm(self.sigma)))
        if np.linalg.norm(recon - self.sigma) > 1e-6 * scale:
            raise CaseValidationError("sigma_sqrt does not reproduce sigma")

    @property
    def n(self) -> int:
        return self.mu.shape[0]

    @classmethod
    def from_moments(cls, mu, sigma, samples=None) -> "ForecastModel":
        sigma = np.asarray(sigma, dtype=float)
        return cls(mu, sigma, factor_covariance(sigma), samples=samples)

    @classmethod
    def from_samples(cls, samples) -> "ForecastModel":
        mu, sigma = estimate_moments(samples)
        return cls(mu, sigma, factor_covariance(sigma),
                   samples=np.asarray(samples, dtype=float))

    @classmethod
    def zero(cls, n: int) -> "ForecastModel":
        z = np.zeros((n, n))
        return cls(np.zeros(n), z, z)


def _tokenize(text) -> list[tuple[int, list[str]]]:
    if hasattr(text, "read"):
        text = text.read()
    rows = []
    for i, raw in enumerate(io.StringIO(text), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((i, line.split()))
    return rows


def _as_float(token: str, line_no: int, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise CaseParseError(f"expected a number for {what}, got {token!r}",
                             line_no) from None


def parse_case(text) -> NetworkCase:
    """Parse the native sectioned case format into a NetworkCase."""
    base_mva = 100.0
    bus_rows: list[tuple[str, bool]] = []
    line_rows = []
    gen_rows = []
    load_rows = []
    infeed_rows = []
    section = None
    for line_no, tokens in _tokenize(text):
        head = tokens[0].lower()
        if head.startswith("[") and head.endswith("]"):
            section = head[1:-1]
            if section not in SECTIONS:
                raise CaseParseError(f"unknown section [{section}]", line_no)
            continue
        if section is None:
            if head == "base_mva" and len(tokens) == 2:
                base_mva = _as_float(tokens[1], line_no, "base_mva")
                continue
            raise CaseParseError("data before any section header", line_no)
        if section == "bus":
            is_slack = False
            if len(tokens) == 2 and tokens[1].lower() == "slack":
                is_slack = True
            elif len(tokens) != 1:
                raise CaseParseError("bus row is 'id [slack]'", line_no)
            bus_rows.append((tokens[0], is_slack))
        elif section == "line":
            if len(tokens) != 4:
                raise CaseParseError(
                    "line row is 'from to reactance limit'", line_no)
            line_rows.append((line_no, tokens[0], tokens[1],
                              _as_float(tokens[2], line_no, "reactance"),
                              _as_float(tokens[3], line_no, "flow limit")))
        elif section == "gen":
            if len(tokens) != 4:
                raise CaseParseError("gen row is 'bus cost pmin pmax'", line_no)
            gen_rows.append((line_no, tokens[0],
                             _as_float(tokens[1], line_no, "cost"),
                             _as_float(tokens[2], line_no, "p_min"),
                             _as_float(tokens[3], line_no, "p_max")))
        else:  # load / infeed
            if len(tokens) != 2:
                raise CaseParseError(f"{section} row is 'bus mw'", line_no)
            target = load_rows if section == "load" else infeed_rows
            target.append((line_no, tokens[0],
                           _as_float(tokens[1], line_no, "MW value")))

    slack_ids = [bid for bid, s in bus_rows if s]
    if len(slack_ids) != 1:
        raise CaseValidationError(
            f"exactly one slack bus required, found {len(slack_ids)}")
    # slack goes last; other buses keep declaration order
    ordered = [bid for bid, s in bus_rows if not s] + slack_ids
    index = {bid: i for i, bid in enumerate(ordered)}
    if len(index) != len(bus_rows):
        raise CaseValidationError("duplicate bus ids")
    buses = [Bus(bid, bid == slack_ids[0]) for bid in ordered]

    def bus_index(bid: str, line_no: int) -> int:
        if bid not in index:
            raise CaseParseError(f"undeclared bus {bid!r}", line_no)
        return index[bid]

    lines = [Line(bus_index(f, ln), bus_index(t, ln), x, lim)
             for ln, f, t, x, lim in line_rows]
    gens = [Generator(bus_index(b, ln), c, pmin, pmax)
            for ln, b, c, pmin, pmax in gen_rows]
    n = len(buses)
    loads = np.zeros(n)
    infeeds = np.zeros(n)
    for ln, b, mw in load_rows:
        loads[bus_index(b, ln)] += mw
    for ln, b, mw in infeed_rows:
        infeeds[bus_index(b, ln)] += mw
    return NetworkCase(base_mva, buses, lines, gens, loads, infeeds)


def serialize_case(case: NetworkCase) -> str:
    """Write a NetworkCase back to the native format (round-trips parse_case)."""
    ids = [b.id for b in case.buses]
    out = [f"base_mva {float(case.base_mva)!r}", "", "[bus]"]
    for b in case.buses:
        out.append(f"{b.id} slack" if b.is_slack else b.id)
    out += ["", "[line]"]
    for ln in case.lines:
        out.append(f"{ids[ln.from_bus]} {ids[ln.to_bus]} "
                   f"{float(ln.reactance)!r} {float(ln.flow_limit)!r}")
    out += ["", "[gen]"]
    for g in case.generators:
        out.append(f"{ids[g.bus]} {float(g.cost)!r} "
                   f"{float(g.p_min)!r} {float(g.p_max)!r}")
    out += ["", "[load]"]
    for i, mw in enumerate(case.loads):
        if mw != 0.0:
            out.append(f"{ids[i]} {float(mw)!r}")
    out += ["", "[infeed]"]
    for i, mw in enumerate(case.infeeds):
        if mw != 0.0:
            out.append(f"{ids[i]} {float(mw)!r}")
    return "\n".join(out) + "\n"


def parse_samples(text, n: int) -> np.ndarray:
    """Parse a CSV-like sample file into an s x n matrix (one row per
    observation, one column per uncertain bus, MW)."""
    if hasattr(text, "read"):
        text = text.read()
    rows = []
    first_data_line = True
    for line_no, raw in enumerate(io.StringIO(text), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = [t for t in line.replace(",", " ").split() if t]
        values = []
        ok = True
        for t in tokens:
            try:
                values.append(float(t))
            except ValueError:
                ok = False
                break
        if not ok:
            if first_data_line:
                first_data_line = False   # header row, skip
                continue
            raise CaseParseError(f"non-numeric token in sample row", line_no)
        first_data_line = False
        if len(values) != n:
            raise DimensionError(
                f"line {line_no}: expected {n} columns, got {len(values)}")
        rows.append(values)
    if len(rows) < 2:
        raise InsufficientDataError(
            f"need at least 2 sample rows, got {len(rows)}")
    return np.array(rows, dtype=float)


def estimate_moments(samples) -> tuple[np.ndarray, np.ndarray]:
    """Column means and unbiased (divisor s-1) sample covariance,
    symmetrized after computation."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2:
        raise DimensionError("samples must be a 2-d matrix")
    s = samples.shape[0]
    if s < 2:
        raise InsufficientDataError("moment estimation needs at least 2 samples")
    mu = samples.mean(axis=0)
    centered = samples - mu
    sigma = centered.T @ centered / (s - 1)
    sigma = 0.5 * (sigma + sigma.T)
    return mu, sigma


def factor_covariance(sigma, tol: float = 1e-8) -> np.ndarray:
    """Square-root factor L with L @ L.T == sigma.

    Uses a symmetric eigendecomposition so PSD-but-singular matrices are
    handled; eigenvalues in [-1e-10, 0] (relative) are clipped to zero.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise DimensionError("covariance must be square")
    if not np.allclose(sigma, sigma.T, atol=1e-8 * max(1.0, np.abs(sigma).max())):
        raise NotPsdError("covariance must be symmetric")
    sym = 0.5 * (sigma + sigma.T)
    w, v = np.linalg.eigh(sym)
    scale = max(1.0, float(w.max(initial=0.0)))
    if w.min(initial=0.0) < -tol * scale:
        raise NotPsdError(
            f"matrix has eigenvalue {w.min():.3e} below -{tol:.0e} tolerance")
    w = np.clip(w, 0.0, None)
    return v * np.sqrt(w)
