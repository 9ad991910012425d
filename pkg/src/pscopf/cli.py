"""Command-line front end.

Exit codes: 0 on success (optimal where a solve is involved), 2 when the
problem is infeasible or unbounded, 1 on any input or domain error.

A JSON config file can supply any option (keys named like the long flags,
dashes as underscores); explicitly passed flags win over the file.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import caseio, matpower, network, reports, scopf, validation
from .errors import PscopfError
from .margins import REPORT_ORDER, DistributionAssumption, f_inv, parse_assumption

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_INFEASIBLE = 2


def _fail(message: str) -> "NoReturn":
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_INPUT_ERROR)


def _merge_config(config_path, values: dict) -> dict:
    if not config_path:
        return values
    try:
        cfg = json.loads(Path(config_path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        _fail(f"cannot read config: {exc}")
    merged = dict(values)
    for key, val in cfg.items():
        if merged.get(key) in (None, (), False):
            merged[key] = val
    return merged


def _parse_synthetic(spec: str) -> dict:
    out = {"family": "gaussian", "count": 1000, "scale": 0.2, "rho": 0.4}
    for part in spec.split(","):
        if not part:
            continue
        if "=" not in part:
            _fail(f"synthetic spec item {part!r} is not key=value")
        key, val = part.split("=", 1)
        if key == "family":
            out["family"] = val
        elif key == "count":
            out["count"] = int(val)
        elif key in ("scale", "rho"):
            out[key] = float(val)
        else:
            _fail(f"unknown synthetic spec key {key!r}")
    return out


def _load_case(path):
    if not path:
        _fail("--case is required")
    try:
        return caseio.parse_case(Path(path).read_text())
    except OSError as exc:
        _fail(f"cannot read case file: {exc}")


def _model_and_samples(case, samples_path, synthetic, seed):
    if bool(samples_path) == bool(synthetic):
        _fail("exactly one of --samples / --synthetic is required")
    if samples_path:
        try:
            raw = Path(samples_path).read_text()
        except OSError as exc:
            _fail(f"cannot read samples: {exc}")
        samples = caseio.parse_samples(raw, case.n)
        return caseio.ForecastModel.from_samples(samples), samples
    spec = _parse_synthetic(synthetic)
    model = validation.synthetic_model_from_case(case, spec["scale"], spec["rho"])
    samples = validation.synthesize_samples(model, spec["family"],
                                            spec["count"], seed)
    return model, samples


def _prepare(case, out_dir, dump_matrices):
    cset = network.enumerate_contingencies(case)
    if dump_matrices:
        mat_dir = Path(out_dir) / "matrices"
        mat_dir.mkdir(parents=True, exist_ok=True)
        for k, cont in enumerate(cset.contingencies):
            np.savetxt(mat_dir / f"A_{k:04d}_{cont.kind}.csv",
                       cont.A, delimiter=",")
    return cset


def _write(out_dir, name, text):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)
    click.echo(f"wrote {out / name}")


@click.group()
def main():
    """Chance-constrained DC security-constrained optimal power flow."""


common = [
    click.option("--config", type=click.Path(), help="JSON config file."),
    click.option("--case", "case_path", type=click.Path()),
    click.option("--samples", "samples_path", type=click.Path()),
    click.option("--synthetic", help="family=...,count=...[,scale=][,rho=]"),
    click.option("--assumption", default=None),
    click.option("--eps", type=float, default=None),
    click.option("--dof", type=float, default=None,
                 help="Student-t degrees of freedom (default 4)."),
    click.option("--seed", type=int, default=None),
    click.option("--out", "out_dir", type=click.Path(), default=None),
    click.option("--export-lp", is_flag=True),
    click.option("--dump-matrices", is_flag=True),
]


def _with_common(cmd):
    for deco in reversed(common):
        cmd = deco(cmd)
    return cmd


def _defaults(values: dict) -> dict:
    values.setdefault("eps", 0.1)
    if values["eps"] is None:
        values["eps"] = 0.1
    if values.get("seed") is None:
        values["seed"] = 0
    if values.get("out_dir") is None:
        values["out_dir"] = "."
    if values.get("assumption") is None:
        values["assumption"] = "normal"
    return values


@main.command()
@_with_common
def solve(config, **kw):
    """Solve one pSCOPF instance and write solution.json."""
    kw = _defaults(_merge_config(config, kw))
    try:
        case = _load_case(kw["case_path"])
        assumption = parse_assumption(kw["assumption"], kw.get("dof"))
        model, _ = _model_and_samples(case, kw.get("samples_path"),
                                      kw.get("synthetic"), kw["seed"])
        cset = _prepare(case, kw["out_dir"], kw["dump_matrices"])
        problem = scopf.assemble(case, cset, model, assumption, kw["eps"])
        solution = scopf.solve(problem)
        if kw["export_lp"]:
            _write(kw["out_dir"], "problem.lp", scopf.export_lp_text(problem))
        _write(kw["out_dir"], "solution.json",
               reports.to_json(reports.solution_report(problem, solution)))
    except PscopfError as exc:
        _fail(str(exc))
    if solution.status != "optimal":
        click.echo(f"status: {solution.status}", err=True)
        sys.exit(EXIT_INFEASIBLE)
    click.echo(f"objective: {solution.objective:.6f}")


@main.command()
@_with_common
def compare(config, **kw):
    """Run all six assumptions and write comparison.csv."""
    kw = _defaults(_merge_config(config, kw))
    try:
        case = _load_case(kw["case_path"])
        model, samples = _model_and_samples(case, kw.get("samples_path"),
                                            kw.get("synthetic"), kw["seed"])
        cset = _prepare(case, kw["out_dir"], kw["dump_matrices"])
        rows = validation.compare_assumptions(case, cset, model, kw["eps"],
                                              samples, dof=kw.get("dof"))
        _write(kw["out_dir"], "comparison.csv", reports.comparison_csv(rows))
    except PscopfError as exc:
        _fail(str(exc))
    if any(r.status != "optimal" for r in rows):
        sys.exit(EXIT_INFEASIBLE)


@main.command()
@_with_common
def validate(config, **kw):
    """Solve, replay samples and write violations.csv / violations.json."""
    kw = _defaults(_merge_config(config, kw))
    try:
        case = _load_case(kw["case_path"])
        assumption = parse_assumption(kw["assumption"], kw.get("dof"))
        model, samples = _model_and_samples(case, kw.get("samples_path"),
                                            kw.get("synthetic"), kw["seed"])
        cset = _prepare(case, kw["out_dir"], kw["dump_matrices"])
        problem = scopf.assemble(case, cset, model, assumption, kw["eps"])
        solution = scopf.solve(problem)
        if solution.status != "optimal":
            click.echo(f"status: {solution.status}", err=True)
            sys.exit(EXIT_INFEASIBLE)
        report = validation.empirical_violations(solution, problem, samples)
        _write(kw["out_dir"], "violations.csv", reports.violations_csv(report))
        _write(kw["out_dir"], "violations.json",
               reports.to_json(reports.violations_summary(report)))
    except PscopfError as exc:
        _fail(str(exc))


@main.command()
@click.option("--eps", "eps_values", type=float, multiple=True, required=True)
@click.option("--dof", type=float, default=None)
@click.option("--out", "out_dir", type=click.Path(), default=None)
def margins(eps_values, dof, out_dir):
    """Print the quantile-factor grid (CSV: one row per eps)."""
    try:
        table = {}
        for kind in REPORT_ORDER:
            assumption = DistributionAssumption(
                kind, dof if kind == "student_t" else None)
            table[assumption.name] = [f_inv(assumption, e) for e in eps_values]
    except PscopfError as exc:
        _fail(str(exc))
    text = reports.margins_csv(list(eps_values), table)
    if out_dir:
        _write(out_dir, "margins.csv", text)
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--matpower", "matpower_path", type=click.Path(), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--default-limit", type=float, default=9900.0,
              help="Flow limit for branches with rateA <= 0.")
@click.option("--zero-pmin", is_flag=True, help="Force all p_min to zero.")
def convert(matpower_path, out_path, default_limit, zero_pmin):
    """Convert a MATPOWER-style .m case into the native format."""
    try:
        case = matpower.convert_matpower(Path(matpower_path).read_text(),
                                         default_flow_limit=default_limit,
                                         zero_p_min=zero_pmin)
    except (OSError, PscopfError) as exc:
        _fail(str(exc))
    Path(out_path).write_text(caseio.serialize_case(case))
    click.echo(f"wrote {out_path}")


if __name__ == "__main__":
    main()
