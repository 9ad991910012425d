#!/usr/bin/env python3
"""Regenerate tests/frozen_quantiles.py.

Computes reference normal and Student-t (dof=4, unit-variance scaled)
quantile-factor values by bisection on mpmath CDFs at 50 decimal digits,
independent of the library implementation, and freezes them for the
acceptance suite.
"""

from pathlib import Path

import mpmath as mp

mp.mp.dps = 50

EPS_GRID = ([0.001 * (0.5 / 0.001) ** (i / 24) for i in range(25)] +
            [0.5 + (0.999 - 0.5) * (i / 24) for i in range(25)])
DOF = 4


def normal_cdf(x):
    return 0.5 * mp.erfc(-x / mp.sqrt(2))


def student_t_cdf(x, nu):
    # one-sided incomplete-beta form, reflected for x < 0
    if x < 0:
        return 1 - student_t_cdf(-x, nu)
    z = nu / (nu + x * x)
    return 1 - mp.betainc(nu / 2, mp.mpf(1) / 2, 0, z, regularized=True) / 2


def invert(cdf, p, lo=-60, hi=60, iters=220):
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    for _ in range(iters):
        mid = (lo + hi) / 2
        if cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def main():
    normal = [max(0.0, float(invert(normal_cdf, 1 - mp.mpf(e))))
              for e in EPS_GRID]
    scale = mp.sqrt(mp.mpf(DOF - 2) / DOF)
    student = [max(0.0, float(scale * invert(
        lambda x: student_t_cdf(x, DOF), 1 - mp.mpf(e)))) for e in EPS_GRID]
    out = Path(__file__).resolve().parents[1] / "tests" / "frozen_quantiles.py"
    lines = [
        '"""Frozen quantile-factor reference values.',
        "",
        "Generated by scripts/freeze_quantiles.py: bisection on mpmath CDFs",
        "at 50 decimal digits. Do not edit by hand.",
        '"""',
        "",
        f"EPS_GRID = {EPS_GRID!r}",
        "",
        f"STUDENT_T_DOF = {DOF}",
        "",
        f"NORMAL = {normal!r}",
        "",
        f"STUDENT_T = {student!r}",
        "",
    ]
    out.write_text("\n".join(lines))
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
