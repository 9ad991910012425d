"""Distributional assumptions, worst-case quantile factors and uncertainty
margins.

The quantile factor f_inv(assumption, eps) is the amount of standard
deviations a constraint must back off from its limit so that it holds with
probability at least 1 - eps under every distribution in the assumed
family:

  normal              inverse standard-normal CDF
  student_t(nu)       unit-variance scaled Student-t quantile,
                      sqrt((nu-2)/nu) * T_nu^-1(1-eps)
  symmetric_unimodal  Gauss tail bound
  unimodal            one-sided Vysochanskij-Petunin bound
  mean_covariance     Cantelli bound, sqrt((1-eps)/eps)
  deterministic       0 (uncertainty ignored)

Values are clamped at zero: a negative factor would loosen the nominal
constraint, which the security-margin interpretation does not intend.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DimensionError, DomainError

KINDS = ("deterministic", "normal", "student_t", "symmetric_unimodal",
         "unimodal", "mean_covariance")

#: Assumption order used in reports: deterministic first, then decreasing
#: distributional knowledge.
REPORT_ORDER = KINDS

DEFAULT_DOF = 4.0


@dataclass(frozen=True)
class DistributionAssumption:
    kind: str
    dof: float | None = None       # degrees of freedom, student_t only

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown assumption {self.kind!r}; "
                              f"expected one of {KINDS}")
        if self.kind == "student_t":
            if self.dof is None:
                object.__setattr__(self, "dof", DEFAULT_DOF)
            if self.dof <= 2:
                raise DomainError(
                    "student_t needs dof > 2 for unit-variance scaling")
        elif self.dof is not None:
            raise DomainError(f"{self.kind} takes no degrees of freedom")

    @property
    def name(self) -> str:
        if self.kind == "student_t":
            return f"student_t({self.dof:g})"
        return self.kind


def parse_assumption(name: str, dof: float | None = None) -> DistributionAssumption:
    """Parse 'student_t(4)' style names; an explicit dof argument wins."""
    m = re.fullmatch(r"student_t\(([^)]+)\)", name.strip())
    if m:
        return DistributionAssumption("student_t",
                                      dof if dof is not None else float(m.group(1)))
    kind = name.strip()
    if kind == "student_t":
        return DistributionAssumption("student_t", dof)
    return DistributionAssumption(kind)


def f_inv(assumption: DistributionAssumption, eps: float) -> float:
    """Worst-case quantile factor for violation probability eps in (0, 1)."""
    if not (0.0 < eps < 1.0):
        raise DomainError(f"eps must be in (0, 1), got {eps}")
    kind = assumption.kind
    if kind == "deterministic":
        return 0.0
    if kind == "normal":
        return max(0.0, float(special.ndtri(1.0 - eps)))
    if kind == "student_t":
        nu = assumption.dof
        q = float(special.stdtrit(nu, 1.0 - eps))
        return max(0.0, math.sqrt((nu - 2.0) / nu) * q)
    if kind == "symmetric_unimodal":
        if eps <= 1.0 / 6.0:
            return math.sqrt(2.0 / (9.0 * eps))
        if eps < 0.5:
            return math.sqrt(3.0) * (1.0 - 2.0 * eps)
        return 0.0
    if kind == "unimodal":
        if eps <= 1.0 / 6.0:
            return math.sqrt(4.0 / (9.0 * eps) - 1.0)
        return math.sqrt(3.0 * (1.0 - eps) / (1.0 + 3.0 * eps))
    # mean_covariance
    return math.sqrt((1.0 - eps) / eps)


@dataclass(frozen=True)
class UncertaintyMargin:
    """Capacity reduction applied to a constraint limit.

    ``total`` is what an upper limit is reduced by; a lower limit is reduced
    by ``shift - quantile * spread`` instead (the spread widens both sides).
    """

    shift: float       # b . mu, MW
    spread: float      # || b . sigma_sqrt ||_2, MW
    quantile: float    # f_inv(assumption, eps), dimensionless

    @property
    def total(self) -> float:
        return self.shift + self.quantile * self.spread

    @property
    def lower_total(self) -> float:
        return self.shift - self.quantile * self.spread


def margin(b, model, assumption: DistributionAssumption,
           eps: float) -> UncertaintyMargin:
    """Uncertainty margin of a constraint with sensitivity row b (1 x n)."""
    b = np.asarray(b, dtype=float).reshape(-1)
    if b.shape[0] != model.n:
        raise DimensionError(
            f"sensitivity row has length {b.shape[0]}, model has n={model.n}")
    shift = float(b @ model.mu)
    spread = float(np.linalg.norm(b @ model.sigma_sqrt))
    return UncertaintyMargin(shift, spread, f_inv(assumption, eps))
