import math

import numpy as np
import pytest

from pscopf.caseio import ForecastModel
from pscopf.errors import DimensionError, DomainError
from pscopf.margins import (
    KINDS,
    REPORT_ORDER,
    DistributionAssumption,
    UncertaintyMargin,
    f_inv,
    margin,
    parse_assumption,
)

import oracles

A = DistributionAssumption


def test_kind_catalogue():
    assert KINDS == ("deterministic", "normal", "student_t",
                     "symmetric_unimodal", "unimodal", "mean_covariance")
    assert REPORT_ORDER[0] == "deterministic"


def test_assumption_validation():
    assert A("student_t").dof == 4.0
    assert A("student_t", 6.0).name == "student_t(6)"
    assert A("normal").name == "normal"
    with pytest.raises(DomainError):
        A("gaussian")
    with pytest.raises(DomainError):
        A("student_t", 2.0)
    with pytest.raises(DomainError):
        A("normal", 4.0)


def test_parse_assumption():
    assert parse_assumption("student_t(6)") == A("student_t", 6.0)
    assert parse_assumption("student_t") == A("student_t", 4.0)
    assert parse_assumption("student_t(6)", dof=8.0).dof == 8.0
    assert parse_assumption(" unimodal ") == A("unimodal")
    with pytest.raises(DomainError):
        parse_assumption("weird")


def test_known_factor_values():
    assert f_inv(A("deterministic"), 0.1) == 0.0
    assert f_inv(A("mean_covariance"), 0.5) == pytest.approx(1.0)
    assert f_inv(A("mean_covariance"), 0.1) == pytest.approx(3.0)
    assert f_inv(A("symmetric_unimodal"), 0.1) == pytest.approx(
        math.sqrt(2.0 / 0.9))
    assert f_inv(A("unimodal"), 0.1) == pytest.approx(math.sqrt(4.0 / 0.9 - 1))
    # clamping: never loosen a constraint
    assert f_inv(A("normal"), 0.7) == 0.0
    assert f_inv(A("symmetric_unimodal"), 0.6) == 0.0
    assert f_inv(A("student_t"), 0.9) == 0.0


def test_factors_match_tail_bound_oracles():
    for kind in ("symmetric_unimodal", "unimodal", "mean_covariance"):
        for eps in (0.01, 0.05, 1 / 6, 0.2, 0.3, 0.49):
            assert f_inv(A(kind), eps) == pytest.approx(
                oracles.invert_tail(kind, eps), abs=1e-9)


def test_domain_errors():
    for eps in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(DomainError):
            f_inv(A("normal"), eps)


def test_monotone_in_eps():
    grid = np.linspace(0.002, 0.998, 300)
    for kind in KINDS:
        vals = [f_inv(A(kind), e) for e in grid]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
        assert all(v >= 0.0 for v in vals)


def test_family_ordering():
    # more distributional knowledge, smaller factor
    for eps in (0.01, 0.05, 0.1):
        assert f_inv(A("normal"), eps) <= f_inv(A("symmetric_unimodal"), eps)
        assert f_inv(A("symmetric_unimodal"), eps) <= f_inv(A("unimodal"), eps)
        assert f_inv(A("unimodal"), eps) <= f_inv(A("mean_covariance"), eps)


def test_margin_arithmetic():
    model = ForecastModel.from_moments(
        [1.0, -2.0], [[4.0, 1.0], [1.0, 9.0]])
    m = margin([1.0, 0.0], model, A("mean_covariance"), 0.5)
    assert m.shift == pytest.approx(1.0)
    assert m.spread == pytest.approx(2.0)       # sqrt(b sigma b')
    assert m.quantile == pytest.approx(1.0)
    assert m.total == pytest.approx(3.0)
    assert m.lower_total == pytest.approx(-1.0)
    with pytest.raises(DimensionError):
        margin([1.0, 0.0, 0.0], model, A("normal"), 0.1)


def test_uncertainty_margin_is_frozen_value():
    m = UncertaintyMargin(1.0, 2.0, 3.0)
    assert (m.total, m.lower_total) == (7.0, -5.0)
