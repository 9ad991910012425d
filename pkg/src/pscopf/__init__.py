"""Chance-constrained DC security-constrained optimal power flow.

Solves the N-1 secure DC OPF with probabilistic generation and line-flow
limits, reformulated as a linear program through precomputed uncertainty
margins under six distributional assumptions, and validates solutions by
replaying forecast-error samples.
"""

from .caseio import (
    ForecastModel,
    NetworkCase,
    estimate_moments,
    factor_covariance,
    parse_case,
    parse_samples,
    serialize_case,
)
from .margins import DistributionAssumption, UncertaintyMargin, f_inv, margin
from .network import ContingencySet, build_flow_matrix, enumerate_contingencies, participation_vector
from .scopf import ScopfProblem, ScopfSolution, assemble, solve, solve_deterministic
from .validation import (
    compare_assumptions,
    empirical_margin,
    empirical_violations,
    synthesize_samples,
    synthetic_model_from_case,
)

__version__ = "0.1.0"

__all__ = [
    "ContingencySet",
    "DistributionAssumption",
    "ForecastModel",
    "NetworkCase",
    "ScopfProblem",
    "ScopfSolution",
    "UncertaintyMargin",
    "assemble",
    "build_flow_matrix",
    "compare_assumptions",
    "empirical_margin",
    "empirical_violations",
    "enumerate_contingencies",
    "estimate_moments",
    "f_inv",
    "factor_covariance",
    "margin",
    "parse_case",
    "parse_samples",
    "participation_vector",
    "serialize_case",
    "solve",
    "solve_deterministic",
    "synthesize_samples",
    "synthetic_model_from_case",
]
