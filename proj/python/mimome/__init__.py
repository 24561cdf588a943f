"""Ergodic secrecy rates of Rayleigh MIMOME wiretap channels. Rates are in nats."""

from mimome._core import (
    ChannelSpec,
    ConstraintError,
    DomainError,
    InputError,
    SampleSet,
    SolverError,
    barrier_objective,
    capacity_misose_per_antenna,
    capacity_total,
    gradient,
    hessian,
    optimize,
    property_suite,
    sample,
    scalar_closed_form_rate,
    scalar_quadrature_rate,
    secrecy_rate,
    transformed_rate,
)

__all__ = [
    "ChannelSpec",
    "ConstraintError",
    "DomainError",
    "InputError",
    "SampleSet",
    "SolverError",
    "barrier_objective",
    "capacity_misose_per_antenna",
    "capacity_total",
    "gradient",
    "hessian",
    "optimize",
    "property_suite",
    "sample",
    "scalar_closed_form_rate",
    "scalar_quadrature_rate",
    "secrecy_rate",
    "transformed_rate",
]
