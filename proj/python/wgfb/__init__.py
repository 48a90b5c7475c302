"""Solvers for a driven emitter ensemble with measurement feedback."""

from ._wgfb import (
    ComputationError,
    DomainError,
    InvalidParameter,
    UndefinedDirection,
    classify_phase,
    critical_omega,
    evolve_covariance,
    fit_power_law,
    integrate,
    run_config,
    spectral_gap,
    steady_state_xi,
)

__all__ = [
    "ComputationError",
    "DomainError",
    "InvalidParameter",
    "UndefinedDirection",
    "classify_phase",
    "critical_omega",
    "evolve_covariance",
    "fit_power_law",
    "integrate",
    "run_config",
    "spectral_gap",
    "steady_state_xi",
]
