"""Resonance stability coefficients of periodic orbits in the planar circular
restricted three-body problem."""

from ._resorb import (
    __version__,
    Error,
    DomainError,
    CollisionError,
    ConvergenceError,
    DelaunayState,
    PolarState,
    RtbpState,
    ResonantFamily,
    CoefficientResult,
    LeadingCoefficient,
    solve_kepler,
    true_anomaly,
    delaunay_to_polar,
    polar_to_delaunay,
    polar_to_cartesian_rotating,
    cartesian_rotating_to_polar,
    canonical_families,
    compute_C,
    min_delta1,
    leading_coefficient,
    coefficient_series,
    laplace_b,
    bessel_j,
    multiplier_estimate,
    lc_forward,
    lc_inverse,
    action_angle,
)

__all__ = [name for name in dir() if not name.startswith("_")]
