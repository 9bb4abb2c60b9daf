"""Nonlocal Fisher-KPP with fat-tailed kernels and its Hamilton-Jacobi limit."""

from ._fatkpp import (
    DiscreteKernel,
    FatkppError,
    Grid,
    Hamiltonian,
    Kernel,
    MutationKernel,
    emit_svg_plot,
    example_inclusion_radius,
    gamma_loc,
    phi_envelope,
    rightmost_crossing,
    run_config,
    simulate,
    solve_hj,
    theta1,
    validate_hypotheses,
)

__all__ = [
    "DiscreteKernel",
    "FatkppError",
    "Grid",
    "Hamiltonian",
    "Kernel",
    "MutationKernel",
    "emit_svg_plot",
    "example_inclusion_radius",
    "gamma_loc",
    "phi_envelope",
    "rightmost_crossing",
    "run_config",
    "simulate",
    "solve_hj",
    "theta1",
    "validate_hypotheses",
]
