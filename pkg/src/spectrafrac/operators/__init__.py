"""
Potentials, Jacobi truncations and spectral measures for spectrafrac
"""

from .potentials import (
    ExplicitPotential,
    InterpolatedPotential,
    JacobiTruncation,
    LimitPeriodicPotential,
    OdometerState,
    PeriodicPotential,
    PotentialSpec,
    RandomPotential,
    SamplingFunction,
    build_truncation,
    operator_distance,
    potential_distance,
    sample_potential,
)
from .spectral import SpectralRequest, SpectralResult, green_density, spectral_measure, spectrum_support

__all__ = [
    "ExplicitPotential", "PeriodicPotential", "RandomPotential", "LimitPeriodicPotential",
    "InterpolatedPotential", "PotentialSpec", "OdometerState", "SamplingFunction",
    "JacobiTruncation", "build_truncation", "sample_potential", "potential_distance", "operator_distance",
    "SpectralRequest", "SpectralResult", "spectral_measure", "green_density", "spectrum_support",
]
