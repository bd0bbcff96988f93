"""Entanglement dynamics of two harmonically bound particles with a free Gaussian centre of mass."""

from .analytic import (
    initial_linear_entropy,
    linear_entropy,
    tau_entanglement,
    tau_ratio,
    zero_entropy_mass_ratios,
)
from .oracle import schmidt_decompose
from .params import ParameterError, SystemParams, boost, derive_scales, from_dimensionless

__all__ = [
    "ParameterError",
    "SystemParams",
    "boost",
    "derive_scales",
    "from_dimensionless",
    "initial_linear_entropy",
    "linear_entropy",
    "schmidt_decompose",
    "tau_entanglement",
    "tau_ratio",
    "zero_entropy_mass_ratios",
]
