"""Physical parameters, derived scales and the particle <-> CM wavenumber map.

Two particles of masses ``m1``, ``m2`` bound by a harmonic force of angular
frequency ``omega``; the centre of mass starts in a Gaussian packet of width
``B`` and mean wavenumber ``K``.  Everything here is an immutable value and
every function is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


class ParameterError(ValueError):
    """Raised for physical inputs outside their domain."""


@dataclass(frozen=True)
class SystemParams:
    m1: float
    m2: float
    omega: float
    B: float
    K: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("m1", "m2", "omega", "B", "hbar"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ParameterError(f"{name} must be a positive finite number, got {value!r}")
        if not math.isfinite(self.K):
            raise ParameterError(f"K must be finite, got {self.K!r}")

    @property
    def M(self) -> float:
        return self.m1 + self.m2

    @property
    def mu(self) -> float:
        return self.m1 * self.m2 / (self.m1 + self.m2)

    @property
    def b(self) -> float:
        """Oscillator length sqrt(hbar / (mu * omega))."""
        return math.sqrt(self.hbar / (self.mu * self.omega))

    def swapped(self) -> "SystemParams":
        """The same system with the particle labels exchanged."""
        return replace(self, m1=self.m2, m2=self.m1)


@dataclass(frozen=True)
class DerivedScales:
    M: float
    mu: float
    b: float
    B0: float
    tau_B: float
    tau: float
    alpha: float
    beta: float

    @property
    def tau_ratio(self) -> float:
        return self.tau / self.tau_B


def derive_scales(params: SystemParams) -> DerivedScales:
    """Compute every derived length and time scale for ``params``.

    ``B0`` is the CM width at which the t=0 state factorises in particle
    variables, ``tau_B`` the spreading time of the CM packet and ``tau``
    the time scale of the linear-entropy growth.
    """
    M = params.M
    mu = params.mu
    b = params.b
    B = params.B
    B0 = b * math.sqrt(mu / M)
    tau_B = M * B**2 / params.hbar
    s1 = (params.m1 * b / (M * B)) ** 2
    s2 = (params.m2 * b / (M * B)) ** 2
    tau = tau_B * math.sqrt((1.0 + s1) * (1.0 + s2))
    return DerivedScales(
        M=M,
        mu=mu,
        b=b,
        B0=B0,
        tau_B=tau_B,
        tau=tau,
        alpha=params.m1 / params.m2,
        beta=B / b,
    )


def from_dimensionless(
    alpha: float,
    beta: float,
    *,
    M: float = 1.0,
    omega: float = 1.0,
    hbar: float = 1.0,
    K: float = 0.0,
) -> SystemParams:
    """Build dimensional parameters from the mass ratio and the width ratio B/b.

    The total mass ``M`` sets the scale.
    """
    if not (alpha > 0 and math.isfinite(alpha)):
        raise ParameterError(f"alpha must be positive, got {alpha!r}")
    if not (beta > 0 and math.isfinite(beta)):
        raise ParameterError(f"beta must be positive, got {beta!r}")
    if not M > 0:
        raise ParameterError(f"M must be positive, got {M!r}")
    m1 = M * alpha / (1.0 + alpha)
    m2 = M / (1.0 + alpha)
    mu = m1 * m2 / M
    if not (omega > 0 and hbar > 0):
        raise ParameterError("omega and hbar must be positive")
    b = math.sqrt(hbar / (mu * omega))
    return SystemParams(m1=m1, m2=m2, omega=omega, B=beta * b, K=K, hbar=hbar)


def factorizing_params(params: SystemParams) -> SystemParams:
    """Copy of ``params`` with the CM width tuned to ``B0``."""
    return replace(params, B=derive_scales(params).B0)


def to_cm(k1, k2, params: SystemParams):
    """Particle wavenumbers -> (total ``kappa``, relative ``xi``).

    Works elementwise on numpy arrays.
    """
    M = params.M
    return k1 + k2, (params.m1 * k2 - params.m2 * k1) / M


def to_particle(kappa, xi, params: SystemParams):
    """Inverse of :func:`to_cm`."""
    M = params.M
    return params.m1 * kappa / M - xi, params.m2 * kappa / M + xi


def boost(params: SystemParams, zeta: float) -> SystemParams:
    """Shift the mean CM wavenumber by ``zeta``."""
    return replace(params, K=params.K + zeta)
