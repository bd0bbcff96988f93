"""Closed-form wavefunctions, density kernels and entanglement measures.

Momentum-space amplitudes are Gaussians in the CM wavenumber ``kappa`` and
the relative wavenumber ``xi``::

    Psi(kappa, xi, t) = C exp(-i hbar kappa^2 t / 2M) exp(-c B^2 (kappa - K)^2)
                          exp(-i omega t / 2) exp(-c b^2 xi^2)

The width coefficient ``c`` and the prefactor ``C`` depend on the Fourier
convention.  ``"fourier"`` (the default) is the unitary transform of the
position-space packet of width ``B`` times the oscillator ground state:
``c = 1/2`` and ``C = sqrt(B b / pi)``, normalised with the plain ``dk1 dk2``
measure.  With it the spreading time of the CM packet is ``M B^2 / hbar``.
``"printed"`` keeps ``c = 2`` and ``C = 4 sqrt(B b / pi)``; that amplitude has
squared norm 4 and spreads on the time scale ``4 M B^2 / hbar``.  It exists
only so the literal kernel formulas can be compared against derivations.

All entropy-type functions accept numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import ParameterError, SystemParams, derive_scales, to_cm

FOURIER = "fourier"
PRINTED = "printed"

# exponent coefficient c of exp(-c B^2 (kappa-K)^2 - c b^2 xi^2)
WIDTH_COEFF = {FOURIER: 0.5, PRINTED: 2.0}


def width_coeff(convention: str = FOURIER) -> float:
    try:
        return WIDTH_COEFF[convention]
    except KeyError:
        raise ValueError(f"unknown convention {convention!r}") from None


def prefactor(params: SystemParams, convention: str = FOURIER) -> float:
    """Amplitude prefactor ``C`` of the momentum-space wavefunction."""
    base = math.sqrt(params.B * params.b / math.pi)
    if convention == FOURIER:
        return base
    if convention == PRINTED:
        return 4.0 * base
    raise ValueError(f"unknown convention {convention!r}")


def psi_position(R, r, params: SystemParams):
    """Initial state in CM/relative position variables (normalised)."""
    B, b = params.B, params.b
    R = np.asarray(R, dtype=float)
    r = np.asarray(r, dtype=float)
    norm = 1.0 / (math.sqrt(math.pi) * math.sqrt(B * b))
    return norm * np.exp(-0.5 * (R / B) ** 2 - 0.5 * (r / b) ** 2 + 1j * params.K * R)


def _log_psi_cm_rel(kappa, xi, t, params, convention):
    c = width_coeff(convention)
    kappa = np.asarray(kappa, dtype=float)
    xi = np.asarray(xi, dtype=float)
    phase = params.hbar * kappa**2 * t / (2.0 * params.M) + 0.5 * params.omega * t
    return (
        math.log(prefactor(params, convention))
        - c * params.B**2 * (kappa - params.K) ** 2
        - c * params.b**2 * xi**2
        - 1j * phase
    )


def psi_cm_rel(kappa, xi, t, params: SystemParams, convention: str = FOURIER):
    """Time-evolved amplitude in CM/relative wavenumbers."""
    return np.exp(_log_psi_cm_rel(kappa, xi, t, params, convention))


def psi_particles(k1, k2, t, params: SystemParams, convention: str = FOURIER):
    """Time-evolved amplitude in particle wavenumbers.

    The Jacobian of the map (k1, k2) -> (kappa, xi) is 1, so no extra factor
    appears.
    """
    kappa, xi = to_cm(np.asarray(k1, dtype=float), np.asarray(k2, dtype=float), params)
    return psi_cm_rel(kappa, xi, t, params, convention)


def full_density(k1, k2, k1p, k2p, t, params: SystemParams, convention: str = FOURIER):
    """rho(k1,k2; k1',k2') as the product Psi(k1,k2) Psi*(k1',k2')."""
    return psi_particles(k1, k2, t, params, convention) * np.conj(
        psi_particles(k1p, k2p, t, params, convention)
    )


def full_density_explicit(k1, k2, k1p, k2p, t, params: SystemParams, convention: str = FOURIER):
    """The same kernel written out as a single exponential."""
    c = width_coeff(convention)
    M, B, b, K = params.M, params.B, params.b, params.K
    k1, k2, k1p, k2p = (np.asarray(v, dtype=float) for v in (k1, k2, k1p, k2p))
    s = k1 + k2
    sp = k1p + k2p
    d = params.m1 * k2 - params.m2 * k1
    dp = params.m1 * k2p - params.m2 * k1p
    expo = (
        -1j * params.hbar * t / (2.0 * M) * (s**2 - sp**2)
        - c * B**2 * ((s - K) ** 2 + (sp - K) ** 2)
        - c * b**2 / M**2 * (d**2 + dp**2)
    )
    return prefactor(params, convention) ** 2 * np.exp(expo)


@dataclass(frozen=True)
class KernelCoefficients:
    """Gaussian kernel ``exp(log_amp + lin_u u + lin_v v + uu u^2 + vv v^2 + uv u v)``.

    ``u = k - k'`` and ``v = k + k'``.  Hermiticity of the kernel is
    equivalent to ``log_amp``, ``uu``, ``vv`` and ``lin_v`` being real and
    ``uv``, ``lin_u`` being purely imaginary.
    """

    log_amp: complex
    lin_u: complex
    lin_v: complex
    uu: complex
    vv: complex
    uv: complex

    def evaluate(self, k, kp):
        k = np.asarray(k, dtype=float)
        kp = np.asarray(kp, dtype=float)
        u = k - kp
        v = k + kp
        return np.exp(
            self.log_amp
            + self.lin_u * u
            + self.lin_v * v
            + self.uu * u**2
            + self.vv * v**2
            + self.uv * u * v
        )

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in ("log_amp", "lin_u", "lin_v", "uu", "vv", "uv")}


def reduced_density_1_coefficients(t, params: SystemParams, convention: str = FOURIER) -> KernelCoefficients:
    """Coefficients of the partial trace over particle 2, by completing the square.

    Setting ``k2 = k2'`` in the full kernel leaves a Gaussian in ``k2`` with
    quadratic coefficient ``a = 2c W / M^2`` where ``W = M^2 B^2 + m1^2 b^2``;
    the integral contributes ``sqrt(pi / a) exp(beta^2 / 4a)``.
    """
    c = width_coeff(convention)
    M, B, b, K, hbar = params.M, params.B, params.b, params.K, params.hbar
    m1, m2, mu = params.m1, params.m2, params.mu
    W = M**2 * B**2 + m1**2 * b**2
    a = 2.0 * c * W / M**2
    mismatch = M * B**2 - mu * b**2
    common = -(c / M**2) * (M**2 * B**2 + m2**2 * b**2) / 2.0
    log_amp = (
        2.0 * math.log(prefactor(params, convention))
        + 0.5 * math.log(math.pi / a)
        - 2.0 * c * B**2 * K**2 * m1**2 * b**2 / W
    )
    return KernelCoefficients(
        log_amp=complex(log_amp),
        lin_u=-1j * hbar * t * M * B**2 * K / W,
        lin_v=complex(2.0 * c * B**2 * K * m1 * M * b**2 / W),
        uu=complex(-(hbar * t) ** 2 / (8.0 * c * W) + common),
        vv=complex(c * mismatch**2 / (2.0 * W) + common),
        uv=-1j * hbar * t * m1 * b**2 / (2.0 * W),
    )


def reduced_density_1(k1, k1p, t, params: SystemParams, convention: str = FOURIER):
    """Reduced density of particle 1, integral of rho(k1,k2;k1',k2) over k2."""
    return reduced_density_1_coefficients(t, params, convention).evaluate(k1, k1p)


def reduced_density_2(k2, k2p, t, params: SystemParams, convention: str = FOURIER):
    """Reduced density of particle 2 (labels exchanged, K unchanged)."""
    return reduced_density_1(k2, k2p, t, params.swapped(), convention)


def printed_reduced_density_1_coefficients(t, params: SystemParams) -> KernelCoefficients:
    """Coefficients of the literal-form particle-1 kernel, transcribed factor by factor.

    This is the literal printed expression (width coefficient 2, prefactor
    ``8 B b M / (pi sqrt(W))``).  It is kept for comparison only.
    """
    M, B, b, K, hbar = params.M, params.B, params.b, params.K, params.hbar
    m1, m2, mu = params.m1, params.m2, params.mu
    W = M**2 * B**2 + m1**2 * b**2
    # exp(-2/M^2 (M^2B^2 + m2^2 b^2)(k^2 + k'^2)), k^2 + k'^2 = (u^2 + v^2)/2
    common = -(2.0 / M**2) * (M**2 * B**2 + m2**2 * b**2) / 2.0
    log_amp = math.log(8.0 * B * b * M / (math.pi * math.sqrt(W))) - 4.0 * K**2 * B**2 * b**2 * m1**2 / W
    return KernelCoefficients(
        log_amp=complex(log_amp),
        lin_u=complex(4.0 * K * B**2),
        lin_v=complex(2.0 * K * B**2 * M * (mu * b**2 - M * B**2) / W),
        uu=complex(-(hbar * t) ** 2 / (16.0 * W) + common),
        vv=complex((mu * b**2 - M * B**2) ** 2 / W + common),
        uv=-1j * hbar * t / 2.0 * (m1 * b**2 / W),
    )


def reduced_density_1_printed(k1, k1p, t, params: SystemParams):
    return printed_reduced_density_1_coefficients(t, params).evaluate(k1, k1p)


def redens1_findings(t, params: SystemParams, rtol: float = 1e-12) -> list[dict]:
    """Term-by-term comparison of the printed particle-1 kernel with the derivation.

    Both sides use the printed convention so that only genuine algebraic
    differences show up.  Each entry names a coefficient, the two values and
    whether they agree.
    """
    derived = reduced_density_1_coefficients(t, params, PRINTED).as_dict()
    printed = printed_reduced_density_1_coefficients(t, params).as_dict()
    notes = {
        "log_amp": "log of prefactor times the K^2 Gaussian factor",
        "lin_u": "coefficient of (k1 - k1')",
        "lin_v": "coefficient of (k1 + k1')",
        "uu": "coefficient of (k1 - k1')^2",
        "vv": "coefficient of (k1 + k1')^2",
        "uv": "coefficient of (k1^2 - k1'^2)",
    }
    findings = []
    for name, note in notes.items():
        d, p = derived[name], printed[name]
        scale = max(abs(d), abs(p), 1e-300)
        findings.append(
            {
                "term": name,
                "description": note,
                "printed": [p.real, p.imag],
                "derived": [d.real, d.imag],
                "match": bool(abs(d - p) <= rtol * scale or (d == 0 and p == 0)),
            }
        )
    return findings


def _validate_dimensionless(alpha, beta):
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if np.any(~(alpha > 0)) or np.any(~(beta > 0)):
        raise ParameterError("alpha and beta must be positive")
    return alpha, beta


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def width_mismatch(alpha, beta):
    """``y = beta - x / beta`` with ``x = alpha / (1 + alpha)^2``.

    ``1 - Delta_0 = (1 + y^2)^(-1/2)``; ``y`` vanishes on the factorising
    manifold.  Written as a product of differences so that the zero is
    reproduced without cancellation.
    """
    alpha, beta = _validate_dimensionless(alpha, beta)
    root = np.sqrt(alpha) / (1.0 + alpha)
    return (beta - root) * (beta + root) / beta


def initial_linear_entropy(alpha, beta):
    """Linear entropy at t=0 as a function of m1/m2 and B/b."""
    y = width_mismatch(alpha, beta)
    return _scalar(-np.expm1(-0.5 * np.log1p(y**2)))


def tau_ratio(alpha, beta):
    """tau / tau_B = (b/B) / (1 - Delta_0)."""
    alpha, beta = _validate_dimensionless(alpha, beta)
    y = width_mismatch(alpha, beta)
    return _scalar(np.sqrt(1.0 + y**2) / beta)


def tau_ratio_from_masses(alpha, beta):
    """tau / tau_B from the product form sqrt((1 + p1^2/beta^2)(1 + p2^2/beta^2))."""
    alpha, beta = _validate_dimensionless(alpha, beta)
    p1 = alpha / (1.0 + alpha)
    p2 = 1.0 / (1.0 + alpha)
    return _scalar(np.sqrt((1.0 + (p1 / beta) ** 2) * (1.0 + (p2 / beta) ** 2)))


def tau_ratio_printed_bracket(alpha, beta):
    """The bracket ``(1 - x/beta^2)^2 + 1/beta^2`` as printed for tau/tau_B.

    It equals the square of :func:`tau_ratio`, not the ratio itself.
    """
    alpha, beta = _validate_dimensionless(alpha, beta)
    x = alpha / (1.0 + alpha) ** 2
    return _scalar((1.0 - x / beta**2) ** 2 + 1.0 / beta**2)


def ttb_findings(samples=((1.0, 1.0), (4.0, 0.4), (0.3, 2.0), (10.0, 0.7))) -> list[dict]:
    out = []
    for alpha, beta in samples:
        ratio = tau_ratio(alpha, beta)
        bracket = tau_ratio_printed_bracket(alpha, beta)
        out.append(
            {
                "alpha": alpha,
                "beta": beta,
                "tau_ratio": ratio,
                "printed_bracket": bracket,
                "bracket_equals_ratio": bool(abs(bracket - ratio) <= 1e-12 * ratio),
                "bracket_equals_ratio_squared": bool(abs(bracket - ratio**2) <= 1e-12 * ratio**2),
            }
        )
    return out


def tau_entanglement(params: SystemParams) -> float:
    """Characteristic time of the linear-entropy growth."""
    return derive_scales(params).tau


def linear_entropy(t, params: SystemParams):
    """Delta(t) = 1 - (b/B)(tau_B/tau) (1 + t^2/tau^2)^(-1/2).

    Even in ``t`` and independent of ``K``.
    """
    sc = derive_scales(params)
    y = width_mismatch(sc.alpha, sc.beta)
    t = np.asarray(t, dtype=float)
    log_purity = -0.5 * (np.log1p(y**2) + np.log1p((t / sc.tau) ** 2))
    return _scalar(-np.expm1(log_purity))


def zero_entropy_mass_ratios(beta: float):
    """Mass ratios m1/m2 at which Delta_0 vanishes for the given B/b.

    Returns ``(alpha_minus, alpha_plus)`` for ``beta <= 0.5`` and ``None``
    otherwise.  The roots are ``(1 -+ s)/(1 +- s)`` with
    ``s = sqrt(1 - 4 beta^2)``, evaluated without subtracting nearby numbers.
    """
    if not beta > 0:
        raise ParameterError(f"beta must be positive, got {beta!r}")
    if beta > 0.5:
        return None
    s = math.sqrt(max(0.0, 1.0 - 4.0 * beta * beta))
    one_minus_s = 4.0 * beta * beta / (1.0 + s)
    return one_minus_s / (1.0 + s), (1.0 + s) / one_minus_s
