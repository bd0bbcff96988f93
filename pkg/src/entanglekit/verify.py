"""Invariant suite behind ``entanglekit verify``.

Every check returns a plain dict with ``name``, ``passed`` and numeric
details.  Known discrepancies in the literal-form kernels are listed as
informational entries that never fail the run.
"""

from __future__ import annotations

import math

import numpy as np

from . import analytic, oracle
from .landscape import classify_extremum_at_unit_alpha, preset_sweep
from .params import boost, derive_scales, from_dimensionless

FAULTS = ("lambda-scale",)


def _check(name, passed, **detail):
    return {"name": name, "passed": bool(passed), **detail}


def check_normalization(n, fault=None):
    wave = oracle.oracle_state(from_dimensionless(1.0, 1.0), 0.0, n)
    lam = oracle.schmidt_decompose(wave).lambdas
    if fault == "lambda-scale":
        lam = lam * 0.99
    total = float(np.sum(lam))
    return _check("schmidt_normalization", abs(total - 1.0) <= 1e-10, sum_lambda=total, tol=1e-10)


def check_oracle_vs_analytic(n, rng, samples=5):
    worst = 0.0
    points = []
    for _ in range(samples):
        alpha = float(np.exp(rng.uniform(math.log(0.1), math.log(10.0))))
        beta = float(rng.uniform(0.2, 3.0))
        p = from_dimensionless(alpha, beta)
        t = float(rng.uniform(0.0, 5.0)) * derive_scales(p).tau_B
        d_or = oracle.oracle_linear_entropy(p, t, n)
        d_an = analytic.linear_entropy(t, p)
        rel = abs(d_or - d_an) / d_an
        worst = max(worst, rel)
        points.append([alpha, beta, t, d_an, d_or])
    return _check("oracle_vs_analytic", worst < 1e-4, max_rel_dev=worst, tol=1e-4, points=points)


def check_zero_manifold(n):
    worst_an = worst_or = 0.0
    for alpha in (0.05, 0.3, 1.0, 4.0, 20.0):
        beta = math.sqrt(alpha) / (1.0 + alpha)
        worst_an = max(worst_an, analytic.initial_linear_entropy(alpha, beta))
        worst_or = max(worst_or, oracle.oracle_linear_entropy(from_dimensionless(alpha, beta), 0.0, n))
    passed = worst_an < 1e-14 and worst_or < 1e-6
    return _check("zero_entanglement_manifold", passed, max_analytic=worst_an, max_oracle=worst_or)


def check_k_invariance(n):
    p = from_dimensionless(2.0, 0.8)
    sc = derive_scales(p)
    t = sc.tau
    boosted = boost(p, 7.0 / sc.b)
    lam0 = oracle.schmidt_decompose(oracle.oracle_state(p, t, n)).lambdas[:10]
    lam1 = oracle.schmidt_decompose(oracle.oracle_state(boosted, t, n)).lambdas[:10]
    dev = float(np.max(np.abs(lam0 - lam1)))
    exact = analytic.linear_entropy(t, p) == analytic.linear_entropy(t, boosted)
    return _check("k_invariance", dev < 1e-6 and exact, max_lambda_dev=dev, analytic_exact=exact)


def check_equal_spectra(n):
    p = from_dimensionless(3.0, 0.9)
    wave = oracle.oracle_state(p, derive_scales(p).tau, n)
    e1 = oracle.eigen_spectrum(oracle.partial_trace(wave, 1))[:10]
    e2 = oracle.eigen_spectrum(oracle.partial_trace(wave, 2))[:10]
    dev = float(np.max(np.abs(e1 - e2)))
    return _check("equal_reduced_spectra", dev < 1e-8, max_dev=dev, tol=1e-8)


def check_reconstruction(n):
    worst = 0.0
    for alpha, beta, s in ((1.0, 1.0, 0.0), (0.2, 0.4, 1.0), (5.0, 2.0, 3.0)):
        p = from_dimensionless(alpha, beta)
        res = oracle.schmidt_decompose(oracle.oracle_state(p, s * derive_scales(p).tau_B, n))
        worst = max(worst, res.recon_residual)
    return _check("schmidt_reconstruction", worst < 1e-8, max_residual=worst, tol=1e-8)


def check_idempotency():
    wave = oracle.oracle_state(from_dimensionless(1.0, 1.0), 0.7, 48)
    res = oracle.idempotency_check(wave, explicit=True)
    return _check("idempotency", res < 1e-10, residual=res, tol=1e-10)


def check_extrema():
    betas = np.linspace(0.025, 0.5, 20)
    worst_prod = worst_d0 = 0.0
    for beta in betas:
        am, ap = analytic.zero_entropy_mass_ratios(float(beta))
        worst_prod = max(worst_prod, abs(am * ap - 1.0))
        worst_d0 = max(worst_d0, analytic.initial_linear_entropy(am, beta), analytic.initial_linear_entropy(ap, beta))
    classes = {b: classify_extremum_at_unit_alpha(b) for b in (0.4, 0.5, 0.6)}
    passed = (
        worst_prod < 1e-10
        and worst_d0 < 1e-12
        and classes == {0.4: "max", 0.5: "flat4", 0.6: "min"}
        and analytic.zero_entropy_mass_ratios(0.6) is None
    )
    return _check(
        "extrema_algebra",
        passed,
        max_product_dev=worst_prod,
        max_delta0_at_roots=worst_d0,
        classification={str(k): v for k, v in classes.items()},
    )


def fourth_order_slope(beta=0.5, lo=1e-3, hi=1e-1, points=21):
    x = np.logspace(math.log10(lo), math.log10(hi), points)
    d0 = np.asarray(analytic.initial_linear_entropy(1.0 + x, beta))
    slope, _ = np.polyfit(np.log(x), np.log(d0), 1)
    return float(slope)


def check_fourth_order():
    slope = fourth_order_slope()
    return _check("fourth_order_zero", abs(slope - 4.0) <= 0.1, slope=slope, tol=0.1)


def check_limits():
    p = from_dimensionless(1.0, 1e-3)
    tau = analytic.tau_entanglement(p)
    limit = p.mu * p.b**2 / p.hbar
    rel = abs(tau - limit) / limit
    wide = analytic.tau_ratio(1.0, 100.0) - 1.0
    narrow = analytic.tau_ratio(1.0, 0.1)
    passed = rel < 1e-5 and 0 <= wide < 1e-3 and abs(narrow - 26.0) < 1e-9
    return _check(
        "timescale_limits",
        passed,
        tau_small_B_rel_dev=rel,
        inverse_omega=1.0 / p.omega,
        tau_ratio_beta100_minus_1=wide,
        tau_ratio_beta0p1=narrow,
    )


def check_consistency():
    worst = 0.0
    for name in ("fig1", "fig2"):
        table = preset_sweep(name)
        worst = max(worst, float(np.max(np.abs(table.tau_ratio * (1.0 - table.delta0) * table.beta - 1.0))))
    return _check("ttb_identity", worst < 1e-12, max_dev=worst, tol=1e-12)


def informational():
    p = from_dimensionless(2.0, 0.7, K=1.5)
    t = derive_scales(p).tau
    redens = analytic.redens1_findings(t, p)
    ttb = analytic.ttb_findings()
    return [
        {
            "name": "printed_reduced_density_1",
            "summary": "terms of the printed particle-1 kernel that differ from the Gaussian partial trace",
            "mismatched_terms": [f["term"] for f in redens if not f["match"]],
            "terms": redens,
        },
        {
            "name": "printed_tau_ratio_bracket",
            "summary": "printed right-hand bracket equals (tau/tau_B)^2, not tau/tau_B",
            "bracket_is_square": all(f["bracket_equals_ratio_squared"] for f in ttb),
            "samples": ttb,
        },
    ]


def run_all(n: int = 128, seed: int = 0, fault: str | None = None) -> dict:
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}; choose from {FAULTS}")
    rng = np.random.default_rng(seed)
    checks = [
        check_normalization(n, fault),
        check_oracle_vs_analytic(n, rng),
        check_zero_manifold(n),
        check_k_invariance(n),
        check_equal_spectra(n),
        check_reconstruction(n),
        check_idempotency(),
        check_extrema(),
        check_fourth_order(),
        check_limits(),
        check_consistency(),
    ]
    return {
        "passed": all(c["passed"] for c in checks),
        "n": n,
        "seed": seed,
        "fault": fault,
        "checks": checks,
        "informational": informational(),
    }
