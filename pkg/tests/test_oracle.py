import math
from dataclasses import replace

import numpy as np
import pytest

from entanglekit import oracle
from entanglekit.analytic import linear_entropy, psi_particles, reduced_density_1, reduced_density_2
from entanglekit.oracle import (
    GridError,
    GridSpec,
    WaveMatrix,
    build_grid,
    entropies_from_spectrum,
    idempotency_check,
    oracle_state,
    partial_trace,
    partner_mode,
    sample_wave,
    schmidt_decompose,
)
from entanglekit.params import boost, derive_scales, factorizing_params, from_dimensionless


@pytest.fixture(scope="module")
def entangled():
    """alpha = beta = 1 sampled at t = tau on a 256 grid."""
    p = from_dimensionless(1.0, 1.0)
    return p, oracle_state(p, derive_scales(p).tau, 256)


def test_grid_centres_follow_momentum():
    p = from_dimensionless(2.0, 0.7, K=3.0)
    g = build_grid(p, 0.0, 64)
    assert g.k1_center == pytest.approx(2.0 / 3.0 * 3.0)
    assert g.k2_center == pytest.approx(1.0 / 3.0 * 3.0)
    w = sample_wave(p, 0.0, g)
    K1, K2 = np.meshgrid(g.k1, g.k2, indexing="ij")
    prob = np.abs(w.values) ** 2
    assert np.sum(prob * K1) == pytest.approx(g.k1_center, abs=1e-8)
    assert np.sum(prob * K2) == pytest.approx(g.k2_center, abs=1e-8)


def test_grid_symmetric_for_equal_masses():
    g = build_grid(from_dimensionless(1.0, 0.8), 0.0, 32)
    assert g.k1_center == 0.0 and g.k2_center == 0.0
    assert g.k1_halfspan == pytest.approx(g.k2_halfspan, rel=1e-15)


def test_marginal_sigma_matches_samples():
    p = from_dimensionless(0.4, 1.3)
    (_, _), (s1, s2) = oracle.marginal_moments(p)
    g = build_grid(p, 0.0, 128)
    prob = np.abs(sample_wave(p, 2.0, g).values) ** 2
    K1, K2 = np.meshgrid(g.k1, g.k2, indexing="ij")
    assert math.sqrt(np.sum(prob * K1**2)) == pytest.approx(s1, rel=1e-6)
    assert math.sqrt(np.sum(prob * K2**2)) == pytest.approx(s2, rel=1e-6)


@pytest.mark.parametrize("n", [0, 4, 7])
def test_grid_too_small(n):
    with pytest.raises(ValueError):
        build_grid(from_dimensionless(1.0, 1.0), 0.0, n)


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        GridSpec(1024, 0.0, 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        GridSpec(16, 0.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        build_grid(from_dimensionless(1.0, 1.0), 0.0, 32, span_sigmas=3.0)


def test_narrow_grid_raises():
    p = from_dimensionless(1.0, 1.0)
    g = build_grid(p, 0.0, 64)
    narrow = GridSpec(64, 0.0, 0.0, g.k1_halfspan / 4, g.k2_halfspan / 4)
    with pytest.raises(GridError):
        sample_wave(p, 0.0, narrow)


def test_sampled_values_are_weighted_amplitudes():
    p = from_dimensionless(3.0, 0.6, K=0.5)
    w = oracle_state(p, 1.5, 64)
    g = w.grid
    assert w.norm_deficit < 1e-6
    K1, K2 = np.meshgrid(g.k1, g.k2, indexing="ij")
    expected = psi_particles(K1, K2, 1.5, p) * math.sqrt(g.h1 * g.h2)
    np.testing.assert_allclose(w.values * (1.0 - w.norm_deficit), expected, atol=1e-13)


def test_product_state_has_rank_one():
    p = factorizing_params(from_dimensionless(2.0, 1.0))
    res = schmidt_decompose(oracle_state(p, 0.0, 128))
    assert res.rank == 1
    assert res.lambdas[0] == pytest.approx(1.0, abs=1e-12)
    assert res.lambdas[1] < 1e-8
    assert res.entropies.linear < 1e-12 and res.entropies.von_neumann < 1e-10


def test_schmidt_unit_point():
    res = schmidt_decompose(oracle_state(from_dimensionless(1.0, 1.0), 0.0, 256))
    assert res.entropies.linear == pytest.approx(0.2, abs=1e-4)
    assert np.sum(res.lambdas) == pytest.approx(1.0, abs=1e-10)
    assert res.recon_residual < 1e-8
    eye = np.eye(res.rank)
    np.testing.assert_allclose(res.modes1.conj().T @ res.modes1, eye, atol=1e-8)
    np.testing.assert_allclose(res.modes2.conj().T @ res.modes2, eye, atol=1e-8)


def test_schmidt_spectrum_is_geometric_at_unit_point():
    # alpha = beta = 1 at t = 0: lambda_n = (8/9) (1/9)^n
    lam = schmidt_decompose(oracle_state(from_dimensionless(1.0, 1.0), 0.0, 256)).lambdas
    expected = (8.0 / 9.0) * (1.0 / 9.0) ** np.arange(6)
    np.testing.assert_allclose(lam[:6], expected, rtol=0, atol=1e-8)
    assert 1 - np.sum(expected**2) == pytest.approx(0.2, abs=1e-3)


def test_schmidt_rejects_unnormalised():
    w = oracle_state(from_dimensionless(1.0, 1.0), 0.0, 32)
    with pytest.raises(ValueError):
        schmidt_decompose(WaveMatrix(w.grid, 0.9 * w.values))


def test_spectra_agree(entangled):
    _, w = entangled
    lam = schmidt_decompose(w).lambdas[:10]
    e1 = oracle.eigen_spectrum(partial_trace(w, 1))[:10]
    e2 = oracle.eigen_spectrum(partial_trace(w, 2))[:10]
    np.testing.assert_allclose(e1, lam, atol=1e-8)
    np.testing.assert_allclose(e2, lam, atol=1e-8)


def test_partial_trace_properties(entangled):
    _, w = entangled
    for which in (1, 2):
        rho = partial_trace(w, which)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-10)
        np.testing.assert_allclose(rho, rho.conj().T, atol=1e-12)
    with pytest.raises(ValueError):
        partial_trace(w, 3)


def test_partial_trace_matches_kernels():
    p = from_dimensionless(2.0, 0.8, K=0.6)
    t = 1.3
    w = oracle_state(p, t, 256)
    g = w.grid
    X, Xp = np.meshgrid(g.k1, g.k1, indexing="ij")
    assert np.max(np.abs(partial_trace(w, 1) - reduced_density_1(X, Xp, t, p) * g.h1)) < 1e-6
    Y, Yp = np.meshgrid(g.k2, g.k2, indexing="ij")
    assert np.max(np.abs(partial_trace(w, 2) - reduced_density_2(Y, Yp, t, p) * g.h2)) < 1e-6


def test_purity(entangled):
    p, w = entangled
    r1, r2 = partial_trace(w, 1), partial_trace(w, 2)
    assert oracle.purity(r1) == pytest.approx(oracle.purity(r2), abs=1e-8)
    assert oracle.purity(r1) == pytest.approx(1.0 - linear_entropy(derive_scales(p).tau, p), abs=1e-6)
    v = np.zeros(5, dtype=complex)
    v[2] = 1.0
    assert oracle.purity(np.outer(v, v)) == 1.0
    unit = oracle_state(from_dimensionless(1.0, 1.0), 0.0, 256)
    assert oracle.purity(partial_trace(unit, 1)) == pytest.approx(0.8, abs=1e-4)


def test_idempotency():
    w = oracle_state(from_dimensionless(1.0, 1.0), 0.7, 48)
    assert idempotency_check(w, explicit=True) < 1e-10
    assert idempotency_check(w, explicit=False) < 1e-10
    rho = oracle.full_density_matrix(w)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)


def test_idempotency_detects_wrong_norm():
    w = oracle_state(from_dimensionless(1.0, 1.0), 0.0, 32)
    bad = WaveMatrix(w.grid, math.sqrt(0.9) * w.values)
    assert idempotency_check(bad, explicit=False) == pytest.approx(0.09, abs=1e-12)
    # rho^2 - rho = -0.1 rho and |rho|_F = 0.9
    assert idempotency_check(bad, explicit=True) == pytest.approx(0.09, abs=1e-12)


def test_explicit_density_refused_for_large_grids():
    w = oracle_state(from_dimensionless(1.0, 1.0), 0.0, 96)
    with pytest.raises(ValueError):
        oracle.full_density_matrix(w)
    assert idempotency_check(w) < 1e-10


def test_partner_of_product_state_is_particle_two_factor():
    p = factorizing_params(from_dimensionless(0.5, 1.0, K=0.4))
    w = oracle_state(p, 0.0, 128)
    res = schmidt_decompose(w)
    partner = partner_mode(w, res.modes1[:, 0], res.lambdas[0])
    # any slice of a product amplitude along k2 is the particle-2 factor
    g = w.grid
    i = int(np.argmax(np.abs(w.values[:, 0])))
    factor = psi_particles(g.k1[i], g.k2, 0.0, p)
    factor = factor / np.linalg.norm(factor)
    assert oracle.overlap(partner, factor) > 1 - 1e-10


def test_partner_modes_reproduce_svd(entangled):
    _, w = entangled
    res = schmidt_decompose(w)
    rho1 = partial_trace(w, 1)
    rho2 = partial_trace(w, 2)
    vals, vecs = oracle.eigen_decomposition(rho1)
    for n in range(5):
        amp = oracle.partner_amplitude(w, vecs[:, n])
        assert np.linalg.norm(amp) == pytest.approx(math.sqrt(vals[n]), rel=1e-8)
        chi2 = partner_mode(w, vecs[:, n], vals[n])
        assert np.vdot(chi2, rho2 @ chi2).real == pytest.approx(vals[n], rel=1e-8)
        assert oracle.overlap(chi2, res.modes2[:, n]) > 1 - 1e-8


def test_partner_mode_below_threshold():
    w = oracle_state(from_dimensionless(1.0, 1.0), 0.0, 32)
    with pytest.raises(ValueError):
        partner_mode(w, np.ones(32) / math.sqrt(32), 0.0)


def test_projector_helpers():
    a = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    b = np.array([[0.0, 1.0], [1.0, 0.0], [0.0, 0.0]]) * 1j
    assert oracle.projector_distance(a, b) < 1e-15
    assert oracle.projector_distance(a[:, 0], a[:, 1]) == pytest.approx(math.sqrt(2))
    assert oracle.degenerate_groups([0.5, 0.25, 0.25, 0.1]) == [[0], [1, 2], [3]]


def test_momentum_shift_invariance():
    p = from_dimensionless(2.0, 0.8)
    sc = derive_scales(p)
    lam0 = schmidt_decompose(oracle_state(p, sc.tau, 256)).lambdas[:10]
    lam1 = schmidt_decompose(oracle_state(boost(p, 7.0 / sc.b), sc.tau, 256)).lambdas[:10]
    np.testing.assert_allclose(lam1, lam0, atol=1e-6)


def test_grid_convergence():
    p = from_dimensionless(0.5, 1.4)
    t = 2.0 * derive_scales(p).tau_B
    d128 = oracle.oracle_linear_entropy(p, t, 128)
    d256 = oracle.oracle_linear_entropy(p, t, 256)
    assert abs(d128 - d256) < 1e-8


def test_mass_swap_invariance_of_spectrum():
    p = from_dimensionless(3.0, 0.9)
    t = derive_scales(p).tau
    a = schmidt_decompose(oracle_state(p, t, 192)).lambdas[:8]
    b = schmidt_decompose(oracle_state(p.swapped(), t, 192)).lambdas[:8]
    np.testing.assert_allclose(a, b, atol=1e-8)


def test_entropies_from_geometric_spectrum():
    q = 0.3
    lam = (1 - q) * q ** np.arange(200)
    e = entropies_from_spectrum(lam)
    purity = (1 - q) ** 2 / (1 - q**2)
    assert e.linear == pytest.approx(1 - purity, abs=1e-14)
    assert e.renyi2 == pytest.approx(-math.log(purity), abs=1e-14)
    vn = -math.log(1 - q) - q * math.log(q) / (1 - q)
    assert e.von_neumann == pytest.approx(vn, abs=1e-12)
    pure = entropies_from_spectrum([1.0, 0.0, 0.0])
    assert (pure.linear, pure.von_neumann, pure.renyi2) == (0.0, 0.0, 0.0)


def test_evolution_matches_direct_sampling():
    p = from_dimensionless(0.7, 1.1, K=0.9)
    g = build_grid(p, 0.0, 64)
    w0 = sample_wave(p, 0.5, g)
    w1 = sample_wave(p, 2.0, g)
    np.testing.assert_allclose(oracle.evolve_wave(w0, 1.5, p).values, w1.values, atol=1e-13)


def test_time_reversed_sample():
    p = from_dimensionless(0.7, 1.1, K=0.9)
    g = build_grid(replace(p, K=-p.K), 0.0, 64)
    assert g.k1_center == pytest.approx(-build_grid(p, 0.0, 64).k1_center)
    w = oracle.time_reversed_wave(p, 1.2, g)
    K1, K2 = np.meshgrid(g.k1, g.k2, indexing="ij")
    ref = np.conj(psi_particles(-K1, -K2, 1.2, p))
    np.testing.assert_allclose(w.values, ref / np.linalg.norm(ref), atol=1e-13)
