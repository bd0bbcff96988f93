"""Numerical ground truth on a uniform momentum grid.

The wavefunction is sampled as ``W[i, j] = Psi(k1_i, k2_j, t) sqrt(h1 h2)``
so that ``W`` is (to quadrature accuracy) a unit vector in the product
space.  Partial traces are matrix products, the Schmidt decomposition is the
SVD of ``W``, and entropies come from the spectrum.  Nothing here uses the
closed-form kernels or entropies, only the raw amplitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import FOURIER, psi_particles, width_coeff
from .params import SystemParams

SPAN_SIGMAS = 6.0
MAX_DEFICIT = 1e-6
# lambda = s^2, so the double-precision floor sits near 1e-32; 1e-20 keeps the
# discarded weight far below the 1e-8 reconstruction budget.
RANK_EPSILON = 1e-20
NEGATIVE_TOL = 1e-12
MAX_EXPLICIT_N = 64
MAX_N = 512


class GridError(RuntimeError):
    """The grid does not resolve the state (normalisation deficit too large)."""


class DecompositionError(RuntimeError):
    """An eigen/singular value decomposition failed or returned garbage."""


@dataclass(frozen=True)
class GridSpec:
    n: int
    k1_center: float
    k2_center: float
    k1_halfspan: float
    k2_halfspan: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 8:
            raise ValueError(f"grid needs n >= 8 points per axis, got {self.n}")
        if self.n > MAX_N:
            raise ValueError(f"grid size {self.n} exceeds {MAX_N}")
        if not (self.k1_halfspan > 0 and self.k2_halfspan > 0):
            raise ValueError("grid half-spans must be positive")

    @property
    def h1(self) -> float:
        return 2.0 * self.k1_halfspan / (self.n - 1)

    @property
    def h2(self) -> float:
        return 2.0 * self.k2_halfspan / (self.n - 1)

    @property
    def k1(self) -> np.ndarray:
        return np.linspace(self.k1_center - self.k1_halfspan, self.k1_center + self.k1_halfspan, self.n)

    @property
    def k2(self) -> np.ndarray:
        return np.linspace(self.k2_center - self.k2_halfspan, self.k2_center + self.k2_halfspan, self.n)

    def refined(self, n: int) -> "GridSpec":
        """Same box, different number of points."""
        return GridSpec(n, self.k1_center, self.k2_center, self.k1_halfspan, self.k2_halfspan)


def marginal_moments(params: SystemParams):
    """Means and standard deviations of the two marginals of |Psi|^2.

    In CM/relative variables |Psi|^2 is a product of Gaussians with
    variances ``1/(4c B^2)`` and ``1/(4c b^2)`` centred at ``(K, 0)``; the
    particle wavenumbers are ``k1 = p1 kappa - xi`` and ``k2 = p2 kappa + xi``.
    The modulus is time independent, and so are these moments.
    """
    c = width_coeff(FOURIER)
    p1 = params.m1 / params.M
    p2 = params.m2 / params.M
    var_kappa = 1.0 / (4.0 * c * params.B**2)
    var_xi = 1.0 / (4.0 * c * params.b**2)
    means = (p1 * params.K, p2 * params.K)
    sigmas = (math.sqrt(p1**2 * var_kappa + var_xi), math.sqrt(p2**2 * var_kappa + var_xi))
    return means, sigmas


def build_grid(params: SystemParams, t: float, n: int, span_sigmas: float = SPAN_SIGMAS) -> GridSpec:
    """Grid centred on the marginal means, spanning ``span_sigmas`` sigma each way."""
    if n < 8:
        raise ValueError(f"grid needs n >= 8 points per axis, got {n}")
    if span_sigmas < SPAN_SIGMAS:
        raise ValueError(f"half-span must cover at least {SPAN_SIGMAS} marginal sigma")
    (c1, c2), (s1, s2) = marginal_moments(params)
    return GridSpec(n, c1, c2, span_sigmas * s1, span_sigmas * s2)


@dataclass(frozen=True)
class WaveMatrix:
    grid: GridSpec
    values: np.ndarray
    norm_deficit: float = 0.0

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


def _normalised(grid: GridSpec, raw: np.ndarray, max_deficit: float) -> WaveMatrix:
    norm = float(np.linalg.norm(raw))
    deficit = abs(1.0 - norm)
    if not np.isfinite(norm) or deficit > max_deficit:
        raise GridError(f"normalisation deficit {deficit:.3e} exceeds {max_deficit:.1e}; refine or widen the grid")
    return WaveMatrix(grid, raw / norm, deficit)


def sample_wave(params: SystemParams, t: float, grid: GridSpec, max_deficit: float = MAX_DEFICIT) -> WaveMatrix:
    """Quadrature-weighted samples of Psi(k1, k2, t), renormalised."""
    k1, k2 = np.meshgrid(grid.k1, grid.k2, indexing="ij")
    raw = psi_particles(k1, k2, t, params) * math.sqrt(grid.h1 * grid.h2)
    return _normalised(grid, raw, max_deficit)


def time_reversed_wave(params: SystemParams, T: float, grid: GridSpec, max_deficit: float = MAX_DEFICIT) -> WaveMatrix:
    """Samples of Psi*(-k1, -k2, T): the state at ``T`` with momenta reversed."""
    k1, k2 = np.meshgrid(grid.k1, grid.k2, indexing="ij")
    raw = np.conj(psi_particles(-k1, -k2, T, params)) * math.sqrt(grid.h1 * grid.h2)
    return _normalised(grid, raw, max_deficit)


def evolve_wave(wave: WaveMatrix, t: float, params: SystemParams) -> WaveMatrix:
    """Propagate a sampled state by ``t``.

    The CM kinetic energy is diagonal in momentum; the relative factor must
    be the oscillator ground state, which only picks up ``exp(-i omega t/2)``.
    """
    k1, k2 = np.meshgrid(wave.grid.k1, wave.grid.k2, indexing="ij")
    phase = params.hbar * (k1 + k2) ** 2 * t / (2.0 * params.M) + 0.5 * params.omega * t
    return WaveMatrix(wave.grid, wave.values * np.exp(-1j * phase), wave.norm_deficit)


@dataclass(frozen=True)
class Entropies:
    linear: float
    von_neumann: float
    renyi2: float


def entropies_from_spectrum(lambdas) -> Entropies:
    lam = np.asarray(lambdas, dtype=float)
    purity_ = float(np.sum(lam**2))
    nz = lam[lam > 0]
    return Entropies(
        linear=1.0 - purity_,
        von_neumann=float(-np.sum(nz * np.log(nz))) + 0.0,
        renyi2=-math.log(purity_) + 0.0,
    )


@dataclass(frozen=True)
class SchmidtResult:
    """Schmidt decomposition of a sampled two-particle state.

    ``lambdas`` holds the full descending spectrum; ``modes1[:, n]`` and
    ``modes2[:, n]`` are the paired orthonormal modes for the ``rank``
    eigenvalues above ``rank_epsilon``, so that
    ``W ~ sum_n sqrt(lambda_n) outer(modes1[:, n], modes2[:, n])``.
    """

    lambdas: np.ndarray
    modes1: np.ndarray
    modes2: np.ndarray
    rank_epsilon: float
    recon_residual: float
    entropies: Entropies

    @property
    def rank(self) -> int:
        return self.modes1.shape[1]

    @property
    def truncated_weight(self) -> float:
        return float(np.sum(self.lambdas[self.rank:]))


def schmidt_decompose(wave: WaveMatrix, rank_epsilon: float = RANK_EPSILON) -> SchmidtResult:
    W = wave.values
    total = float(np.linalg.norm(W)) ** 2
    if abs(total - 1.0) > 1e-10:
        raise ValueError(f"wave matrix is not normalised (|W|^2 = {total!r})")
    try:
        U, s, Vh = np.linalg.svd(W, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"SVD did not converge: {exc}") from exc
    if not np.all(np.isfinite(s)):
        raise DecompositionError("SVD returned non-finite singular values")
    lambdas = s**2
    rank = int(np.count_nonzero(lambdas > rank_epsilon))
    modes1 = U[:, :rank]
    modes2 = Vh[:rank, :].T
    recon = (modes1 * s[:rank]) @ modes2.T
    residual = float(np.linalg.norm(W - recon))
    return SchmidtResult(
        lambdas=lambdas,
        modes1=modes1,
        modes2=modes2,
        rank_epsilon=rank_epsilon,
        recon_residual=residual,
        entropies=entropies_from_spectrum(lambdas),
    )


def partial_trace(wave: WaveMatrix, which: int) -> np.ndarray:
    """Reduced density matrix of particle ``which`` (1 or 2) on the grid.

    ``rho1[i, i'] = sum_j W[i, j] conj(W[i', j])`` and
    ``rho2[j, j'] = sum_i W[i, j] conj(W[i, j'])``; both have unit trace and
    approximate ``h * rho(k, k')`` of the continuum kernels.
    """
    W = wave.values
    if which == 1:
        return W @ W.conj().T
    if which == 2:
        return W.T @ W.conj()
    raise ValueError(f"which must be 1 or 2, got {which!r}")


def purity(rho: np.ndarray) -> float:
    """Tr(rho^2) for a hermitian matrix."""
    return float(np.real(np.sum(rho * rho.T)))


def eigen_spectrum(rho: np.ndarray) -> np.ndarray:
    """Descending eigenvalues of a hermitian PSD matrix, tiny negatives clamped."""
    try:
        w = np.linalg.eigvalsh(rho)[::-1]
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigensolver did not converge: {exc}") from exc
    if w[-1] < -NEGATIVE_TOL:
        raise DecompositionError(f"eigenvalue {w[-1]:.3e} is negative beyond tolerance")
    return np.clip(w, 0.0, None)


def eigen_decomposition(rho: np.ndarray):
    """Descending (eigenvalues, eigenvectors) of a hermitian matrix."""
    try:
        w, v = np.linalg.eigh(rho)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigensolver did not converge: {exc}") from exc
    return w[::-1], v[:, ::-1]


def full_density_matrix(wave: WaveMatrix) -> np.ndarray:
    """The n^2 x n^2 pure-state density of the flattened wave matrix."""
    if wave.grid.n > MAX_EXPLICIT_N:
        raise ValueError(f"explicit full density refused for n={wave.grid.n} > {MAX_EXPLICIT_N}")
    w = wave.values.reshape(-1)
    return np.outer(w, w.conj())


def idempotency_check(wave: WaveMatrix, explicit: bool | None = None) -> float:
    """Frobenius norm of rho^2 - rho for the full pure-state density.

    The explicit path materialises rho (only for n <= 64).  The implicit
    path uses rho^2 = |w|^2 rho, which gives ``| |w|^2 - 1 | |w|^2``.
    """
    if explicit is None:
        explicit = wave.grid.n <= MAX_EXPLICIT_N
    if explicit:
        rho = full_density_matrix(wave)
        return float(np.linalg.norm(rho @ rho - rho))
    n2 = float(np.linalg.norm(wave.values)) ** 2
    return abs(n2 - 1.0) * n2


def partner_amplitude(wave: WaveMatrix, mode1: np.ndarray) -> np.ndarray:
    """Unnormalised particle-2 partner: sum_i conj(chi1[i]) W[i, :]."""
    return wave.values.T @ np.conj(mode1)


def partner_mode(wave: WaveMatrix, mode1: np.ndarray, lam: float, rank_epsilon: float = RANK_EPSILON) -> np.ndarray:
    """Normalised particle-2 eigenvector paired with a particle-1 eigenvector."""
    if not lam > rank_epsilon:
        raise ValueError(f"eigenvalue {lam!r} is below the rank threshold {rank_epsilon!r}")
    amp = partner_amplitude(wave, mode1)
    return amp / np.linalg.norm(amp)


def overlap(a: np.ndarray, b: np.ndarray) -> float:
    """|<a, b>| for unit vectors; insensitive to a global phase."""
    return float(abs(np.vdot(a, b)))


def projector_distance(A: np.ndarray, B: np.ndarray) -> float:
    """Frobenius distance between projectors onto the column spans of A and B."""
    A = np.atleast_2d(A.T).T
    B = np.atleast_2d(B.T).T
    return float(np.linalg.norm(A @ A.conj().T - B @ B.conj().T))


def degenerate_groups(lambdas, rtol: float = 1e-6) -> list[list[int]]:
    """Index groups of (numerically) equal eigenvalues, in descending order."""
    groups: list[list[int]] = []
    for i, lam in enumerate(lambdas):
        if groups and abs(lambdas[groups[-1][0]] - lam) <= rtol * max(abs(lam), 1e-300):
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def oracle_state(params: SystemParams, t: float, n: int = 256) -> WaveMatrix:
    return sample_wave(params, t, build_grid(params, t, n))


def oracle_linear_entropy(params: SystemParams, t: float, n: int = 256) -> float:
    return schmidt_decompose(oracle_state(params, t, n)).entropies.linear
