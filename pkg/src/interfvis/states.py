"""Reference two-particle states, the lambda family, and seeded random states.

Random generators draw from ``numpy.random.default_rng(seed)`` (PCG64).
A Haar-random pure state is a vector of N^2 independent standard complex
normals (real parts drawn first, then imaginary parts) divided by its norm.
Mixtures draw their weights from a flat Dirichlet after all vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .interferometer import CoincidenceDistribution
from .qcore import BipartiteState, ReducedState, validate_state


def _check_n(n_paths: int) -> int:
    n = int(n_paths)
    if n < 2:
        raise ValueError(f"n_paths must be >= 2, got {n_paths}")
    return n


def periodic_delta(j, k, n: int):
    """1 where ``j == k (mod n)``, else 0."""
    return ((np.asarray(j) - np.asarray(k)) % n == 0).astype(float)


@dataclass(frozen=True)
class LambdaParams:
    n_paths: int
    lam: float

    def __post_init__(self):
        _check_n(self.n_paths)
        lam = float(self.lam)
        if not 0.0 <= lam <= 1.0:
            raise ValueError(f"lambda must lie in [0, 1], got {self.lam}")
        object.__setattr__(self, "lam", lam)


def basis_index(j: int, k: int, n: int) -> int:
    """Flat index of ``|jk>`` for 1-based path labels."""
    return (j - 1) * n + (k - 1)


def pure_state(psi, n_paths: int) -> BipartiteState:
    """Projector onto the normalized ket ``psi`` (length N^2, A-major)."""
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.size != n_paths * n_paths:
        raise DimensionMismatch(f"ket of length {psi.size} does not fit N={n_paths}")
    psi = psi / np.linalg.norm(psi)
    rho = np.outer(psi, psi.conj())
    return validate_state(0.5 * (rho + rho.conj().T), n_paths)


def max_entangled_ket(n_paths: int) -> np.ndarray:
    n = _check_n(n_paths)
    psi = np.zeros(n * n, dtype=complex)
    psi[[basis_index(j, j, n) for j in range(1, n + 1)]] = 1.0 / np.sqrt(n)
    return psi


def uniform_product_ket(n_paths: int) -> np.ndarray:
    """``(1/N) sum_jk |jk>``, the doubly inverse-Fourier-transformed ``|NN>``."""
    n = _check_n(n_paths)
    return np.full(n * n, 1.0 / n, dtype=complex)


def max_entangled(n_paths: int) -> BipartiteState:
    n = _check_n(n_paths)
    return pure_state(max_entangled_ket(n), n)


def chaotic(n_paths: int) -> BipartiteState:
    n = _check_n(n_paths)
    return validate_state(np.eye(n * n) / (n * n), n)


def product_state(rho_a: ReducedState, rho_b: ReducedState) -> BipartiteState:
    if rho_a.n_paths != rho_b.n_paths:
        raise DimensionMismatch(f"factors have N={rho_a.n_paths} and N={rho_b.n_paths}")
    return validate_state(np.kron(rho_a.rho, rho_b.rho), rho_a.n_paths)


def lambda_ket(params: LambdaParams) -> np.ndarray:
    n, lam = params.n_paths, params.lam
    # <0|1> = 1/sqrt(N) is what makes this denominator the norm
    norm = np.sqrt(1.0 + (n - 1) * lam * lam)
    return ((1.0 - lam) * max_entangled_ket(n) + lam * np.sqrt(n) * uniform_product_ket(n)) / norm


def lambda_state(params: LambdaParams) -> BipartiteState:
    return pure_state(lambda_ket(params), params.n_paths)


def lambda_closed_form(params: LambdaParams) -> CoincidenceDistribution:
    """Zero-phase coincidence table of the lambda family, written out in closed form."""
    n, lam = params.n_paths, params.lam
    m = np.arange(1, n + 1)[:, None]
    k = np.arange(1, n + 1)[None, :]
    amp = (1.0 - lam) * periodic_delta(m + k, n, n) + n * lam * periodic_delta(m, n, n) * periodic_delta(k, n, n)
    return CoincidenceDistribution.from_joint(amp**2 / (n * (1.0 + (n - 1) * lam * lam)))


def _haar_ket(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_pure(n_paths: int, seed: int) -> BipartiteState:
    n = _check_n(n_paths)
    rng = np.random.default_rng(seed)
    return pure_state(_haar_ket(rng, n * n), n)


def random_mixed(n_paths: int, rank: int, seed: int) -> BipartiteState:
    n = _check_n(n_paths)
    rank = int(rank)
    if not 1 <= rank <= n * n:
        raise ValueError(f"rank must lie in [1, {n * n}], got {rank}")
    rng = np.random.default_rng(seed)
    kets = np.array([_haar_ket(rng, n * n) for _ in range(rank)])
    weights = rng.dirichlet(np.ones(rank))
    rho = np.einsum("r,ri,rj->ij", weights, kets, kets.conj())
    rho = 0.5 * (rho + rho.conj().T)
    return validate_state(rho / np.trace(rho).real, n)


def pure_reduced(ket) -> ReducedState:
    """Single-particle projector onto ``ket``."""
    ket = np.asarray(ket, dtype=complex)
    ket = ket / np.linalg.norm(ket)
    rho = np.outer(ket, ket.conj())
    return ReducedState.from_matrix(0.5 * (rho + rho.conj().T))
