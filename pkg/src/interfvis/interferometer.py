"""Phase shifters followed by Fourier multiports on both sides, then detection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidDistribution
from .qcore import BipartiteState, adjoint, check_unitary, fourier_matrix, phase_diagonal

TWO_PI = 2.0 * np.pi
NEGATIVE_REJECT = 1e-10
SUM_TOL = 1e-10


def canonical_phases(phases) -> tuple[float, ...]:
    """Map angles into [0, 2 pi)."""
    p = np.asarray(phases, dtype=float)
    if not np.all(np.isfinite(p)):
        raise ValueError("phases must be finite")
    p = np.mod(p, TWO_PI)
    # np.mod can return exactly 2 pi for tiny negative inputs
    p[p >= TWO_PI] = 0.0
    return tuple(float(x) for x in p)


@dataclass(frozen=True)
class PhaseConfig:
    phases_a: tuple[float, ...]
    phases_b: tuple[float, ...]

    def __post_init__(self):
        a = canonical_phases(self.phases_a)
        b = canonical_phases(self.phases_b)
        if len(a) != len(b) or len(a) < 2:
            raise DimensionMismatch(f"need N >= 2 phases per side, got {len(a)} and {len(b)}")
        object.__setattr__(self, "phases_a", a)
        object.__setattr__(self, "phases_b", b)

    @property
    def n_paths(self) -> int:
        return len(self.phases_a)

    @classmethod
    def zeros(cls, n_paths: int) -> "PhaseConfig":
        return cls((0.0,) * n_paths, (0.0,) * n_paths)


@dataclass(frozen=True, eq=False)
class CoincidenceDistribution:
    """Joint detector statistics ``joint[m-1, n-1] = p_AB(m, n)`` plus marginals.

    Use :meth:`from_joint` to build one; it checks the table and fills the
    marginal caches.
    """

    n_paths: int
    joint: np.ndarray
    marginal_a: np.ndarray
    marginal_b: np.ndarray

    @classmethod
    def from_joint(cls, joint) -> "CoincidenceDistribution":
        p = np.array(joint, dtype=float, copy=True)
        if p.ndim != 2 or p.shape[0] != p.shape[1] or p.shape[0] < 2:
            raise DimensionMismatch(f"joint table must be N x N with N >= 2, got {p.shape}")
        if not np.all(np.isfinite(p)):
            raise InvalidDistribution("joint table has non-finite entries")
        low = float(p.min())
        if low < -NEGATIVE_REJECT:
            raise InvalidDistribution(f"negative probability {low:.3e}")
        p[p < 0.0] = 0.0
        total = float(p.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise InvalidDistribution(f"probabilities sum to {total!r}, not 1")
        ma = p.sum(axis=1)
        mb = p.sum(axis=0)
        for a in (p, ma, mb):
            a.setflags(write=False)
        return cls(p.shape[0], p, ma, mb)


def local_unitary(phases) -> np.ndarray:
    """``F @ diag(exp(i phi))``: the particle meets the phase shifters first."""
    phases = np.asarray(phases, dtype=float)
    return fourier_matrix(phases.size) @ phase_diagonal(phases)


def _detect(rho: np.ndarray, u_a: np.ndarray, u_b: np.ndarray) -> CoincidenceDistribution:
    n = u_a.shape[0]
    u = np.kron(u_a, u_b)
    out = u @ rho @ adjoint(u)
    return CoincidenceDistribution.from_joint(np.real(np.diagonal(out)).reshape(n, n))


def general_distribution(state: BipartiteState, u_a, u_b) -> CoincidenceDistribution:
    """Coincidence table when Alice applies ``u_a`` and Bob ``u_b`` before detection."""
    n = state.n_paths
    u_a = check_unitary(u_a, n)
    u_b = check_unitary(u_b, n)
    return _detect(state.rho, u_a, u_b)


def coincidence_distribution(state: BipartiteState, config: PhaseConfig) -> CoincidenceDistribution:
    if config.n_paths != state.n_paths:
        raise DimensionMismatch(
            f"phase config has {config.n_paths} paths, state has {state.n_paths}"
        )
    return _detect(state.rho, local_unitary(config.phases_a), local_unitary(config.phases_b))


def marginals(dist: CoincidenceDistribution) -> tuple[np.ndarray, np.ndarray]:
    """Alice's row sums and Bob's column sums."""
    return dist.marginal_a, dist.marginal_b
