"""Shannon and von Neumann entropies with logarithm base N, and the Holevo quantity.

All entropies are normalized by ``log N`` where N is the number of paths,
including the joint entropy of the N x N coincidence table (range [0, 2]).
Terms with probability at or below ``ZERO_CUTOFF`` are skipped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InternalConsistencyError, InvalidDistribution
from .interferometer import CoincidenceDistribution
from .qcore import BipartiteState, ReducedState, adjoint, check_unitary, partial_trace

ZERO_CUTOFF = 1e-15
CONSISTENCY_TOL = 1e-10
WEIGHT_CUTOFF = 1e-12


def check_prob_vector(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size < 2:
        raise InvalidDistribution("need a flat probability vector with at least two entries")
    if not np.all(np.isfinite(p)) or p.min() < -CONSISTENCY_TOL:
        raise InvalidDistribution("probabilities must be finite and nonnegative")
    if abs(p.sum() - 1.0) > CONSISTENCY_TOL:
        raise InvalidDistribution(f"probabilities sum to {p.sum()!r}")
    return np.clip(p, 0.0, None)


def entropy_terms(p, base: int) -> float:
    """``-sum p log_base p`` over the entries above the zero cutoff, no validation."""
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > ZERO_CUTOFF]
    return float(-np.sum(p * np.log(p)) / np.log(base))


def shannon_entropy_normalized(p) -> float:
    """Shannon entropy of an N-outcome distribution in units of log N."""
    p = check_prob_vector(p)
    return min(max(entropy_terms(p, p.size), 0.0), 1.0)


def joint_entropy_normalized(dist: CoincidenceDistribution) -> float:
    return entropy_terms(dist.joint, dist.n_paths)


def mutual_information(dist: CoincidenceDistribution) -> float:
    n = dist.n_paths
    raw = (
        entropy_terms(dist.marginal_a, n)
        + entropy_terms(dist.marginal_b, n)
        - entropy_terms(dist.joint, n)
    )
    if raw < -CONSISTENCY_TOL or raw > 1.0 + CONSISTENCY_TOL:
        raise InternalConsistencyError(f"mutual information {raw!r} outside [0, 1]")
    return min(max(raw, 0.0), 1.0)


def von_neumann_entropy(rho) -> float:
    """``-tr rho log_N rho`` for an N x N density operator."""
    if isinstance(rho, ReducedState):
        rho = rho.rho
    rho = np.asarray(rho, dtype=complex)
    lam = np.linalg.eigvalsh(0.5 * (rho + adjoint(rho)))
    return min(max(entropy_terms(lam, rho.shape[0]), 0.0), 1.0)


@dataclass(frozen=True, eq=False)
class ConditionalEnsemble:
    """Bob's outcome weights and the Alice states they herald.

    ``states[n]`` is None (and ``degenerate[n]`` True) when the weight is
    below ``WEIGHT_CUTOFF``; such outcomes do not enter entropy sums.
    """

    weights: np.ndarray
    states: tuple
    degenerate: tuple

    def __len__(self):
        return len(self.weights)


def conditional_states(state: BipartiteState, u_b) -> ConditionalEnsemble:
    """Alice's post-selected states when Bob applies ``u_b`` and sees detector n.

    Bob's unitary acts as ``(1 x u_b) rho (1 x u_b)^dagger``, the same
    convention as :func:`interferometer.general_distribution`.
    """
    n = state.n_paths
    u_b = check_unitary(u_b, n)
    u = np.kron(np.eye(n), u_b)
    r = (u @ state.rho @ adjoint(u)).reshape(n, n, n, n)  # (j, k, j', k')
    # unnormalized tr_B[(1 x P_k) rho'] for each detector k
    blocks = np.einsum("jkmk->kjm", r)
    weights = np.real(np.einsum("kjj->k", blocks))
    if weights.min() < -CONSISTENCY_TOL:
        raise InternalConsistencyError(f"negative outcome weight {weights.min()!r}")
    weights = np.clip(weights, 0.0, None)
    states, flags = [], []
    for k in range(n):
        if weights[k] <= WEIGHT_CUTOFF:
            states.append(None)
            flags.append(True)
            continue
        cond = blocks[k] / weights[k]
        cond = 0.5 * (cond + adjoint(cond))
        states.append(ReducedState.from_matrix(cond / np.trace(cond).real))
        flags.append(False)
    weights.setflags(write=False)
    return ConditionalEnsemble(weights, tuple(states), tuple(flags))


def ensemble_entropy(ensemble: ConditionalEnsemble) -> float:
    """Weighted average entropy of the heralded states."""
    return float(
        sum(w * von_neumann_entropy(s) for w, s in zip(ensemble.weights, ensemble.states) if s is not None)
    )


def holevo_rhs(state: BipartiteState, u_b) -> float:
    """Holevo quantity of the ensemble Bob prepares for a fixed ``u_b``.

    This bounds the mutual information of any coincidence table taken with
    this ``u_b``, whatever Alice does.
    """
    s_a = von_neumann_entropy(partial_trace(state, "A"))
    chi = s_a - ensemble_entropy(conditional_states(state, u_b))
    if chi < -CONSISTENCY_TOL:
        raise InternalConsistencyError(f"negative Holevo quantity {chi!r}")
    return min(max(chi, 0.0), 1.0)
