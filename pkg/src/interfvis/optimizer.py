"""Maximize entropic visibilities over interferometer phases and local unitaries.

Phase searches run on the torus with the first phase of each side pinned to
zero (a common phase on one side does not change any detection probability).
A uniform grid seeds Nelder-Mead refinements from its best points. Every
maximum returned here is attained at the returned argument, so it is a lower
bound on the true maximum. For the Holevo term the search minimizes, so the
bound it produces is a lower estimate of the optimal Holevo quantity.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy.linalg import schur
from scipy.optimize import minimize

from .errors import BudgetExceeded
from .interferometer import PhaseConfig, coincidence_distribution, general_distribution, local_unitary
from .measures import (
    ZERO_CUTOFF,
    holevo_rhs,
    mutual_information,
    shannon_entropy_normalized,
    von_neumann_entropy,
)
from .qcore import BipartiteState, Side, adjoint, fourier_matrix, partial_trace

TWO_PI = 2.0 * np.pi
VIOLATION_TOL = 1e-6
GRID_CHUNK = 1 << 21
TIE_DECIMALS = 12

Objective = Literal["single-A", "single-B", "two-particle"]


@dataclass(frozen=True)
class OptimizerConfig:
    grid_points_per_phase: int = 8
    refine_iterations: int = 200
    refine_tolerance: float = 1e-9
    restarts: int = 16
    seed: int = 0

    def __post_init__(self):
        if self.grid_points_per_phase < 2:
            raise ValueError("grid_points_per_phase must be >= 2")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not self.refine_tolerance > 0:
            raise ValueError("refine_tolerance must be positive")
        if self.refine_iterations < 1:
            raise ValueError("refine_iterations must be >= 1")


@dataclass
class SearchDiagnostics:
    evaluations: int = 0
    restarts_run: int = 0
    converged: list = field(default_factory=list)

    def merge(self, res) -> None:
        self.evaluations += int(res.nfev)
        self.restarts_run += 1
        self.converged.append(bool(res.success))


@dataclass
class VisibilityReport:
    n_paths: int
    v_a: float
    v_b: float
    v_ab: float
    phases_a: tuple
    phases_b: tuple
    phases_ab: PhaseConfig
    v_a_tilde: float
    v_b_tilde: float
    v_ab_tilde: float | None
    margin_a: float
    margin_b: float
    violation: bool
    diagnostics: dict

    def as_dict(self) -> dict:
        return {
            "n_paths": self.n_paths,
            "v_a": self.v_a,
            "v_b": self.v_b,
            "v_ab": self.v_ab,
            "v_a_tilde": self.v_a_tilde,
            "v_b_tilde": self.v_b_tilde,
            "v_ab_tilde": self.v_ab_tilde,
            "margin_a": self.margin_a,
            "margin_b": self.margin_b,
            "violation": self.violation,
            "argmax_phases_a": list(self.phases_a),
            "argmax_phases_b": list(self.phases_b),
            "argmax_phases_ab": {
                "a": list(self.phases_ab.phases_a),
                "b": list(self.phases_ab.phases_b),
            },
            "diagnostics": self.diagnostics,
        }


# ---------------------------------------------------------------------------
# vectorized objective pieces (used for grids and refinement only; reported
# values are always re-evaluated through the interferometer/measures path)


def _entropy_batch(p: np.ndarray, axes, base: int) -> np.ndarray:
    mask = p > ZERO_CUTOFF
    safe = np.where(mask, p, 1.0)
    return -np.sum(np.where(mask, p * np.log(safe), 0.0), axis=axes) / np.log(base)


def _mi_batch(p: np.ndarray, n: int) -> np.ndarray:
    """Mutual information of tables ``p[..., m, k]``."""
    return (
        _entropy_batch(p.sum(axis=-1), -1, n)
        + _entropy_batch(p.sum(axis=-2), -1, n)
        - _entropy_batch(p, (-2, -1), n)
    )


def _amplitude_factors(state: BipartiteState) -> np.ndarray:
    """Stack ``K_r`` (N x N) with ``rho = sum_r vec(K_r) vec(K_r)^dagger``."""
    n = state.n_paths
    w, v = np.linalg.eigh(state.rho)
    keep = w > ZERO_CUTOFF
    return (v[:, keep] * np.sqrt(w[keep])).T.reshape(-1, n, n)


def _joint_batch(factors: np.ndarray, u_a: np.ndarray, u_b: np.ndarray) -> np.ndarray:
    """Coincidence tables for paired batches ``u_a[g]``, ``u_b[g]``."""
    amp = u_a[:, None] @ factors[None] @ np.swapaxes(u_b, -1, -2)[:, None]
    return np.sum(amp.real**2 + amp.imag**2, axis=1)


def _plogp(p: np.ndarray) -> float:
    p = p[p > ZERO_CUTOFF]
    return float(np.dot(p, np.log(p)))


@functools.lru_cache(maxsize=None)
def _mi_signs(n: int) -> np.ndarray:
    return np.concatenate([np.ones(n * n), -np.ones(2 * n)])


def _mi_table(p: np.ndarray, log_n: float) -> float:
    """Mutual information of one N x N table (entropy-sum form, no validation)."""
    n = p.shape[0]
    v = np.concatenate([p.ravel(), p.sum(axis=1), p.sum(axis=0)])
    keep = v > ZERO_CUTOFF
    v = v[keep]
    return float(np.dot(_mi_signs(n)[keep], v * np.log(v))) / log_n


def _joint_single(factors: np.ndarray, u_a: np.ndarray, u_b: np.ndarray) -> np.ndarray:
    amp = u_a @ factors @ u_b.T
    return np.sum(amp.real**2 + amp.imag**2, axis=0)


def _fourier_phase_batch(phases: np.ndarray) -> np.ndarray:
    """``F @ diag(exp(i phi))`` for each row of ``phases``."""
    n = phases.shape[-1]
    return fourier_matrix(n)[None, :, :] * np.exp(1j * phases)[:, None, :]


def _with_pinned(free: np.ndarray, n: int) -> np.ndarray:
    free = np.asarray(free, dtype=float).reshape(-1, n - 1)
    return np.concatenate([np.zeros((free.shape[0], 1)), free], axis=1)


def _grid(n_free: int, points: int) -> np.ndarray:
    """All points of the uniform grid in lexicographic order, shape (points**n_free, n_free)."""
    axis = TWO_PI * np.arange(points) / points
    if n_free == 0:
        return np.zeros((1, 0))
    return np.array(list(itertools.product(axis, repeat=n_free)), dtype=float)


def _top_indices(values: np.ndarray, k: int) -> np.ndarray:
    # rounding makes numerically equal values tie; stable sort then keeps grid (lexicographic) order
    return np.argsort(-np.round(values, TIE_DECIMALS), kind="stable")[:k]


def _single_values(rho_side: np.ndarray, free: np.ndarray) -> np.ndarray:
    n = rho_side.shape[0]
    u = _fourier_phase_batch(_with_pinned(free, n))
    marg = np.sum(((u @ rho_side) * u.conj()).real, axis=-1)
    return 1.0 - _entropy_batch(marg, -1, n)


def _two_values(factors: np.ndarray, free: np.ndarray, n: int) -> np.ndarray:
    free = np.asarray(free, dtype=float).reshape(-1, 2 * (n - 1))
    out = np.empty(free.shape[0])
    step = max(1, GRID_CHUNK // (factors.shape[0] * n * n))
    for start in range(0, free.shape[0], step):
        chunk = free[start : start + step]
        u_a = _fourier_phase_batch(_with_pinned(chunk[:, : n - 1], n))
        u_b = _fourier_phase_batch(_with_pinned(chunk[:, n - 1 :], n))
        out[start : start + step] = _mi_batch(_joint_batch(factors, u_a, u_b), n)
    return out


def _nelder_mead(fun, x0: np.ndarray, step: float, cfg: OptimizerConfig):
    d = x0.size
    simplex = np.vstack([x0, x0 + step * np.eye(d)])
    return minimize(
        fun,
        x0,
        method="Nelder-Mead",
        options={
            "maxiter": cfg.refine_iterations,
            "xatol": cfg.refine_tolerance,
            "fatol": 1e-12,
            "initial_simplex": simplex,
        },
    )


# ---------------------------------------------------------------------------
# phase optimizations


def _side_state(state: BipartiteState, side: Side) -> np.ndarray:
    return partial_trace(state, side).rho


def single_visibility_at(state: BipartiteState, side: Side, phases) -> float:
    """``1 - H_N`` of one side's detector marginal at the given phases."""
    zeros = (0.0,) * state.n_paths
    cfg = PhaseConfig(phases, zeros) if side == "A" else PhaseConfig(zeros, phases)
    dist = coincidence_distribution(state, cfg)
    marg = dist.marginal_a if side == "A" else dist.marginal_b
    return 1.0 - shannon_entropy_normalized(marg)


def two_particle_visibility_at(state: BipartiteState, config: PhaseConfig) -> float:
    return mutual_information(coincidence_distribution(state, config))


def _single_search(state: BipartiteState, side: Side, cfg: OptimizerConfig):
    n = state.n_paths
    rho_side = _side_state(state, side)
    grid = _grid(n - 1, cfg.grid_points_per_phase)
    values = _single_values(rho_side, grid)
    diag = SearchDiagnostics(evaluations=len(grid))
    step = np.pi / cfg.grid_points_per_phase
    f = fourier_matrix(n)
    log_n = np.log(n)

    u = f.copy()

    def objective(x):
        u[:, 1:] = f[:, 1:] * np.exp(1j * x)
        marg = np.sum(((u @ rho_side) * u.conj()).real, axis=-1)
        return -_plogp(marg) / log_n - 1.0

    best_val, best_phases = -np.inf, None
    for idx in _top_indices(values, cfg.restarts):
        res = _nelder_mead(objective, grid[idx], step, cfg)
        diag.merge(res)
        phases = PhaseConfig(np.concatenate([[0.0], res.x]), (0.0,) * n).phases_a
        val = single_visibility_at(state, side, phases)
        if val > best_val:
            best_val, best_phases = val, phases
    return best_val, best_phases, diag


def optimize_single_visibility(state: BipartiteState, side: Side, cfg: OptimizerConfig | None = None):
    """Best ``1 - H_N(marginal)`` over one side's phases; returns (value, phases)."""
    val, phases, _ = _single_search(state, side, cfg or OptimizerConfig())
    return val, phases


def _two_search(state: BipartiteState, cfg: OptimizerConfig):
    n = state.n_paths
    factors = _amplitude_factors(state)
    grid = _grid(2 * (n - 1), cfg.grid_points_per_phase)
    values = _two_values(factors, grid, n)
    diag = SearchDiagnostics(evaluations=len(grid))
    step = np.pi / cfg.grid_points_per_phase

    f = fourier_matrix(n)
    log_n = np.log(n)

    u_a, u_b = f.copy(), f.copy()

    def objective(x):
        u_a[:, 1:] = f[:, 1:] * np.exp(1j * x[: n - 1])
        u_b[:, 1:] = f[:, 1:] * np.exp(1j * x[n - 1 :])
        return -_mi_table(_joint_single(factors, u_a, u_b), log_n)

    def split(x):
        x = np.asarray(x, dtype=float)
        return PhaseConfig(np.concatenate([[0.0], x[: n - 1]]), np.concatenate([[0.0], x[n - 1 :]]))

    best_val, best_cfg = -np.inf, None
    for idx in _top_indices(values, cfg.restarts):
        res = _nelder_mead(objective, grid[idx], step, cfg)
        diag.merge(res)
        pc = split(res.x)
        val = two_particle_visibility_at(state, pc)
        if val > best_val:
            best_val, best_cfg = val, pc
    return best_val, best_cfg, diag


def optimize_two_particle_visibility(state: BipartiteState, cfg: OptimizerConfig | None = None):
    """Best mutual information over all 2N phases; returns (value, PhaseConfig)."""
    val, pc, _ = _two_search(state, cfg or OptimizerConfig())
    return val, pc


def tilde_single_visibility(state: BipartiteState, side: Side) -> float:
    """``1 - S_N`` of the reduced state: the single-particle optimum over all of U(N)."""
    return 1.0 - von_neumann_entropy(partial_trace(state, side))


# ---------------------------------------------------------------------------
# searches over general local unitaries


@functools.lru_cache(maxsize=None)
def _upper(n: int):
    return np.triu_indices(n, 1)


def hermitian_from_params(x, n: int) -> np.ndarray:
    """N^2 reals -> Hermitian matrix: diagonal, then upper-triangle real parts, then imaginary parts."""
    x = np.asarray(x, dtype=float)
    h = np.diag(x[:n]).astype(complex)
    iu = _upper(n)
    m = len(iu[0])
    h[iu] = x[n : n + m] + 1j * x[n + m : n + 2 * m]
    h[(iu[1], iu[0])] = np.conj(h[iu])
    return h


def params_from_hermitian(h: np.ndarray) -> np.ndarray:
    n = h.shape[0]
    iu = np.triu_indices(n, 1)
    return np.concatenate([np.real(np.diag(h)), np.real(h[iu]), np.imag(h[iu])])


@functools.lru_cache(maxsize=None)
def _generator_map(n: int) -> np.ndarray:
    """Complex (N^2, N^2) matrix taking parameters to the row-major entries of H."""
    return np.array([hermitian_from_params(e, n).ravel() for e in np.eye(n * n)])


def unitary_from_params(x, n: int) -> np.ndarray:
    """``exp(i H)`` for the Hermitian generator built by :func:`hermitian_from_params`.

    ``x`` may also be a (k, N^2) stack, giving k unitaries.
    """
    x = np.asarray(x, dtype=float)
    h = (x.reshape(-1, n * n) @ _generator_map(n)).reshape(-1, n, n)
    w, v = np.linalg.eigh(h)
    u = (v * np.exp(1j * w)[:, None, :]) @ np.conj(np.swapaxes(v, -1, -2))
    return u[0] if x.ndim == 1 else u


def params_from_unitary(u: np.ndarray) -> np.ndarray:
    """A generator whose exponential is ``u`` (principal branch of the log)."""
    t, z = schur(np.asarray(u, dtype=complex), output="complex")
    theta = np.angle(np.diag(t))
    return params_from_hermitian((z * theta) @ adjoint(z))


def _random_generators(cfg: OptimizerConfig, count: int, dim: int) -> np.ndarray:
    rng = np.random.default_rng(cfg.seed)
    return rng.normal(0.0, np.pi, size=(count, dim))


def _tilde_two_search(state: BipartiteState, cfg: OptimizerConfig, initial: Sequence = ()):
    n = state.n_paths
    factors = _amplitude_factors(state)
    npar = n * n
    diag = SearchDiagnostics()

    log_n = np.log(n)

    def fun(x):
        u_a, u_b = unitary_from_params(x.reshape(2, npar), n)
        return -_mi_table(_joint_single(factors, u_a, u_b), log_n)

    best_val, best_pair = -np.inf, None
    starts = []
    for u_a, u_b in initial:
        val = mutual_information(general_distribution(state, u_a, u_b))
        diag.evaluations += 1
        if val > best_val:
            best_val, best_pair = val, (np.asarray(u_a), np.asarray(u_b))
        starts.append(np.concatenate([params_from_unitary(u_a), params_from_unitary(u_b)]))
    n_random = max(cfg.restarts - len(starts), 0)
    starts.extend(_random_generators(cfg, n_random, 2 * npar))

    for x0 in starts[: max(cfg.restarts, len(initial))]:
        res = _nelder_mead(fun, np.asarray(x0, dtype=float), 0.25, cfg)
        diag.merge(res)
        u_a = unitary_from_params(res.x[:npar], n)
        u_b = unitary_from_params(res.x[npar:], n)
        val = mutual_information(general_distribution(state, u_a, u_b))
        if val > best_val:
            best_val, best_pair = val, (u_a, u_b)
    return best_val, best_pair, diag


def optimize_tilde_two_particle(
    state: BipartiteState, cfg: OptimizerConfig | None = None, initial: Sequence | None = None
) -> float:
    """Best mutual information over arbitrary local unitaries (lower bound).

    ``initial`` is a sequence of ``(u_a, u_b)`` warm starts. By default the
    optimum of the Fourier-with-phases search is used, so the result never
    falls below :func:`optimize_two_particle_visibility`.
    """
    cfg = cfg or OptimizerConfig()
    if initial is None:
        _, pc = optimize_two_particle_visibility(state, cfg)
        initial = [(local_unitary(pc.phases_a), local_unitary(pc.phases_b))]
    val, _, _ = _tilde_two_search(state, cfg, initial)
    return val


def _conditional_entropy_fast(state: BipartiteState, u_b: np.ndarray) -> float:
    n = state.n_paths
    u = np.kron(np.eye(n), u_b)
    r = (u @ state.rho @ adjoint(u)).reshape(n, n, n, n)
    blocks = np.einsum("jkmk->kjm", r)
    blocks = 0.5 * (blocks + adjoint(blocks))
    mu = np.linalg.eigvalsh(blocks)  # (k, eigen)
    w = np.real(np.einsum("kjj->k", blocks))
    total = 0.0
    for k in range(n):
        if w[k] <= 1e-12:
            continue
        q = mu[k][mu[k] > ZERO_CUTOFF] / w[k]
        total -= w[k] * float(np.sum(q * np.log(q)))
    return total / np.log(n)


def approx_holevo_min(state: BipartiteState, cfg: OptimizerConfig | None = None, initial: Sequence | None = None):
    """Search Bob's unitaries for the smallest average heralded entropy.

    Returns ``(S_N(rho_A) - min_estimate, argmin u_b)``. ``initial`` seeds
    the search with given unitaries; by default the identity, the Fourier
    matrix and Bob's part of the two-particle phase optimum are tried.
    Anything seeded is a feasible point, so the returned bound is at least
    the Holevo quantity at each seed.
    """
    cfg = cfg or OptimizerConfig()
    n = state.n_paths
    if initial is None:
        _, pc = optimize_two_particle_visibility(state, cfg)
        initial = [np.eye(n), fourier_matrix(n), local_unitary(pc.phases_b)]
    initial = [np.asarray(u, dtype=complex) for u in initial]

    best_bound, best_u = -np.inf, None
    for u in initial:
        bound = holevo_rhs(state, u)
        if bound > best_bound:
            best_bound, best_u = bound, u
    starts = [params_from_unitary(u) for u in initial]
    starts.extend(_random_generators(cfg, max(cfg.restarts - len(starts), 0), n * n))
    for x0 in starts[: max(cfg.restarts, len(initial))]:
        res = _nelder_mead(lambda x: _conditional_entropy_fast(state, unitary_from_params(x, n)), x0, 0.25, cfg)
        u = unitary_from_params(res.x, n)
        bound = holevo_rhs(state, u)
        if bound > best_bound:
            best_bound, best_u = bound, u
    return best_bound, best_u


# ---------------------------------------------------------------------------
# certification and reports


def grid_oracle(state: BipartiteState, objective: Objective, resolution: int, budget: int = 10**7) -> float:
    """Exhaustive maximum over a uniform phase grid, evaluated point by point.

    Each grid point goes through the full interferometer and measures path,
    independent of the vectorized evaluators used by the optimizer.
    """
    n = state.n_paths
    if n > 4:
        raise ValueError(f"grid oracle supports N <= 4, got N={n}")
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    n_free = 2 * (n - 1) if objective == "two-particle" else n - 1
    if objective not in ("single-A", "single-B", "two-particle"):
        raise ValueError(f"unknown objective {objective!r}")
    count = resolution**n_free
    if count > budget:
        raise BudgetExceeded(f"{count} grid evaluations exceed budget {budget}")

    best = -np.inf
    for point in _grid(n_free, resolution):
        if objective == "two-particle":
            pc = PhaseConfig(np.r_[0.0, point[: n - 1]], np.r_[0.0, point[n - 1 :]])
            val = two_particle_visibility_at(state, pc)
        else:
            val = single_visibility_at(state, objective[-1], np.r_[0.0, point])
        best = max(best, val)
    return float(best)


def _clip01(x: float) -> float:
    return min(max(float(x), 0.0), 1.0)


def verify_inequality(state: BipartiteState, cfg: OptimizerConfig | None = None, include_tilde: bool = True) -> VisibilityReport:
    """Compute all visibilities and the complementarity margins ``1 - V_side - V_AB``.

    A margin below -1e-6 sets ``violation``; it is reported, never raised.
    """
    cfg = cfg or OptimizerConfig()
    v_a, ph_a, d_a = _single_search(state, "A", cfg)
    v_b, ph_b, d_b = _single_search(state, "B", cfg)
    v_ab, pc, d_ab = _two_search(state, cfg)
    v_a, v_b, v_ab = _clip01(v_a), _clip01(v_b), _clip01(v_ab)

    diagnostics = {
        "evaluations": {"v_a": d_a.evaluations, "v_b": d_b.evaluations, "v_ab": d_ab.evaluations},
        "converged": {"v_a": all(d_a.converged), "v_b": all(d_b.converged), "v_ab": all(d_ab.converged)},
    }
    v_ab_tilde = None
    if include_tilde:
        warm = [(local_unitary(pc.phases_a), local_unitary(pc.phases_b))]
        v_ab_tilde, _, d_t = _tilde_two_search(state, cfg, warm)
        v_ab_tilde = _clip01(v_ab_tilde)
        diagnostics["evaluations"]["v_ab_tilde"] = d_t.evaluations
        diagnostics["converged"]["v_ab_tilde"] = all(d_t.converged)

    margin_a = 1.0 - v_a - v_ab
    margin_b = 1.0 - v_b - v_ab
    return VisibilityReport(
        n_paths=state.n_paths,
        v_a=v_a,
        v_b=v_b,
        v_ab=v_ab,
        phases_a=ph_a,
        phases_b=ph_b,
        phases_ab=pc,
        v_a_tilde=_clip01(tilde_single_visibility(state, "A")),
        v_b_tilde=_clip01(tilde_single_visibility(state, "B")),
        v_ab_tilde=v_ab_tilde,
        margin_a=margin_a,
        margin_b=margin_b,
        violation=min(margin_a, margin_b) < -VIOLATION_TOL,
        diagnostics=diagnostics,
    )
