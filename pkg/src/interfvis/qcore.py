"""Dense complex linear algebra for bipartite N-path systems.

Matrices are plain ``numpy`` complex arrays. The two-particle basis ket
``|jk>`` (Alice on path j, Bob on path k, both 1-based) sits at flat index
``(j - 1) * N + (k - 1)``, i.e. Alice's index is the slow one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import (
    DimensionMismatch,
    HermiticityViolation,
    NonHermitianError,
    NonUnitaryError,
    PositivityViolation,
    StateValidationError,
    TraceViolation,
)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10
UNITARY_TOL = 1e-10

Side = Literal["A", "B"]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def as_matrix(entries, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Build a finite complex matrix, optionally from a flat row-major list."""
    a = np.asarray(entries, dtype=complex)
    if rows is not None or cols is not None:
        if rows is None or cols is None or a.size != rows * cols:
            raise DimensionMismatch(f"{a.size} entries cannot fill a {rows}x{cols} matrix")
        a = a.reshape(rows, cols)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionMismatch(f"expected a non-empty 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def unitarity_residual(u: np.ndarray) -> float:
    """Largest entry of ``|U U^dagger - 1|``."""
    u = np.asarray(u)
    return float(np.max(np.abs(u @ adjoint(u) - np.eye(u.shape[0]))))


def check_unitary(u, n: int | None = None, tol: float = UNITARY_TOL) -> np.ndarray:
    u = as_matrix(u)
    if u.shape[0] != u.shape[1] or (n is not None and u.shape[0] != n):
        raise DimensionMismatch(f"expected a {n}x{n} unitary, got shape {u.shape}")
    res = unitarity_residual(u)
    if res > tol:
        raise NonUnitaryError(f"matrix is not unitary (residual {res:.3e} > {tol:g})")
    return u


def fourier_matrix(n_paths: int) -> np.ndarray:
    """Symmetric N-port beam splitter, ``F[m, n] = exp(2 pi i m n / N) / sqrt(N)``.

    ``m`` and ``n`` run over 1..N, so row 1 of the returned array (index 0)
    carries ``m = 1`` and the last row and column are all ``1/sqrt(N)``.
    """
    n = int(n_paths)
    if n < 2:
        raise ValueError(f"n_paths must be >= 2, got {n_paths}")
    idx = np.arange(1, n + 1)
    # exponent reduced mod N before scaling keeps large-N entries exact
    return np.exp(2j * np.pi * (np.outer(idx, idx) % n) / n) / np.sqrt(n)


def phase_diagonal(phases) -> np.ndarray:
    phases = np.asarray(phases, dtype=float)
    if phases.ndim != 1 or phases.size < 2:
        raise DimensionMismatch("need a flat list of at least two phases")
    if not np.all(np.isfinite(phases)):
        raise ValueError("phases must be finite")
    return np.diag(np.exp(1j * phases))


def tensor(a, b) -> np.ndarray:
    """Kronecker product with ``a`` as the slow (Alice) index."""
    return np.kron(as_matrix(a), as_matrix(b))


@dataclass(frozen=True, eq=False)
class ReducedState:
    """Validated single-particle density operator (N x N)."""

    n_paths: int
    rho: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rho", _frozen(self.rho))

    @classmethod
    def from_matrix(cls, rho, n_paths: int | None = None) -> "ReducedState":
        rho = as_matrix(rho)
        n = rho.shape[0] if n_paths is None else int(n_paths)
        if rho.shape != (n, n):
            raise DimensionMismatch(f"reduced state must be {n}x{n}, got {rho.shape}")
        _check_density(rho)
        return cls(n, rho)

    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """Validated two-particle density operator on the N^2-dimensional path space.

    Build instances with :func:`validate_state`; the plain constructor does
    not check invariants.
    """

    n_paths: int
    rho: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rho", _frozen(self.rho))

    @property
    def dim(self) -> int:
        return self.n_paths * self.n_paths

    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))


def _check_density(rho: np.ndarray) -> None:
    violations = []
    herm = float(np.max(np.abs(rho - adjoint(rho))))
    if herm > HERMITIAN_TOL:
        violations.append((HermiticityViolation, herm))
    tr = abs(complex(np.trace(rho)) - 1.0)
    if tr > TRACE_TOL:
        violations.append((TraceViolation, tr))
    # positivity is probed on the Hermitian part so a skew error is not double-counted
    lam_min = float(np.linalg.eigvalsh(0.5 * (rho + adjoint(rho)))[0])
    if lam_min < -POSITIVITY_TOL:
        violations.append((PositivityViolation, -lam_min))
    if violations:
        kind, dev = violations[0]
        raise kind(dev, [(k.invariant, d) for k, d in violations])


def validate_state(rho, n_paths: int) -> BipartiteState:
    """Check a candidate N^2 x N^2 operator and wrap it as a :class:`BipartiteState`.

    Raises the exception for the first failed invariant (Hermiticity, trace,
    positivity, in that order); its ``violations`` attribute itemizes all of
    them with the measured deviations.
    """
    n = int(n_paths)
    if n < 2:
        raise ValueError(f"n_paths must be >= 2, got {n_paths}")
    rho = as_matrix(rho)
    if rho.shape != (n * n, n * n):
        raise DimensionMismatch(f"expected {n * n}x{n * n} operator for N={n}, got {rho.shape}")
    _check_density(rho)
    return BipartiteState(n, rho)


def is_valid_state(rho, n_paths: int) -> bool:
    try:
        validate_state(rho, n_paths)
    except (StateValidationError, DimensionMismatch):
        return False
    return True


def partial_trace(state: BipartiteState, side: Side) -> ReducedState:
    """Reduced state of the particle on ``side``; the *other* side is traced out.

    ``partial_trace(state, "A")`` returns Alice's ``rho_A = tr_B rho``.
    """
    n = state.n_paths
    if state.rho.shape != (n * n, n * n):
        raise DimensionMismatch(f"state of N={n} has shape {state.rho.shape}")
    r = state.rho.reshape(n, n, n, n)  # (j, k, j', k')
    if side == "A":
        red = np.einsum("jkmk->jm", r)
    elif side == "B":
        red = np.einsum("jkjm->km", r)
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    return ReducedState(n, red)


def hermitian_eigendecomposition(h, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order and the matching orthonormal eigenvectors.

    Column ``i`` of the returned matrix belongs to eigenvalue ``i``.
    """
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise DimensionMismatch(f"square matrix required, got {h.shape}")
    dev = float(np.max(np.abs(h - adjoint(h))))
    if dev > tol:
        raise NonHermitianError(f"matrix is not Hermitian (deviation {dev:.3e})")
    w, v = np.linalg.eigh(0.5 * (h + adjoint(h)))
    return w[::-1].copy(), v[:, ::-1].copy()
