import cmath
import math

import numpy as np
import pytest

from interfvis.errors import (
    DimensionMismatch,
    HermiticityViolation,
    NonHermitianError,
    PositivityViolation,
    TraceViolation,
)
from interfvis.qcore import (
    BipartiteState,
    fourier_matrix,
    hermitian_eigendecomposition,
    partial_trace,
    phase_diagonal,
    tensor,
    unitarity_residual,
    validate_state,
)
from interfvis.states import chaotic, max_entangled, product_state, pure_reduced


def random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return a + a.conj().T


class TestFourierMatrix:
    def test_two_paths(self):
        expected = np.array([[-1, 1], [1, 1]]) / math.sqrt(2)
        np.testing.assert_allclose(fourier_matrix(2), expected, atol=1e-15)

    def test_three_paths_corner_entry(self):
        assert abs(fourier_matrix(3)[2, 2] - 1 / math.sqrt(3)) < 1e-15

    def test_entries_match_one_based_formula(self):
        n = 5
        f = fourier_matrix(n)
        gamma = cmath.exp(2j * math.pi / n)
        for m in range(1, n + 1):
            for k in range(1, n + 1):
                assert abs(f[m - 1, k - 1] - gamma ** (m * k) / math.sqrt(n)) < 1e-13

    @pytest.mark.parametrize("n", range(2, 13))
    def test_unitary(self, n):
        assert unitarity_residual(fourier_matrix(n)) <= 1e-12

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            fourier_matrix(1)


class TestPhaseDiagonal:
    def test_zero_phases_identity(self):
        np.testing.assert_array_equal(phase_diagonal([0.0, 0.0, 0.0]), np.eye(3))

    def test_pi_phase(self):
        np.testing.assert_allclose(phase_diagonal([math.pi, 0.0]), np.diag([-1, 1]), atol=1e-15)

    def test_unitary_for_random_phases(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            d = phase_diagonal(rng.uniform(-10, 10, size=4))
            assert unitarity_residual(d) <= 1e-15

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            phase_diagonal([0.0, float("nan")])


class TestTensor:
    def test_identity(self):
        np.testing.assert_array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))

    def test_unitary_closure(self):
        u = tensor(fourier_matrix(3), phase_diagonal([0.1, 0.2, 0.3]))
        assert unitarity_residual(u) <= 1e-12

    def test_alice_major_ordering(self):
        # column for |11> (index 0): F2[:,0] placed at A-major slots of Bob path 1
        f = fourier_matrix(2)
        col = tensor(f, np.eye(2))[:, 0]
        np.testing.assert_allclose(col, [f[0, 0], 0, f[1, 0], 0], atol=1e-15)


class TestPartialTrace:
    def test_chaotic(self):
        for side in "AB":
            np.testing.assert_allclose(partial_trace(chaotic(3), side).rho, np.eye(3) / 3, atol=1e-15)

    def test_max_entangled_two_paths(self):
        for side in "AB":
            np.testing.assert_allclose(partial_trace(max_entangled(2), side).rho, np.eye(2) / 2, atol=1e-15)

    def test_product_recovers_factors(self):
        rng = np.random.default_rng(1)
        a = pure_reduced(rng.standard_normal(3) + 1j * rng.standard_normal(3))
        b = pure_reduced(rng.standard_normal(3) + 1j * rng.standard_normal(3))
        st = product_state(a, b)
        np.testing.assert_allclose(partial_trace(st, "A").rho, a.rho, atol=1e-12)
        np.testing.assert_allclose(partial_trace(st, "B").rho, b.rho, atol=1e-12)

    def test_trace_preserved(self):
        from interfvis.states import random_mixed

        for seed in range(10):
            st = random_mixed(3, 4, seed)
            for side in "AB":
                assert abs(np.trace(partial_trace(st, side).rho) - np.trace(st.rho)) <= 1e-12

    def test_bad_side(self):
        with pytest.raises(ValueError):
            partial_trace(chaotic(2), "C")


class TestEigendecomposition:
    def test_identity_over_n(self):
        w, _ = hermitian_eigendecomposition(np.eye(4) / 4)
        np.testing.assert_allclose(w, [0.25] * 4, atol=1e-15)

    def test_diagonal(self):
        w, v = hermitian_eigendecomposition(np.diag([0.1, 0.9]))
        np.testing.assert_allclose(w, [0.9, 0.1], atol=1e-15)
        np.testing.assert_allclose(np.abs(v), [[0, 1], [1, 0]], atol=1e-15)

    def test_reconstruction_seeded_3x3(self):
        h = random_hermitian(np.random.default_rng(42), 3)
        w, v = hermitian_eigendecomposition(h)
        assert np.max(np.abs(h - v @ np.diag(w) @ v.conj().T)) <= 1e-10

    def test_reconstruction_1000_matrices(self):
        rng = np.random.default_rng(2024)
        for i in range(1000):
            h = random_hermitian(rng, 1 + i % 8)
            w, v = hermitian_eigendecomposition(h)
            assert np.all(np.diff(w) <= 0)
            assert np.max(np.abs(h - v @ np.diag(w) @ v.conj().T)) <= 1e-10
            assert unitarity_residual(v) <= 1e-10

    def test_rejects_non_hermitian(self):
        with pytest.raises(NonHermitianError):
            hermitian_eigendecomposition(np.array([[0, 1], [0, 0]]))


class TestValidateState:
    def test_accepts_chaotic(self):
        st = validate_state(np.eye(4) / 4, 2)
        assert isinstance(st, BipartiteState)
        assert not st.rho.flags.writeable

    def test_trace_violation(self):
        with pytest.raises(TraceViolation) as err:
            validate_state(np.eye(4) / 8, 2)
        assert err.value.deviation == pytest.approx(0.5, abs=1e-15)

    def test_positivity_violation(self):
        rho = np.diag([0.6, 0.3, 0.2, -0.1])
        with pytest.raises(PositivityViolation) as err:
            validate_state(rho, 2)
        assert err.value.deviation == pytest.approx(0.1, abs=1e-12)

    def test_hermiticity_violation(self):
        rho = np.eye(4) / 4
        rho[0, 1] = 0.01
        with pytest.raises(HermiticityViolation):
            validate_state(rho, 2)

    def test_itemized_violation_list(self):
        rho = np.diag([0.6, 0.3, 0.2, -0.3]).astype(complex)
        with pytest.raises(TraceViolation) as err:
            validate_state(rho, 2)
        names = [name for name, _ in err.value.violations]
        assert names == ["trace", "positivity"]

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            validate_state(np.eye(3) / 3, 2)

    def test_rejects_non_finite(self):
        rho = np.eye(4) / 4
        rho[0, 0] = np.inf
        with pytest.raises(ValueError):
            validate_state(rho, 2)
