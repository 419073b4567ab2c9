import math

import numpy as np
import pytest
from scipy.stats import unitary_group

from interfvis.errors import BudgetExceeded
from interfvis.interferometer import PhaseConfig, coincidence_distribution, local_unitary
from interfvis.measures import mutual_information, shannon_entropy_normalized, von_neumann_entropy
from interfvis.optimizer import (
    OptimizerConfig,
    approx_holevo_min,
    grid_oracle,
    optimize_single_visibility,
    optimize_tilde_two_particle,
    optimize_two_particle_visibility,
    params_from_unitary,
    single_visibility_at,
    tilde_single_visibility,
    two_particle_visibility_at,
    unitary_from_params,
    verify_inequality,
)
from interfvis.qcore import partial_trace, unitarity_residual
from interfvis.states import (
    LambdaParams,
    basis_index,
    chaotic,
    lambda_state,
    max_entangled,
    product_state,
    pure_reduced,
    pure_state,
    random_mixed,
    random_pure,
    uniform_product_ket,
)

FAST = OptimizerConfig(restarts=4, refine_iterations=100)
BINARY_01 = -(0.1 * math.log2(0.1) + 0.9 * math.log2(0.9))


def corner_state(n):
    psi = np.zeros(n * n)
    psi[basis_index(n, n, n)] = 1
    return pure_state(psi, n)


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs", [{"grid_points_per_phase": 1}, {"restarts": 0}, {"refine_tolerance": 0.0}]
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            OptimizerConfig(**kwargs)


class TestSingleVisibility:
    @pytest.mark.parametrize("n", [2, 3])
    def test_max_entangled_zero(self, n):
        for side in "AB":
            val, _ = optimize_single_visibility(max_entangled(n), side, FAST)
            assert abs(val) <= 1e-9

    def test_definite_path_corner_state_zero(self):
        # a particle on one definite path has no phase relations to exploit
        val, _ = optimize_single_visibility(corner_state(2), "A", FAST)
        oracle = grid_oracle(corner_state(2), "single-A", 64)
        assert abs(val) <= 1e-9 and abs(oracle) <= 1e-9

    def test_uniform_superposition_one(self):
        # (F_A F_B)^-1 |NN>: uniform amplitudes over paths, refocused onto one detector
        st = pure_state(uniform_product_ket(2), 2)
        val, _ = optimize_single_visibility(st, "A", FAST)
        assert val == pytest.approx(1, abs=1e-9)
        assert grid_oracle(st, "single-A", 64) == pytest.approx(1, abs=1e-9)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_lambda_one(self, n):
        val, _ = optimize_single_visibility(lambda_state(LambdaParams(n, 1)), "A", FAST)
        assert val == pytest.approx(1, abs=1e-9)

    def test_argmax_reproduces_value(self):
        for seed in range(5):
            st = random_mixed(3, 3, seed)
            val, phases = optimize_single_visibility(st, "B", FAST)
            assert abs(single_visibility_at(st, "B", phases) - val) <= 1e-12
            assert len(phases) == 3 and phases[0] == 0.0

    def test_more_restarts_never_worse(self):
        st = random_pure(3, 8)
        vals = [optimize_single_visibility(st, "A", OptimizerConfig(restarts=k, refine_iterations=60))[0] for k in (1, 2, 4, 8)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))


class TestTwoParticleVisibility:
    @pytest.mark.parametrize("n", [2, 3])
    def test_max_entangled_one(self, n):
        val, _ = optimize_two_particle_visibility(max_entangled(n), FAST)
        assert val == pytest.approx(1, abs=1e-9)

    def test_product_zero(self):
        rng = np.random.default_rng(2)
        st = product_state(
            pure_reduced(rng.standard_normal(3) + 1j * rng.standard_normal(3)),
            partial_trace(random_mixed(3, 2, 1), "B"),
        )
        val, _ = optimize_two_particle_visibility(st, FAST)
        assert abs(val) <= 1e-12

    @pytest.mark.parametrize("n", [2, 3])
    def test_chaotic_zero(self, n):
        val, _ = optimize_two_particle_visibility(chaotic(n), FAST)
        assert abs(val) <= 1e-12

    def test_argmax_reproduces_value(self):
        for seed in range(5):
            st = random_pure(2, seed)
            val, pc = optimize_two_particle_visibility(st, FAST)
            assert abs(two_particle_visibility_at(st, pc) - val) <= 1e-12
            assert pc.phases_a[0] == 0.0 and pc.phases_b[0] == 0.0

    def test_at_least_grid_oracle(self):
        for seed in range(5):
            st = random_mixed(2, 2, seed)
            val, _ = optimize_two_particle_visibility(st)
            assert val >= grid_oracle(st, "two-particle", 16) - 1e-9

    def test_deterministic(self):
        st = random_mixed(3, 4, 3)
        assert optimize_two_particle_visibility(st, FAST) == optimize_two_particle_visibility(st, FAST)


class TestTildeSingle:
    def test_max_entangled(self):
        assert tilde_single_visibility(max_entangled(3), "A") == pytest.approx(0, abs=1e-14)

    def test_pure_product(self):
        st = product_state(pure_reduced([1, 1j]), pure_reduced([1, 0]))
        assert tilde_single_visibility(st, "A") == pytest.approx(1, abs=1e-12)

    def test_schmidt_09_01(self):
        psi = np.zeros(4)
        psi[basis_index(1, 1, 2)] = math.sqrt(0.9)
        psi[basis_index(2, 2, 2)] = math.sqrt(0.1)
        val = tilde_single_visibility(pure_state(psi, 2), "A")
        assert val == pytest.approx(1 - BINARY_01, abs=1e-12)
        assert val == pytest.approx(0.531004, abs=1e-5)


class TestUnitaryParameters:
    def test_exponential_is_unitary(self):
        rng = np.random.default_rng(0)
        for n in (2, 3, 5):
            assert unitarity_residual(unitary_from_params(rng.normal(0, 3, n * n), n)) <= 1e-13

    def test_round_trip(self):
        rng = np.random.default_rng(1)
        for n in (2, 3, 4):
            for _ in range(10):
                u = unitary_group.rvs(n, random_state=rng)
                assert np.max(np.abs(unitary_from_params(params_from_unitary(u), n) - u)) <= 1e-12

    def test_round_trip_degenerate_spectrum(self):
        u = local_unitary([0.0, 0.0])  # the Fourier matrix itself has repeated eigenvalues
        assert np.max(np.abs(unitary_from_params(params_from_unitary(u), 2) - u)) <= 1e-12
        u = local_unitary([0.0, 0.0, 0.0, 0.0])
        assert np.max(np.abs(unitary_from_params(params_from_unitary(u), 4) - u)) <= 1e-12


class TestTildeTwoParticle:
    def test_max_entangled(self):
        assert optimize_tilde_two_particle(max_entangled(2), FAST) == pytest.approx(1, abs=1e-6)

    def test_sandwiched_between_fourier_and_entropy(self):
        for seed in range(4):
            st = random_mixed(2, 2, seed) if seed % 2 else random_pure(2, seed)
            v_ab, _ = optimize_two_particle_visibility(st, FAST)
            tilde = optimize_tilde_two_particle(st, FAST)
            assert v_ab <= tilde + 1e-8
            assert tilde <= von_neumann_entropy(partial_trace(st, "A")) + 1e-6


class TestHolevoMin:
    def test_product_zero(self):
        st = product_state(partial_trace(random_mixed(2, 3, 0), "A"), pure_reduced([1, 2j]))
        bound, u = approx_holevo_min(st, FAST)
        assert abs(bound) <= 1e-9
        assert unitarity_residual(u) <= 1e-10

    def test_max_entangled_one(self):
        bound, _ = approx_holevo_min(max_entangled(3), FAST)
        assert bound == pytest.approx(1, abs=1e-6)

    def test_dominates_two_particle_visibility(self):
        for seed in range(6):
            st = random_mixed(2, 1 + seed % 4, seed)
            v_ab, _ = optimize_two_particle_visibility(st, FAST)
            bound, _ = approx_holevo_min(st, FAST)
            assert v_ab <= bound + 1e-6


class TestGridOracle:
    def test_max_entangled_two_paths(self):
        assert grid_oracle(max_entangled(2), "two-particle", 32) == pytest.approx(1, abs=1e-6)

    def test_chaotic_zero(self):
        assert grid_oracle(chaotic(2), "two-particle", 8) == pytest.approx(0, abs=1e-14)
        assert grid_oracle(chaotic(3), "single-B", 8) == pytest.approx(0, abs=1e-14)

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            grid_oracle(chaotic(3), "two-particle", 100, budget=10**6)

    def test_rejects_large_n(self):
        with pytest.raises(ValueError):
            grid_oracle(chaotic(5), "single-A", 2)

    def test_never_beats_optimizer(self):
        for seed in range(4):
            st = random_pure(2, 100 + seed)
            val, _ = optimize_two_particle_visibility(st)
            assert grid_oracle(st, "two-particle", 24) <= val + 1e-6


class TestVerifyInequality:
    @pytest.mark.parametrize("n", [2, 3])
    @pytest.mark.parametrize("lam", [0, 0.25, 0.5, 0.75, 1])
    def test_lambda_family_saturates(self, n, lam):
        rep = verify_inequality(lambda_state(LambdaParams(n, lam)), FAST, include_tilde=False)
        assert abs(rep.margin_a) <= 1e-4 and abs(rep.margin_b) <= 1e-4
        assert not rep.violation

    def test_random_pure_states(self):
        for seed in range(20):
            rep = verify_inequality(random_pure(2, seed), FAST, include_tilde=False)
            assert min(rep.margin_a, rep.margin_b) >= -1e-6
            assert rep.v_a <= rep.v_a_tilde + 1e-8

    def test_chaotic(self):
        rep = verify_inequality(chaotic(2), FAST)
        assert rep.v_a == pytest.approx(0, abs=1e-12)
        assert rep.v_b == pytest.approx(0, abs=1e-12)
        assert rep.v_ab == pytest.approx(0, abs=1e-12)
        assert rep.margin_a == pytest.approx(1, abs=1e-12)

    def test_report_soundness(self):
        st = random_mixed(2, 2, 17)
        rep = verify_inequality(st, FAST)
        assert abs(single_visibility_at(st, "A", rep.phases_a) - rep.v_a) <= 1e-12
        assert abs(single_visibility_at(st, "B", rep.phases_b) - rep.v_b) <= 1e-12
        assert abs(two_particle_visibility_at(st, rep.phases_ab) - rep.v_ab) <= 1e-12
        assert rep.v_ab <= rep.v_ab_tilde + 1e-8
        assert rep.diagnostics["evaluations"]["v_ab"] > 0

    def test_deterministic(self):
        st = random_pure(3, 2)
        assert verify_inequality(st, FAST).as_dict() == verify_inequality(st, FAST).as_dict()


class TestSaturationIdentity:
    @pytest.mark.parametrize("n", range(2, 7))
    def test_zero_phase_identity(self, n):
        for lam in np.linspace(0, 1, 11):
            d = coincidence_distribution(lambda_state(LambdaParams(n, lam)), PhaseConfig.zeros(n))
            total = 1 - shannon_entropy_normalized(d.marginal_a) + mutual_information(d)
            assert total == pytest.approx(1, abs=1e-10)
