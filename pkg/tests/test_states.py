import numpy as np
import pytest

from qbattery.linalg import ContractViolation, partial_trace
from qbattery.states import (
    fixed_entanglement_state,
    locally_passive_state,
    log_negativity,
    projector,
    schmidt_decompose,
    schmidt_gap,
    schmidt_lambdas_from_entanglement,
    single_qubit_unitary,
    state_from_reals,
    state_to_reals,
)
from qbhelpers import random_pure_state, rng

BELL = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


class TestLogNegativity:
    def test_product_state(self):
        assert log_negativity([1, 0, 0, 0]) == 0.0

    def test_bell_state(self):
        assert np.isclose(log_negativity(BELL), 1.0, atol=1e-12)

    def test_partially_entangled(self):
        c = np.array([np.sqrt(0.75), 0, 0, np.sqrt(0.25)])
        want = np.log2(2 * np.sqrt(0.1875) + 1)
        assert np.isclose(log_negativity(c), want, atol=1e-12)

    def test_rejects_unnormalized(self):
        with pytest.raises(ContractViolation):
            log_negativity([1, 0, 0, 1])


class TestSchmidtLambdas:
    def test_endpoints(self):
        assert np.allclose(schmidt_lambdas_from_entanglement(0.0), (1.0, 0.0))
        assert np.allclose(schmidt_lambdas_from_entanglement(1.0), (0.5, 0.5))

    def test_intermediate_value(self):
        lam1, lam2 = schmidt_lambdas_from_entanglement(0.6)
        gap = np.sqrt(2**1.6 - 2**1.2)
        assert np.isclose(lam1, 0.5 * (1 + gap), atol=1e-12)
        assert np.isclose(lam2, 0.5 * (1 - gap), atol=1e-12)

    def test_round_trip_through_log_negativity(self):
        for e in np.linspace(0, 1, 11):
            lam1, lam2 = schmidt_lambdas_from_entanglement(e)
            assert np.isclose(lam1 + lam2, 1.0, atol=1e-12)
            c = np.zeros(4)
            c[0], c[3] = np.sqrt(lam1), np.sqrt(lam2)
            assert abs(log_negativity(c) - e) <= 1e-10

    def test_domain_error(self):
        with pytest.raises(ValueError):
            schmidt_lambdas_from_entanglement(1.2)
        with pytest.raises(ValueError):
            schmidt_gap(-0.1)


class TestLocallyPassiveState:
    def test_zero_entanglement_is_ground_state(self):
        assert np.allclose(locally_passive_state(0.0), [0, 0, 0, 1])

    def test_full_entanglement_is_bell(self):
        assert np.allclose(locally_passive_state(1.0), BELL)

    def test_intermediate_amplitudes(self):
        c = locally_passive_state(0.6)
        lam1, lam2 = schmidt_lambdas_from_entanglement(0.6)
        assert np.isclose(c[0].real, np.sqrt(lam2), atol=1e-12)
        assert np.isclose(c[3].real, np.sqrt(lam1), atol=1e-12)

    def test_reduced_states_are_passive(self):
        # diagonal marginals, more weight on the lower level |1>
        for e in (0.0, 0.3, 0.8, 1.0):
            rho = projector(locally_passive_state(e))
            for keep in ("A", "B"):
                red = partial_trace(rho, (2, 2), keep)
                assert abs(red[0, 1]) <= 1e-14
                assert red[1, 1].real >= red[0, 0].real - 1e-12

    def test_free_phase(self):
        c = locally_passive_state(0.6, phase=1.1)
        assert np.isclose(abs(c[3]), abs(locally_passive_state(0.6)[3]))
        assert np.isclose(np.angle(c[3]), 1.1)


class TestFixedEntanglementState:
    def test_zero_angles_give_schmidt_form(self):
        lam1, lam2 = schmidt_lambdas_from_entanglement(0.4)
        c = fixed_entanglement_state(0.4, np.zeros(6))
        assert np.allclose(np.abs(c), [np.sqrt(lam1), 0, 0, np.sqrt(lam2)], atol=1e-12)

    def test_local_unitary_invariance(self):
        gen = rng(41)
        for e in (0.0, 0.37, 0.6, 1.0):
            for _ in range(5):
                angles = gen.uniform(0, 2 * np.pi, size=6)
                c = fixed_entanglement_state(e, angles)
                assert abs(log_negativity(c) - e) <= 1e-10

    def test_schmidt_consistency_loop(self):
        gen = rng(43)
        for e in (0.2, 0.85):
            angles = gen.uniform(0, 2 * np.pi, size=6)
            form = schmidt_decompose(fixed_entanglement_state(e, angles))
            lams = np.sort(form.lambdas)[::-1]
            want = schmidt_lambdas_from_entanglement(e)
            assert np.allclose(lams, want, atol=1e-10)

    def test_rejects_bad_angles(self):
        with pytest.raises(ValueError):
            fixed_entanglement_state(0.5, np.zeros(5))
        with pytest.raises(ValueError):
            fixed_entanglement_state(0.5, [np.inf] + [0] * 5)


class TestSchmidtDecompose:
    def test_product_state(self):
        form = schmidt_decompose([0, 1, 0, 0])
        assert np.allclose(form.lambdas, [1.0, 0.0], atol=1e-14)

    def test_bell_state(self):
        form = schmidt_decompose(BELL)
        assert np.allclose(form.lambdas, [0.5, 0.5], atol=1e-14)

    def test_random_reconstruction(self):
        gen = rng(47)
        for _ in range(10):
            c = random_pure_state(gen, 4)
            form = schmidt_decompose(c)
            assert np.linalg.norm(form.reconstruct() - c) <= 1e-10
            # lambdas match the reduced-state spectra
            red = partial_trace(projector(c), (2, 2), "A")
            assert np.allclose(np.sort(form.lambdas), np.sort(np.linalg.eigvalsh(red)), atol=1e-10)

    def test_basis_columns_orthonormal(self):
        gen = rng(53)
        form = schmidt_decompose(random_pure_state(gen, 4))
        assert np.allclose(form.basis_1.conj().T @ form.basis_1, np.eye(2), atol=1e-12)
        assert np.allclose(form.basis_2.conj().T @ form.basis_2, np.eye(2), atol=1e-12)


class TestHelpers:
    def test_single_qubit_unitary_is_unitary(self):
        gen = rng(59)
        for _ in range(5):
            u = single_qubit_unitary(*gen.uniform(0, 2 * np.pi, size=3))
            assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-12)

    def test_real_serialization_round_trip(self):
        gen = rng(61)
        c = random_pure_state(gen, 4)
        again = state_from_reals(state_to_reals(c))
        assert np.allclose(again, c, atol=1e-15)
