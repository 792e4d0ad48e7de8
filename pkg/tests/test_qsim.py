"""Statevector simulator tests against dense matrix oracles."""

import math

import numpy as np
import pytest

from qcloudrl.errors import SimulationError
from qcloudrl.qsim import (
    Circuit,
    GateOp,
    StateVector,
    ZObservable,
    apply_gate,
    expectation_z,
    gate_matrix,
    run_circuit,
    sample_measurement,
)

from oracles import circuit_unitary

INV_SQRT2 = 1.0 / math.sqrt(2.0)


def random_circuit(n_qubits: int, n_gates: int, rng: np.random.Generator) -> Circuit:
    kinds = ["h", "x", "rx", "ry", "rz", "cz", "cnot", "swap"]
    ops = []
    for _ in range(n_gates):
        kind = kinds[rng.integers(len(kinds))]
        if kind in ("cz", "cnot", "swap"):
            a, b = rng.choice(n_qubits, size=2, replace=False)
            ops.append(GateOp(kind, (int(a), int(b))))
        elif kind in ("rx", "ry", "rz"):
            ops.append(GateOp(kind, (int(rng.integers(n_qubits)),), float(rng.uniform(-np.pi, np.pi))))
        else:
            ops.append(GateOp(kind, (int(rng.integers(n_qubits)),)))
    return Circuit(n_qubits, tuple(ops))


def random_state(n_qubits: int, rng: np.random.Generator) -> StateVector:
    amps = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return StateVector(n_qubits, amps / np.linalg.norm(amps))


class TestApplyGate:
    def test_hadamard_on_zero(self):
        out = apply_gate(StateVector.zero_state(1), GateOp.h(0))
        np.testing.assert_allclose(out.amplitudes, [INV_SQRT2, INV_SQRT2], atol=1e-12)

    def test_cz_leaves_00_unchanged(self):
        out = apply_gate(StateVector.zero_state(2), GateOp.cz(0, 1))
        np.testing.assert_allclose(out.amplitudes, [1, 0, 0, 0], atol=0)

    def test_rz_phase_matches_matrix_oracle(self):
        one = StateVector(1, np.array([0, 1], dtype=complex))
        out = apply_gate(one, GateOp.rz(np.pi / 2, 0))
        expected = np.diag([np.exp(-1j * np.pi / 4), np.exp(1j * np.pi / 4)]) @ one.amplitudes
        np.testing.assert_allclose(out.amplitudes, expected, atol=1e-12)
        assert np.allclose(out.amplitudes[1], np.exp(1j * np.pi / 4))

    def test_input_state_not_mutated(self):
        state = StateVector.zero_state(2)
        before = state.amplitudes.copy()
        apply_gate(state, GateOp.h(0))
        np.testing.assert_array_equal(state.amplitudes, before)

    def test_invalid_target_names_gate_and_index(self):
        with pytest.raises(SimulationError, match=r"'h'.*target 3"):
            apply_gate(StateVector.zero_state(2), GateOp.h(3))

    def test_gates_match_embedded_matrices(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            circuit = random_circuit(3, 1, rng)
            state = random_state(3, rng)
            out = apply_gate(state, circuit.ops[0])
            expected = circuit_unitary(circuit) @ state.amplitudes
            np.testing.assert_allclose(out.amplitudes, expected, atol=1e-12)


class TestRunCircuit:
    def test_empty_circuit_is_identity(self):
        state = StateVector.zero_state(3)
        out = run_circuit(state, Circuit(3))
        np.testing.assert_array_equal(out.amplitudes, state.amplitudes)

    def test_bell_preparation(self):
        out = run_circuit(StateVector.zero_state(2), Circuit(2, (GateOp.h(0), GateOp.cnot(0, 1))))
        np.testing.assert_allclose(out.amplitudes, [INV_SQRT2, 0, 0, INV_SQRT2], atol=1e-12)

    def test_random_circuits_match_matrix_chain_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            circuit = random_circuit(3, 20, rng)
            state = random_state(3, rng)
            out = run_circuit(state, circuit)
            expected = circuit_unitary(circuit) @ state.amplitudes
            np.testing.assert_allclose(out.amplitudes, expected, atol=1e-9)

    def test_norm_preserved(self):
        rng = np.random.default_rng(13)
        state = random_state(4, rng)
        out = run_circuit(state, random_circuit(4, 60, rng))
        assert abs(out.norm() ** 2 - 1.0) < 1e-10

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(SimulationError, match="2 qubits"):
            run_circuit(StateVector.zero_state(3), Circuit(2, (GateOp.h(0),)))

    def test_error_carries_op_index(self):
        with pytest.raises(SimulationError, match=r"op 1.*target 5"):
            Circuit(3, (GateOp.h(0), GateOp.h(5)))


class TestStateVectorInvariants:
    def test_qubit_cap_enforced(self):
        with pytest.raises(SimulationError):
            StateVector(13, np.zeros(2**13, dtype=complex))

    def test_length_must_match(self):
        with pytest.raises(SimulationError):
            StateVector(2, np.array([1.0, 0.0]))


class TestExpectationZ:
    def test_all_zero_state_gives_one(self):
        state = StateVector.zero_state(3)
        for mask in [{0}, {1}, {0, 2}, {0, 1, 2}]:
            assert expectation_z(state, ZObservable(frozenset(mask))) == pytest.approx(1.0)

    def test_plus_state_gives_zero(self):
        out = apply_gate(StateVector.zero_state(1), GateOp.h(0))
        assert expectation_z(out, ZObservable(frozenset({0}))) == pytest.approx(0.0, abs=1e-12)

    def test_bell_state_masks(self):
        bell = run_circuit(StateVector.zero_state(2), Circuit(2, (GateOp.h(0), GateOp.cnot(0, 1))))
        # direct sum over the four amplitudes
        probs = np.abs(bell.amplitudes) ** 2
        zz = probs[0] - probs[1] - probs[2] + probs[3]
        assert expectation_z(bell, ZObservable(frozenset({0, 1}))) == pytest.approx(zz, abs=1e-12)
        assert expectation_z(bell, ZObservable(frozenset({0, 1}))) == pytest.approx(1.0)
        assert expectation_z(bell, ZObservable(frozenset({0}))) == pytest.approx(0.0, abs=1e-12)

    def test_result_in_unit_interval_and_real(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            state = random_state(3, rng)
            value = expectation_z(state, ZObservable(frozenset({0, 2})))
            assert isinstance(value, float)
            assert -1.0 - 1e-12 <= value <= 1.0 + 1e-12

    def test_mask_out_of_range(self):
        with pytest.raises(SimulationError):
            expectation_z(StateVector.zero_state(2), ZObservable(frozenset({4})))


class TestSampling:
    def test_deterministic_outcome(self):
        counts = sample_measurement(StateVector.zero_state(1), 1024, rng_seed=0)
        assert counts == {"0": 1024}

    def test_binomial_bound_on_plus_state(self):
        plus = apply_gate(StateVector.zero_state(1), GateOp.h(0))
        shots = 100_000
        counts = sample_measurement(plus, shots, rng_seed=42)
        sigma = math.sqrt(shots * 0.25)
        for key in ("0", "1"):
            assert abs(counts[key] - shots / 2) < 4 * sigma

    def test_counts_sum_to_shots(self):
        rng = np.random.default_rng(3)
        state = random_state(3, rng)
        counts = sample_measurement(state, 500, rng_seed=9)
        assert sum(counts.values()) == 500
        assert all(len(k) == 3 for k in counts)

    def test_same_seed_identical(self):
        plus = apply_gate(StateVector.zero_state(1), GateOp.h(0))
        assert sample_measurement(plus, 1000, rng_seed=7) == sample_measurement(plus, 1000, rng_seed=7)

    def test_shots_validation(self):
        with pytest.raises(SimulationError):
            sample_measurement(StateVector.zero_state(1), 0, rng_seed=0)


class TestGateMatrices:
    @pytest.mark.parametrize(
        "op",
        [
            GateOp.h(0),
            GateOp.x(0),
            GateOp.rx(0.7, 0),
            GateOp.ry(-1.3, 0),
            GateOp.rz(2.1, 0),
            GateOp.cz(0, 1),
            GateOp.cnot(0, 1),
            GateOp.swap(0, 1),
        ],
    )
    def test_unitarity(self, op):
        u = gate_matrix(op)
        defect = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
        assert defect < 1e-12

    def test_gateop_validation(self):
        with pytest.raises(SimulationError):
            GateOp("h", (0, 1))
        with pytest.raises(SimulationError):
            GateOp("cz", (1, 1))
        with pytest.raises(SimulationError):
            GateOp("rx", (0,))  # missing angle
        with pytest.raises(SimulationError):
            GateOp("h", (0,), 1.0)  # angle on a fixed gate
        with pytest.raises(SimulationError):
            GateOp("nope", (0,))
