"""Re-uploading PQC construction, heads, and checkpoint round-trips."""

import numpy as np
import pytest

from qcloudrl.checkpoint import load_checkpoint, save_pqc_checkpoint
from qcloudrl.errors import CheckpointError, DimensionError
from qcloudrl.pqc import (
    NoisyEvaluator,
    ParameterSet,
    PqcArchitecture,
    action_expectations,
    build_circuit,
    init_parameters,
    policy,
    q_values,
    raw_z_expectations,
    softmax,
    squash_input,
)
from qcloudrl.qsim import NoisePolicy


@pytest.fixture
def small_arch():
    return PqcArchitecture(n_qubits=3, n_layers=1, n_actions=3)


def zero_params(arch: PqcArchitecture) -> ParameterSet:
    return ParameterSet(np.zeros(arch.n_phi), np.ones(arch.n_lambda), np.ones(arch.n_actions))


class TestArchitecture:
    def test_parameter_count_formula(self):
        arch = PqcArchitecture(8, 5, 5)
        assert arch.n_phi == 3 * 8 * 6 == 144
        assert arch.n_lambda == 8 * 5 == 40
        assert arch.n_parameters == 189

    def test_actions_capped_by_qubits(self):
        with pytest.raises(DimensionError):
            PqcArchitecture(n_qubits=3, n_layers=1, n_actions=4)

    def test_positive_fields(self):
        with pytest.raises(DimensionError):
            PqcArchitecture(n_qubits=0, n_layers=1, n_actions=1)


class TestBuildCircuit:
    def test_gate_count_n3_l1(self, small_arch):
        # 2 variational blocks of (9 rotations + 3 CZ) plus one encoding block of 3
        circuit = build_circuit(small_arch, zero_params(small_arch), np.zeros(3))
        assert len(circuit) == 27

    def test_two_qubit_ring_collapses_to_one_cz(self):
        arch = PqcArchitecture(2, 1, 2)
        circuit = build_circuit(arch, zero_params(arch), np.zeros(2))
        assert sum(1 for op in circuit.ops if op.kind == "cz") == 2  # one per var block

    def test_identity_at_zero_angles(self, small_arch):
        z = raw_z_expectations(small_arch, zero_params(small_arch), np.zeros(3))
        np.testing.assert_allclose(z, np.ones(3), atol=1e-12)

    def test_deterministic_op_list(self, small_arch):
        rng = np.random.default_rng(0)
        params = init_parameters(small_arch, rng)
        s = np.array([0.2, 0.4, 0.9])
        c1 = build_circuit(small_arch, params, s)
        c2 = build_circuit(small_arch, params, s)
        assert c1.ops == c2.ops

    def test_dimension_mismatch(self, small_arch):
        with pytest.raises(DimensionError):
            build_circuit(small_arch, zero_params(small_arch), np.zeros(4))
        bad = ParameterSet(np.zeros(5), np.ones(small_arch.n_lambda), np.ones(3))
        with pytest.raises(DimensionError):
            build_circuit(small_arch, bad, np.zeros(3))


class TestActionExpectations:
    def test_zero_state_gives_ones(self, small_arch):
        out = action_expectations(small_arch, zero_params(small_arch), np.zeros(3))
        np.testing.assert_allclose(out, np.ones(3), atol=1e-12)

    def test_weight_linearity(self, small_arch):
        rng = np.random.default_rng(1)
        params = init_parameters(small_arch, rng)
        s = rng.uniform(0, 1, 3)
        base = action_expectations(small_arch, params, s)
        scaled = ParameterSet(params.phi, params.lam, params.w * 2.5)
        np.testing.assert_allclose(
            action_expectations(small_arch, scaled, s), 2.5 * base, atol=1e-12
        )

    def test_single_qubit_ry_closed_form(self):
        # phi layout per qubit is (RZ, RY, RZ); only the RY angle is nonzero,
        # so <Z> = cos(angle) and RY(pi/2)|0> gives zero.
        arch = PqcArchitecture(1, 1, 1)
        phi = np.zeros(arch.n_phi)
        phi[1] = np.pi / 2
        params = ParameterSet(phi, np.zeros(arch.n_lambda), np.ones(1))
        out = action_expectations(arch, params, np.zeros(1))
        assert out[0] == pytest.approx(0.0, abs=1e-10)

    def test_raw_z_bounded(self, small_arch):
        rng = np.random.default_rng(2)
        for _ in range(20):
            params = init_parameters(small_arch, rng)
            s = rng.uniform(0, 1, 3)
            z = raw_z_expectations(small_arch, params, s)
            assert np.all(np.abs(z) <= 1.0 + 1e-12)


class TestPolicy:
    def test_uniform_for_equal_logits(self, small_arch):
        probs = policy(small_arch, zero_params(small_arch), np.zeros(3))
        np.testing.assert_allclose(probs, np.full(3, 1 / 3), atol=1e-12)

    def test_softmax_reference_value(self):
        # scalar softmax oracle: softmax(1,0,0,0,0)
        probs = softmax(np.array([1.0, 0.0, 0.0, 0.0, 0.0]))
        np.testing.assert_allclose(
            probs, [0.40460968, 0.14884758, 0.14884758, 0.14884758, 0.14884758], atol=1e-7
        )
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)

    def test_shift_invariance(self):
        logits = np.array([0.3, -0.7, 1.1])
        np.testing.assert_allclose(softmax(logits), softmax(logits + 42.0), atol=1e-12)

    def test_valid_distribution_and_argmax_consistency(self, small_arch):
        rng = np.random.default_rng(3)
        for _ in range(20):
            params = init_parameters(small_arch, rng)
            s = rng.uniform(0, 1, 3)
            probs = policy(small_arch, params, s)
            logits = action_expectations(small_arch, params, s)
            assert np.all(probs > 0)
            assert probs.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.argmax(probs) == np.argmax(logits)


class TestQValues:
    def test_zero_lambda_squash(self, small_arch):
        params = ParameterSet(
            np.zeros(small_arch.n_phi), np.zeros(small_arch.n_lambda), np.ones(3)
        )
        out = q_values(small_arch, params, np.array([5.0, -3.0, 0.7]))
        np.testing.assert_allclose(out, np.ones(3), atol=1e-12)

    def test_bounded_by_weights(self, small_arch):
        rng = np.random.default_rng(4)
        for _ in range(20):
            params = init_parameters(small_arch, rng)
            w = rng.normal(size=3) * 3
            params = ParameterSet(params.phi, params.lam, w)
            s = rng.uniform(-4, 4, 3)
            q = q_values(small_arch, params, s)
            assert np.all(np.abs(q) <= np.abs(w) + 1e-12)

    def test_single_qubit_closed_form(self):
        # encoding only: |0> -> RX(lam * tanh(lam * s)) |0>, so <Z> = cos(angle)
        arch = PqcArchitecture(1, 1, 1)
        lam, s = np.array([0.8]), np.array([1.7])
        params = ParameterSet(np.zeros(arch.n_phi), lam, np.ones(1))
        expected = np.cos(lam[0] * np.tanh(lam[0] * s[0]))
        assert q_values(arch, params, s)[0] == pytest.approx(expected, abs=1e-9)

    def test_squash_input_matches_tanh(self, small_arch):
        rng = np.random.default_rng(5)
        params = init_parameters(small_arch, rng)
        s = rng.uniform(-2, 2, 3)
        np.testing.assert_allclose(
            squash_input(small_arch, params, s), np.tanh(params.lam[:3] * s), atol=1e-15
        )


class TestReuploadingNontriviality:
    def test_second_layer_lambda_matters(self):
        # output must depend on the encoding scale of layer >= 2
        arch = PqcArchitecture(2, 2, 2)
        rng = np.random.default_rng(6)
        params = init_parameters(arch, rng)
        s = np.array([0.6, 0.9])
        base = raw_z_expectations(arch, params, s)
        lam2 = params.lam.copy()
        lam2[arch.n_qubits :] += 0.37  # second encoding layer only
        bumped = raw_z_expectations(arch, ParameterSet(params.phi, lam2, params.w), s)
        assert np.max(np.abs(base - bumped)) > 1e-6


class TestNoisyEvaluator:
    def test_zero_noise_matches_pure(self, small_arch):
        rng = np.random.default_rng(7)
        params = init_parameters(small_arch, rng)
        s = rng.uniform(0, 1, 3)
        pure = action_expectations(small_arch, params, s)
        noisy = action_expectations(
            small_arch, params, s, NoisyEvaluator(NoisePolicy.from_strengths(0.0, 0.0))
        )
        np.testing.assert_allclose(noisy, pure, atol=1e-10)

    def test_full_depolarizing_kills_signal(self, small_arch):
        rng = np.random.default_rng(8)
        params = init_parameters(small_arch, rng)
        s = rng.uniform(0, 1, 3)
        noisy = raw_z_expectations(
            small_arch, params, s, NoisyEvaluator(NoisePolicy.from_strengths(0.0, 1.0))
        )
        np.testing.assert_allclose(noisy, np.zeros(3), atol=1e-10)


class TestCheckpoint:
    def test_round_trip(self, tmp_path, small_arch):
        rng = np.random.default_rng(9)
        params = init_parameters(small_arch, rng)
        path = tmp_path / "ckpt.txt"
        save_pqc_checkpoint(path, small_arch, params)
        kind, (arch2, params2) = load_checkpoint(path)
        assert kind == "pqc"
        assert arch2 == small_arch
        np.testing.assert_array_equal(params2.phi, params.phi)
        np.testing.assert_array_equal(params2.lam, params.lam)
        np.testing.assert_array_equal(params2.w, params.w)

    def test_field_order_documented(self, tmp_path, small_arch):
        path = tmp_path / "ckpt.txt"
        save_pqc_checkpoint(path, small_arch, zero_params(small_arch))
        keys = [line.split(" ", 1)[0] for line in path.read_text().splitlines()]
        assert keys == ["format", "kind", "n_qubits", "n_layers", "n_actions", "phi", "lambda", "w"]

    def test_malformed_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("format nope\n")
        with pytest.raises(CheckpointError):
            load_checkpoint(path)

    def test_wrong_length_rejected(self, tmp_path, small_arch):
        path = tmp_path / "ckpt.txt"
        save_pqc_checkpoint(path, small_arch, zero_params(small_arch))
        text = path.read_text().replace("n_layers 1", "n_layers 2")
        path.write_text(text)
        with pytest.raises(CheckpointError, match="phi"):
            load_checkpoint(path)
