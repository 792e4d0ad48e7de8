"""Pure-state simulation: statevector evolution, Z expectations, sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SimulationError
from .gates import Circuit, GateOp, rotation_matrix, _H, _X

MAX_STATEVECTOR_QUBITS = 12


@dataclass(frozen=True)
class StateVector:
    """Dense amplitudes of an n-qubit pure state (little-endian basis)."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_STATEVECTOR_QUBITS:
            raise SimulationError(
                f"n_qubits must be in [1, {MAX_STATEVECTOR_QUBITS}], got {self.n_qubits}"
            )
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.n_qubits,):
            raise SimulationError(
                f"amplitude vector must have length 2^{self.n_qubits}, got shape {amps.shape}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @staticmethod
    def zero_state(n_qubits: int) -> "StateVector":
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[0] = 1.0
        return StateVector(n_qubits, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class ZObservable:
    """Tensor product of Pauli-Z on the qubits in ``z_mask``, identity elsewhere."""

    z_mask: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "z_mask", frozenset(self.z_mask))
        if any(q < 0 for q in self.z_mask):
            raise SimulationError(f"negative qubit index in observable mask: {self.z_mask}")

    def bitmask(self) -> int:
        m = 0
        for q in self.z_mask:
            m |= 1 << q
        return m


def z_signs(n_qubits: int, mask: int) -> np.ndarray:
    """Eigenvalue (+1/-1) of the masked Z product for every basis index."""
    idx = np.arange(2**n_qubits)
    parity = np.zeros_like(idx)
    q = 0
    while (mask >> q) != 0:
        if (mask >> q) & 1:
            parity ^= (idx >> q) & 1
        q += 1
    return 1.0 - 2.0 * parity


def _validate_targets(op: GateOp, n_qubits: int) -> None:
    for t in op.targets:
        if not 0 <= t < n_qubits:
            raise SimulationError(
                f"gate {op.kind!r}: target {t} out of range for {n_qubits} qubits"
            )


def _apply_1q(amps: np.ndarray, u: np.ndarray, q: int) -> None:
    idx = np.arange(len(amps))
    idx0 = idx[(idx >> q) & 1 == 0]
    idx1 = idx0 + (1 << q)
    a, b = amps[idx0], amps[idx1]
    amps[idx0] = u[0, 0] * a + u[0, 1] * b
    amps[idx1] = u[1, 0] * a + u[1, 1] * b


def apply_gate(state: StateVector, op: GateOp) -> StateVector:
    """Return U|psi> for a single gate; the input state is not mutated."""
    _validate_targets(op, state.n_qubits)
    amps = state.amplitudes.copy()
    if op.kind == "h":
        _apply_1q(amps, _H, op.targets[0])
    elif op.kind == "x":
        _apply_1q(amps, _X, op.targets[0])
    elif op.kind in ("rx", "ry", "rz"):
        _apply_1q(amps, rotation_matrix(op.kind, op.theta), op.targets[0])
    elif op.kind == "cz":
        a, b = op.targets
        idx = np.arange(len(amps))
        both = ((idx >> a) & 1 == 1) & ((idx >> b) & 1 == 1)
        amps[both] = -amps[both]
    elif op.kind == "cnot":
        c, t = op.targets
        idx = np.arange(len(amps))
        i_ct = idx[((idx >> c) & 1 == 1) & ((idx >> t) & 1 == 0)]
        j_ct = i_ct + (1 << t)
        amps[i_ct], amps[j_ct] = amps[j_ct], amps[i_ct].copy()
    elif op.kind == "swap":
        a, b = op.targets
        idx = np.arange(len(amps))
        i_ab = idx[((idx >> a) & 1 == 1) & ((idx >> b) & 1 == 0)]
        j_ab = i_ab - (1 << a) + (1 << b)
        amps[i_ab], amps[j_ab] = amps[j_ab], amps[i_ab].copy()
    else:  # unreachable given GateOp validation
        raise SimulationError(f"unknown gate kind {op.kind!r}")
    return StateVector(state.n_qubits, amps)


def run_circuit(initial: StateVector, circuit: Circuit) -> StateVector:
    """Apply all circuit ops in order."""
    if circuit.n_qubits != initial.n_qubits:
        raise SimulationError(
            f"circuit is on {circuit.n_qubits} qubits but state has {initial.n_qubits}"
        )
    state = initial
    for i, op in enumerate(circuit.ops):
        try:
            state = apply_gate(state, op)
        except SimulationError as exc:
            raise SimulationError(f"op {i}: {exc}") from exc
    return state


def expectation_z(state: StateVector, obs: ZObservable) -> float:
    """<psi| Z_mask |psi> = sum_b (-1)^parity(b & mask) |psi_b|^2."""
    mask = obs.bitmask()
    if mask >> state.n_qubits:
        raise SimulationError(
            f"observable mask {sorted(obs.z_mask)} exceeds {state.n_qubits} qubits"
        )
    probs = np.abs(state.amplitudes) ** 2
    return float(np.dot(z_signs(state.n_qubits, mask), probs))


def sample_measurement(state: StateVector, shots: int, rng_seed: int) -> dict[str, int]:
    """Sample computational-basis outcomes; bitstrings are MSB-first (qubit 0 rightmost).

    Identical seed gives identical counts.
    """
    if shots < 1:
        raise SimulationError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(rng_seed)
    probs = np.abs(state.amplitudes) ** 2
    probs = probs / probs.sum()
    outcomes = rng.choice(len(probs), size=shots, p=probs)
    values, counts = np.unique(outcomes, return_counts=True)
    n = state.n_qubits
    return {format(int(v), f"0{n}b"): int(c) for v, c in zip(values, counts)}
