"""Mixed-state simulation: density matrices, Kraus channels, noisy circuit runs.

Noise placement: channels in a :class:`NoisePolicy` are applied after every
gate, on that gate's target qubits only. Channels are single-qubit maps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ChannelError, SimulationError
from .gates import Circuit, GateOp, gate_matrix, rotation_matrix, _H, _X
from .statevector import StateVector, ZObservable, z_signs

MAX_DENSITY_QUBITS = 8

_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class DensityMatrix:
    """Dense 2^n x 2^n density operator of an n-qubit register."""

    n_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_DENSITY_QUBITS:
            raise SimulationError(
                f"n_qubits must be in [1, {MAX_DENSITY_QUBITS}], got {self.n_qubits}"
            )
        rho = np.asarray(self.entries, dtype=complex)
        dim = 2**self.n_qubits
        if rho.shape != (dim, dim):
            raise SimulationError(f"density matrix must be {dim}x{dim}, got {rho.shape}")
        object.__setattr__(self, "entries", rho)

    @staticmethod
    def zero_state(n_qubits: int) -> "DensityMatrix":
        dim = 2**n_qubits
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = 1.0
        return DensityMatrix(n_qubits, rho)

    @staticmethod
    def from_statevector(state: StateVector) -> "DensityMatrix":
        psi = state.amplitudes
        return DensityMatrix(state.n_qubits, np.outer(psi, psi.conj()))

    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))


@dataclass(frozen=True)
class KrausChannel:
    """Single-qubit CPTP map given by 2x2 Kraus operators {K_k}.

    Completeness sum_k K_k^dag K_k = I is enforced at construction
    (within 1e-10).
    """

    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        if not ops:
            raise ChannelError("channel needs at least one Kraus operator")
        for k in ops:
            if k.shape != (2, 2):
                raise ChannelError(f"Kraus operators must be 2x2, got shape {k.shape}")
        object.__setattr__(self, "operators", ops)
        defect = np.max(np.abs(self.completeness_defect()))
        if defect > 1e-10:
            raise ChannelError(f"channel is not trace preserving: |sum K^dag K - I| = {defect:.3e}")

    def completeness_defect(self) -> np.ndarray:
        acc = np.zeros((2, 2), dtype=complex)
        for k in self.operators:
            acc += k.conj().T @ k
        return acc - np.eye(2)

    def is_trivial(self) -> bool:
        """True when the channel is exactly the identity map."""
        live = [k for k in self.operators if np.max(np.abs(k)) > 0.0]
        return len(live) == 1 and np.array_equal(live[0], np.eye(2, dtype=complex))


def amplitude_damping(gamma: float) -> KrausChannel:
    """Energy-relaxation channel: |1> decays to |0> with probability gamma.

    K0 = diag(1, sqrt(1-gamma)), K1 = sqrt(gamma) |0><1|.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ChannelError(f"amplitude damping gamma must be in [0, 1], got {gamma}")
    k0 = np.array([[1, 0], [0, np.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausChannel((k0, k1))


def depolarizing(p: float) -> KrausChannel:
    """Depolarizing channel: random Pauli error with total probability 3p/4.

    Kraus set {sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z}.
    """
    if not 0.0 <= p <= 1.0:
        raise ChannelError(f"depolarizing p must be in [0, 1], got {p}")
    k0 = np.sqrt(1.0 - 0.75 * p) * np.eye(2, dtype=complex)
    k1 = np.sqrt(0.25 * p) * _PAULI_X
    k2 = np.sqrt(0.25 * p) * _PAULI_Y
    k3 = np.sqrt(0.25 * p) * _PAULI_Z
    return KrausChannel((k0, k1, k2, k3))


@dataclass(frozen=True)
class NoisePolicy:
    """Channels applied, in order, to each target qubit after every gate."""

    channels: tuple[KrausChannel, ...] = ()

    @staticmethod
    def from_strengths(gamma: float = 0.0, p: float = 0.0) -> "NoisePolicy":
        """Amplitude damping followed by depolarizing, at the given strengths."""
        return NoisePolicy((amplitude_damping(gamma), depolarizing(p)))

    def active_channels(self) -> tuple[KrausChannel, ...]:
        return tuple(ch for ch in self.channels if not ch.is_trivial())


def _gate_unitary_1q(op: GateOp) -> np.ndarray:
    if op.kind == "h":
        return _H
    if op.kind == "x":
        return _X
    return rotation_matrix(op.kind, op.theta)


def _conjugate_1q(rho: np.ndarray, u: np.ndarray, q: int) -> np.ndarray:
    """rho -> (U_q rho U_q^dag) for a single-qubit u embedded on qubit q."""
    dim = rho.shape[0]
    idx = np.arange(dim)
    idx0 = idx[(idx >> q) & 1 == 0]
    idx1 = idx0 + (1 << q)
    out = rho.copy()
    r0, r1 = out[idx0, :], out[idx1, :]
    out[idx0, :] = u[0, 0] * r0 + u[0, 1] * r1
    out[idx1, :] = u[1, 0] * r0 + u[1, 1] * r1
    c0, c1 = out[:, idx0], out[:, idx1]
    out[:, idx0] = np.conj(u[0, 0]) * c0 + np.conj(u[0, 1]) * c1
    out[:, idx1] = np.conj(u[1, 0]) * c0 + np.conj(u[1, 1]) * c1
    return out


def _basis_permutation(op: GateOp, n_qubits: int) -> np.ndarray:
    """Basis-index permutation realized by cnot/swap."""
    idx = np.arange(2**n_qubits)
    if op.kind == "cnot":
        c, t = op.targets
        flip = ((idx >> c) & 1) == 1
        return np.where(flip, idx ^ (1 << t), idx)
    a, b = op.targets
    bit_a, bit_b = (idx >> a) & 1, (idx >> b) & 1
    differ = bit_a != bit_b
    return np.where(differ, idx ^ ((1 << a) | (1 << b)), idx)


def apply_unitary_gate(rho: DensityMatrix, op: GateOp) -> DensityMatrix:
    """rho -> U rho U^dag for one gate."""
    for t in op.targets:
        if not 0 <= t < rho.n_qubits:
            raise SimulationError(
                f"gate {op.kind!r}: target {t} out of range for {rho.n_qubits} qubits"
            )
    if op.kind in ("h", "x", "rx", "ry", "rz"):
        return DensityMatrix(rho.n_qubits, _conjugate_1q(rho.entries, _gate_unitary_1q(op), op.targets[0]))
    if op.kind == "cz":
        a, b = op.targets
        idx = np.arange(2**rho.n_qubits)
        both = ((idx >> a) & 1 == 1) & ((idx >> b) & 1 == 1)
        out = rho.entries.copy()
        out[both, :] *= -1
        out[:, both] *= -1
        return DensityMatrix(rho.n_qubits, out)
    perm = _basis_permutation(op, rho.n_qubits)
    # P rho P^dag with P a basis permutation: entry (i, j) moves to (perm[i], perm[j])
    out = np.empty_like(rho.entries)
    out[np.ix_(perm, perm)] = rho.entries
    return DensityMatrix(rho.n_qubits, out)


def apply_channel(rho: DensityMatrix, channel: KrausChannel, q: int) -> DensityMatrix:
    """rho -> sum_k K_k rho K_k^dag with K_k acting on qubit q."""
    if not 0 <= q < rho.n_qubits:
        raise SimulationError(f"channel target {q} out of range for {rho.n_qubits} qubits")
    dim = rho.entries.shape[0]
    idx = np.arange(dim)
    idx0 = idx[(idx >> q) & 1 == 0]
    idx1 = idx0 + (1 << q)
    acc = np.zeros_like(rho.entries)
    for k in channel.operators:
        tmp = np.zeros_like(rho.entries)
        r0, r1 = rho.entries[idx0, :], rho.entries[idx1, :]
        tmp[idx0, :] = k[0, 0] * r0 + k[0, 1] * r1
        tmp[idx1, :] = k[1, 0] * r0 + k[1, 1] * r1
        c0, c1 = tmp[:, idx0].copy(), tmp[:, idx1].copy()
        tmp[:, idx0] = np.conj(k[0, 0]) * c0 + np.conj(k[0, 1]) * c1
        tmp[:, idx1] = np.conj(k[1, 0]) * c0 + np.conj(k[1, 1]) * c1
        acc += tmp
    return DensityMatrix(rho.n_qubits, acc)


def run_circuit_noisy(initial: DensityMatrix, circuit: Circuit, noise: NoisePolicy) -> DensityMatrix:
    """Gate-by-gate evolution: conjugate by U, then apply the policy's channels
    to the gate's target qubits."""
    if circuit.n_qubits != initial.n_qubits:
        raise SimulationError(
            f"circuit is on {circuit.n_qubits} qubits but density matrix has {initial.n_qubits}"
        )
    channels = noise.active_channels()
    rho = initial
    for i, op in enumerate(circuit.ops):
        try:
            rho = apply_unitary_gate(rho, op)
            for q in op.targets:
                for ch in channels:
                    rho = apply_channel(rho, ch, q)
        except SimulationError as exc:
            raise SimulationError(f"op {i}: {exc}") from exc
    return rho


def expectation_z_density(rho: DensityMatrix, obs: ZObservable) -> float:
    """Tr(rho Z_mask); agrees with the pure-state expectation on |psi><psi|."""
    mask = obs.bitmask()
    if mask >> rho.n_qubits:
        raise SimulationError(f"observable mask {sorted(obs.z_mask)} exceeds {rho.n_qubits} qubits")
    diag = np.real(np.diagonal(rho.entries))
    return float(np.dot(z_signs(rho.n_qubits, mask), diag))


def gate_is_unitary(op: GateOp, tol: float = 1e-12) -> bool:
    u = gate_matrix(op)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) < tol)
