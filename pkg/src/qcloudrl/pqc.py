"""Data re-uploading parameterized quantum circuit with per-action observables.

Circuit layout for L layers on n qubits:

    U_var(phi_0) U_enc(x, lambda_0) U_var(phi_1) ... U_enc(x, lambda_{L-1}) U_var(phi_L)

where a variational block applies RZ, RY, RZ on every qubit followed by a CZ
ring, and an encoding block applies RX(lambda_{l,j} * x_j) on qubit j. Action
``a`` reads the Z expectation of qubit ``a`` scaled by the trainable weight
``w_a``; the policy head is a softmax over those weighted expectations, the
Q head evaluates them on the squashed input tanh(lambda_0 * s).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .qsim import kernels
from .qsim.density import DensityMatrix, NoisePolicy, expectation_z_density, run_circuit_noisy
from .qsim.gates import Circuit, GateOp
from .qsim.statevector import StateVector, ZObservable, expectation_z, run_circuit


@dataclass(frozen=True)
class PqcArchitecture:
    """Shape of the re-uploading circuit; defaults match the shipped experiments."""

    n_qubits: int = 8
    n_layers: int = 5
    n_actions: int = 5

    def __post_init__(self):
        if self.n_qubits < 1 or self.n_layers < 1 or self.n_actions < 1:
            raise DimensionError(f"architecture fields must be positive: {self}")
        if self.n_actions > self.n_qubits:
            raise DimensionError(
                f"n_actions ({self.n_actions}) cannot exceed n_qubits ({self.n_qubits}): "
                "each action reads one qubit's Z observable"
            )

    @property
    def n_phi(self) -> int:
        return 3 * self.n_qubits * (self.n_layers + 1)

    @property
    def n_lambda(self) -> int:
        return self.n_qubits * self.n_layers

    @property
    def n_parameters(self) -> int:
        return self.n_phi + self.n_lambda + self.n_actions


@dataclass(frozen=True)
class ParameterSet:
    """Trainable variables: rotation angles phi, input scalings lambda, weights w."""

    phi: np.ndarray
    lam: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        for name in ("phi", "lam", "w"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if not np.all(np.isfinite(arr)):
                raise DimensionError(f"parameter array {name!r} contains non-finite entries")
            object.__setattr__(self, name, arr)

    def validate_for(self, arch: PqcArchitecture) -> None:
        expected = {"phi": arch.n_phi, "lam": arch.n_lambda, "w": arch.n_actions}
        for name, size in expected.items():
            arr = getattr(self, name)
            if arr.shape != (size,):
                raise DimensionError(
                    f"parameter array {name!r} has shape {arr.shape}, expected ({size},) for {arch}"
                )

    def as_dict(self) -> dict[str, np.ndarray]:
        return {"phi": self.phi.copy(), "lambda": self.lam.copy(), "w": self.w.copy()}

    @staticmethod
    def from_dict(d: dict[str, np.ndarray]) -> "ParameterSet":
        return ParameterSet(d["phi"], d["lambda"], d["w"])

    def count(self) -> int:
        return self.phi.size + self.lam.size + self.w.size


def init_parameters(arch: PqcArchitecture, rng: np.random.Generator) -> ParameterSet:
    """phi ~ Uniform(-pi, pi); lambda and w start at one."""
    phi = rng.uniform(-math.pi, math.pi, size=arch.n_phi)
    return ParameterSet(phi, np.ones(arch.n_lambda), np.ones(arch.n_actions))


def _ring_edges(n: int) -> list[tuple[int, int]]:
    # CZ is symmetric, so the 2-qubit "ring" collapses to a single edge
    if n < 2:
        return []
    if n == 2:
        return [(0, 1)]
    return [(i, (i + 1) % n) for i in range(n)]


@functools.lru_cache(maxsize=None)
def circuit_template(arch: PqcArchitecture) -> tuple:
    """Op tuples (kind, q, q2, src, idx) realizing the layered layout.

    phi index: (layer*n + qubit)*3 + rotation slot (RZ, RY, RZ);
    encoding index: layer*n + qubit.
    """
    n = arch.n_qubits
    ops: list[tuple] = []
    for layer in range(arch.n_layers + 1):
        for q in range(n):
            base = (layer * n + q) * 3
            ops.append(("rz", q, -1, kernels.PHI, base))
            ops.append(("ry", q, -1, kernels.PHI, base + 1))
            ops.append(("rz", q, -1, kernels.PHI, base + 2))
        for a, b in _ring_edges(n):
            ops.append(("cz", a, b, kernels.FIXED, -1))
        if layer < arch.n_layers:
            for q in range(n):
                ops.append(("rx", q, -1, kernels.ENC, layer * n + q))
    return tuple(ops)


def encoding_angles(arch: PqcArchitecture, params: ParameterSet, x: np.ndarray) -> np.ndarray:
    """Flat encoding angles lambda_{l,j} * x_j, indexed l*n + j."""
    return params.lam * np.tile(x, arch.n_layers)


def _check_inputs(arch: PqcArchitecture, params: ParameterSet, s) -> np.ndarray:
    params.validate_for(arch)
    x = np.asarray(s, dtype=float)
    if x.shape != (arch.n_qubits,):
        raise DimensionError(
            f"observation has shape {x.shape}, expected ({arch.n_qubits},) for {arch}"
        )
    return x


def build_circuit(arch: PqcArchitecture, params: ParameterSet, s) -> Circuit:
    """Materialize the gate list for observation ``s`` (|s_j| <= 1 expected)."""
    x = _check_inputs(arch, params, s)
    enc = encoding_angles(arch, params, x)
    ops = []
    for kind, q, q2, src, idx in circuit_template(arch):
        if src == kernels.PHI:
            ops.append(GateOp(kind, (q,), float(params.phi[idx])))
        elif src == kernels.ENC:
            ops.append(GateOp(kind, (q,), float(enc[idx])))
        else:
            ops.append(GateOp(kind, (q, q2)))
    return Circuit(arch.n_qubits, tuple(ops))


class PureEvaluator:
    """Exact statevector evaluation of the template."""

    noisy = False

    def z_from_angles(self, arch: PqcArchitecture, phi: np.ndarray, enc: np.ndarray) -> np.ndarray:
        ops = []
        for kind, q, q2, src, idx in circuit_template(arch):
            if src == kernels.PHI:
                ops.append(GateOp(kind, (q,), float(phi[idx])))
            elif src == kernels.ENC:
                ops.append(GateOp(kind, (q,), float(enc[idx])))
            else:
                ops.append(GateOp(kind, (q, q2)))
        psi = run_circuit(StateVector.zero_state(arch.n_qubits), Circuit(arch.n_qubits, tuple(ops)))
        return np.array(
            [expectation_z(psi, ZObservable(frozenset({q}))) for q in range(arch.n_actions)]
        )

    def z_from_angle_batch(
        self, arch: PqcArchitecture, phi_batch: np.ndarray, enc_batch: np.ndarray
    ) -> np.ndarray:
        return kernels.statevector_z_batch(
            arch.n_qubits, circuit_template(arch), phi_batch, enc_batch, arch.n_actions
        )


class NoisyEvaluator:
    """Density-matrix evaluation with a per-gate noise policy."""

    noisy = True

    def __init__(self, noise: NoisePolicy):
        self.noise = noise

    def z_from_angles(self, arch: PqcArchitecture, phi: np.ndarray, enc: np.ndarray) -> np.ndarray:
        ops = []
        for kind, q, q2, src, idx in circuit_template(arch):
            if src == kernels.PHI:
                ops.append(GateOp(kind, (q,), float(phi[idx])))
            elif src == kernels.ENC:
                ops.append(GateOp(kind, (q,), float(enc[idx])))
            else:
                ops.append(GateOp(kind, (q, q2)))
        rho = run_circuit_noisy(
            DensityMatrix.zero_state(arch.n_qubits), Circuit(arch.n_qubits, tuple(ops)), self.noise
        )
        return np.array(
            [expectation_z_density(rho, ZObservable(frozenset({q}))) for q in range(arch.n_actions)]
        )

    def z_from_angle_batch(
        self, arch: PqcArchitecture, phi_batch: np.ndarray, enc_batch: np.ndarray
    ) -> np.ndarray:
        return kernels.density_z_batch(
            arch.n_qubits, circuit_template(arch), phi_batch, enc_batch, arch.n_actions, self.noise
        )


PURE_EVALUATOR = PureEvaluator()


def raw_z_expectations(
    arch: PqcArchitecture, params: ParameterSet, s, evaluator=None
) -> np.ndarray:
    """Unweighted per-action-qubit Z expectations, each in [-1, 1]."""
    x = _check_inputs(arch, params, s)
    ev = evaluator if evaluator is not None else PURE_EVALUATOR
    return ev.z_from_angles(arch, params.phi, encoding_angles(arch, params, x))


def action_expectations(
    arch: PqcArchitecture, params: ParameterSet, s, evaluator=None
) -> np.ndarray:
    """<O_a> = w_a * <Z on qubit a>."""
    return params.w * raw_z_expectations(arch, params, s, evaluator)


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - np.max(logits)
    e = np.exp(shifted)
    return e / e.sum()


def policy(arch: PqcArchitecture, params: ParameterSet, s, evaluator=None) -> np.ndarray:
    """Softmax action distribution over the weighted expectations."""
    return softmax(action_expectations(arch, params, s, evaluator))


def squash_input(arch: PqcArchitecture, params: ParameterSet, s) -> np.ndarray:
    """Q-head input squash s'_j = tanh(lambda_{0,j} * s_j)."""
    x = _check_inputs(arch, params, s)
    return np.tanh(params.lam[: arch.n_qubits] * x)


def q_values(arch: PqcArchitecture, params: ParameterSet, s, evaluator=None) -> np.ndarray:
    """Action values <O_a> evaluated on the squashed observation."""
    return action_expectations(arch, params, squash_input(arch, params, s), evaluator)
