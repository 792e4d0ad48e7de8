"""Gate operations and the circuit IR shared by the PQC builder and the QASM parser.

Conventions (fixed project-wide):
  * little-endian basis ordering: qubit 0 is the least significant bit of the
    basis-state index;
  * rotations R_a(theta) = exp(-i * theta * sigma_a / 2), so
    RZ(theta) = diag(e^{-i theta/2}, e^{+i theta/2}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import SimulationError

SINGLE_QUBIT_KINDS = frozenset({"h", "x", "rx", "ry", "rz"})
TWO_QUBIT_KINDS = frozenset({"cz", "cnot", "swap"})
PARAMETRIC_KINDS = frozenset({"rx", "ry", "rz"})
GATE_KINDS = SINGLE_QUBIT_KINDS | TWO_QUBIT_KINDS

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class GateOp:
    """A single gate application: kind, target qubits, optional angle."""

    kind: str
    targets: tuple[int, ...]
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise SimulationError(f"unknown gate kind {self.kind!r}")
        arity = 1 if self.kind in SINGLE_QUBIT_KINDS else 2
        if len(self.targets) != arity:
            raise SimulationError(
                f"gate {self.kind!r} expects {arity} target(s), got {self.targets}"
            )
        if len(set(self.targets)) != len(self.targets):
            raise SimulationError(f"gate {self.kind!r} targets must be distinct: {self.targets}")
        if (self.theta is None) == (self.kind in PARAMETRIC_KINDS):
            raise SimulationError(f"gate {self.kind!r}: angle mismatch (theta={self.theta})")

    # constructors, so circuit-building code reads as ops.append(GateOp.rz(t, q))
    @staticmethod
    def h(q: int) -> "GateOp":
        return GateOp("h", (q,))

    @staticmethod
    def x(q: int) -> "GateOp":
        return GateOp("x", (q,))

    @staticmethod
    def rx(theta: float, q: int) -> "GateOp":
        return GateOp("rx", (q,), float(theta))

    @staticmethod
    def ry(theta: float, q: int) -> "GateOp":
        return GateOp("ry", (q,), float(theta))

    @staticmethod
    def rz(theta: float, q: int) -> "GateOp":
        return GateOp("rz", (q,), float(theta))

    @staticmethod
    def cz(a: int, b: int) -> "GateOp":
        return GateOp("cz", (a, b))

    @staticmethod
    def cnot(control: int, target: int) -> "GateOp":
        return GateOp("cnot", (control, target))

    @staticmethod
    def swap(a: int, b: int) -> "GateOp":
        return GateOp("swap", (a, b))


@dataclass(frozen=True)
class Circuit:
    """Ordered gate sequence over an n-qubit register."""

    n_qubits: int
    ops: tuple[GateOp, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise SimulationError(f"n_qubits must be positive, got {self.n_qubits}")
        object.__setattr__(self, "ops", tuple(self.ops))
        for i, op in enumerate(self.ops):
            for t in op.targets:
                if not 0 <= t < self.n_qubits:
                    raise SimulationError(
                        f"op {i} ({op.kind}): target {t} out of range for "
                        f"{self.n_qubits}-qubit circuit"
                    )

    def __len__(self) -> int:
        return len(self.ops)


def rotation_matrix(axis: str, theta: float) -> np.ndarray:
    """2x2 matrix of exp(-i*theta*sigma_axis/2)."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    if axis == "rx":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if axis == "ry":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if axis == "rz":
        return np.array([[c - 1j * s, 0], [0, c + 1j * s]], dtype=complex)
    raise SimulationError(f"not a rotation axis: {axis!r}")


def gate_matrix(op: GateOp) -> np.ndarray:
    """Dense matrix of the gate on its own target space.

    Single-qubit gates give 2x2. Two-qubit gates give 4x4 in the ordering
    index = bit(targets[0]) + 2*bit(targets[1]), i.e. targets[0] is the low
    bit; for cnot, targets = (control, target).
    """
    if op.kind == "h":
        return _H.copy()
    if op.kind == "x":
        return _X.copy()
    if op.kind in PARAMETRIC_KINDS:
        return rotation_matrix(op.kind, op.theta)
    if op.kind == "cz":
        return np.diag([1, 1, 1, -1]).astype(complex)
    if op.kind == "cnot":
        # control is the low bit: |b_t b_c>, flips b_t when b_c = 1
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0] = m[2, 2] = 1
        m[3, 1] = m[1, 3] = 1
        return m
    if op.kind == "swap":
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0] = m[3, 3] = 1
        m[2, 1] = m[1, 2] = 1
        return m
    raise SimulationError(f"unknown gate kind {op.kind!r}")
