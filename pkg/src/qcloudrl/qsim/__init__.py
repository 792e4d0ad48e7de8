"""Exact small-register quantum simulation: statevectors, density matrices,
noise channels, Z expectations, and measurement sampling."""

from .gates import Circuit, GateOp, gate_matrix, rotation_matrix
from .statevector import (
    MAX_STATEVECTOR_QUBITS,
    StateVector,
    ZObservable,
    apply_gate,
    expectation_z,
    run_circuit,
    sample_measurement,
    z_signs,
)
from .density import (
    MAX_DENSITY_QUBITS,
    DensityMatrix,
    KrausChannel,
    NoisePolicy,
    amplitude_damping,
    apply_channel,
    apply_unitary_gate,
    depolarizing,
    expectation_z_density,
    gate_is_unitary,
    run_circuit_noisy,
)

__all__ = [
    "Circuit",
    "GateOp",
    "gate_matrix",
    "rotation_matrix",
    "MAX_STATEVECTOR_QUBITS",
    "MAX_DENSITY_QUBITS",
    "StateVector",
    "ZObservable",
    "apply_gate",
    "expectation_z",
    "run_circuit",
    "sample_measurement",
    "z_signs",
    "DensityMatrix",
    "KrausChannel",
    "NoisePolicy",
    "amplitude_damping",
    "apply_channel",
    "apply_unitary_gate",
    "depolarizing",
    "expectation_z_density",
    "gate_is_unitary",
    "run_circuit_noisy",
]
