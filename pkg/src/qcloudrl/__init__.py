"""qcloudrl: quantum cloud scheduling with quantum-reinforcement-learning agents.

A small exact quantum simulator (statevector + density matrix with noise
channels), a data re-uploading PQC with softmax-policy and Q-value heads,
parameter-shift gradients with Adam, a queue-aware scheduling environment
over QPU profiles, greedy/PQC/MLP agents, a QASM-subset workload parser, and
a CLI that writes CSV curves and SVG figures.
"""

__version__ = "0.1.0"

from . import agents, autograd, checkpoint, cloudenv, config, pqc, qsim, reporting, workload

__all__ = [
    "__version__",
    "agents",
    "autograd",
    "checkpoint",
    "cloudenv",
    "config",
    "pqc",
    "qsim",
    "reporting",
    "workload",
]
