"""Exception types shared across the toolkit."""

from __future__ import annotations


class QcloudrlError(Exception):
    """Base class for all toolkit errors."""


class SimulationError(QcloudrlError, ValueError):
    """Invalid gate, target index, or state passed to the simulator."""


class ChannelError(QcloudrlError, ValueError):
    """Noise-channel parameter out of range or non-CPTP operator set."""


class DimensionError(QcloudrlError, ValueError):
    """Array shapes inconsistent with the declared architecture."""


class EnvironmentError_(QcloudrlError, ValueError):
    """Invalid action or misconfigured scheduling environment."""


class QasmParseError(QcloudrlError, ValueError):
    """QASM input outside the supported subset.

    Carries the 1-based line number of the offending statement.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class CheckpointError(QcloudrlError, ValueError):
    """Malformed or mismatched checkpoint file."""


class ConfigError(QcloudrlError, ValueError):
    """Invalid experiment configuration (CLI exit code 1)."""


class TrainingError(QcloudrlError, RuntimeError):
    """Numerical failure during training, e.g. non-finite loss (exit code 2)."""
