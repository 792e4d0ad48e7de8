"""Flat text checkpoints: one ``key value...`` line per field, full float
precision (repr round-trip), fixed field order so files are portable.

PQC order:  format, kind, n_qubits, n_layers, n_actions, phi, lambda, w.
MLP order:  format, kind, sizes, activation, then W0, b0, W1, b1, ...
(weight matrices flattened row-major).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .agents.mlp import MlpModel
from .errors import CheckpointError
from .pqc import ParameterSet, PqcArchitecture

FORMAT_TAG = "qcloudrl-checkpoint-1"


def _fmt_array(values: np.ndarray) -> str:
    return " ".join(repr(float(v)) for v in np.asarray(values).ravel())


def save_pqc_checkpoint(path, arch: PqcArchitecture, params: ParameterSet) -> None:
    params.validate_for(arch)
    lines = [
        f"format {FORMAT_TAG}",
        "kind pqc",
        f"n_qubits {arch.n_qubits}",
        f"n_layers {arch.n_layers}",
        f"n_actions {arch.n_actions}",
        f"phi {_fmt_array(params.phi)}",
        f"lambda {_fmt_array(params.lam)}",
        f"w {_fmt_array(params.w)}",
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def save_mlp_checkpoint(path, model: MlpModel) -> None:
    lines = [
        f"format {FORMAT_TAG}",
        "kind mlp",
        "sizes " + " ".join(str(s) for s in model.sizes),
        "activation tanh",
    ]
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        lines.append(f"W{i} {_fmt_array(w)}")
        lines.append(f"b{i} {_fmt_array(b)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _read_fields(path) -> dict[str, str]:
    fields: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    for line in text.splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition(" ")
        fields[key] = value
    if fields.get("format") != FORMAT_TAG:
        raise CheckpointError(f"{path}: unknown checkpoint format {fields.get('format')!r}")
    return fields


def _parse_array(fields: dict[str, str], key: str, size: int, path) -> np.ndarray:
    if key not in fields:
        raise CheckpointError(f"{path}: missing field {key!r}")
    values = np.array([float(v) for v in fields[key].split()], dtype=float)
    if values.size != size:
        raise CheckpointError(f"{path}: field {key!r} has {values.size} values, expected {size}")
    return values


def load_checkpoint(path):
    """Returns ("pqc", (PqcArchitecture, ParameterSet)) or ("mlp", MlpModel)."""
    fields = _read_fields(path)
    kind = fields.get("kind")
    if kind == "pqc":
        try:
            arch = PqcArchitecture(
                n_qubits=int(fields["n_qubits"]),
                n_layers=int(fields["n_layers"]),
                n_actions=int(fields["n_actions"]),
            )
        except KeyError as exc:
            raise CheckpointError(f"{path}: missing architecture field {exc}") from exc
        params = ParameterSet(
            phi=_parse_array(fields, "phi", arch.n_phi, path),
            lam=_parse_array(fields, "lambda", arch.n_lambda, path),
            w=_parse_array(fields, "w", arch.n_actions, path),
        )
        return "pqc", (arch, params)
    if kind == "mlp":
        if "sizes" not in fields:
            raise CheckpointError(f"{path}: missing field 'sizes'")
        sizes = [int(s) for s in fields["sizes"].split()]
        weights, biases = [], []
        for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            weights.append(_parse_array(fields, f"W{i}", fan_in * fan_out, path).reshape(fan_in, fan_out))
            biases.append(_parse_array(fields, f"b{i}", fan_out, path))
        return "mlp", MlpModel(weights, biases)
    raise CheckpointError(f"{path}: unknown checkpoint kind {kind!r}")


def describe_checkpoint(path) -> str:
    """Human-readable summary for the inspect-checkpoint CLI verb."""
    kind, payload = load_checkpoint(path)
    lines = [f"checkpoint: {path}", f"kind: {kind}"]
    if kind == "pqc":
        arch, params = payload
        lines.append(
            f"architecture: n_qubits={arch.n_qubits} n_layers={arch.n_layers} n_actions={arch.n_actions}"
        )
        for name, arr in (("phi", params.phi), ("lambda", params.lam), ("w", params.w)):
            lines.append(
                f"{name}: len={arr.size} min={arr.min():+.6f} max={arr.max():+.6f} "
                f"l2={np.linalg.norm(arr):.6f}"
            )
        lines.append(f"total trainable parameters: {params.count()}")
    else:
        model = payload
        lines.append("sizes: " + " -> ".join(str(s) for s in model.sizes))
        for i, (w, b) in enumerate(zip(model.weights, model.biases)):
            lines.append(f"W{i}: shape={w.shape} l2={np.linalg.norm(w):.6f}")
            lines.append(f"b{i}: shape={b.shape} l2={np.linalg.norm(b):.6f}")
        lines.append(f"total trainable parameters: {model.count_parameters()}")
    return "\n".join(lines)
