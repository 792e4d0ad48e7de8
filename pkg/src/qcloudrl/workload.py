"""Task supply: manifest files, a synthetic workload generator, and a
minimal OpenQASM-2 subset parser that extracts width and layered depth.

Manifest format: CSV with header ``id,n_qubits,layers,gate_count,shots``,
UTF-8, LF line endings.
"""

from __future__ import annotations

import csv
import math
import re
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import QasmParseError, EnvironmentError_
from .qsim.gates import Circuit, GateOp

MANIFEST_HEADER = ["id", "n_qubits", "layers", "gate_count", "shots"]

WIDTH_MIN, WIDTH_MAX = 2, 50
DEPTH_MIN, DEPTH_MAX = 2, 17598
MEAN_DEPTH_TARGET = 400.0
DEFAULT_SHOTS = 1024


@dataclass(frozen=True)
class TaskRecord:
    """One manifest row."""

    id: str
    n_qubits: int
    layers: int
    gate_count: int
    shots: int = DEFAULT_SHOTS


@dataclass(frozen=True)
class QasmCircuitSummary:
    """Scalar metrics extracted from a circuit file."""

    n_qubits: int
    depth: int
    gate_count: int


@dataclass(frozen=True)
class GeneratorConfig:
    """Sampling bounds for synthetic tasks.

    Depths are drawn log-uniformly on [depth_min, depth_max], then rescaled so
    the sample mean hits ``mean_depth`` (set it to None to skip rescaling);
    values stay clipped to the bounds.
    """

    width_min: int = WIDTH_MIN
    width_max: int = WIDTH_MAX
    depth_min: int = DEPTH_MIN
    depth_max: int = DEPTH_MAX
    mean_depth: float | None = MEAN_DEPTH_TARGET
    shots: int = DEFAULT_SHOTS

    def __post_init__(self):
        if not (1 <= self.width_min <= self.width_max):
            raise EnvironmentError_(f"invalid width bounds: {self}")
        if not (1 <= self.depth_min <= self.depth_max):
            raise EnvironmentError_(f"invalid depth bounds: {self}")
        if self.shots < 1:
            raise EnvironmentError_(f"shots must be >= 1: {self}")


def generate_workload(
    n_tasks: int, seed, config: GeneratorConfig = GeneratorConfig()
) -> list[TaskRecord]:
    """Deterministic synthetic task manifest."""
    if n_tasks < 1:
        raise EnvironmentError_(f"n_tasks must be >= 1, got {n_tasks}")
    rng = np.random.default_rng(seed)
    widths = rng.integers(config.width_min, config.width_max + 1, size=n_tasks)
    raw = np.exp(rng.uniform(math.log(config.depth_min), math.log(config.depth_max), size=n_tasks))
    if config.mean_depth is not None:
        raw = raw * (config.mean_depth / raw.mean())
    depths = np.clip(np.rint(raw), config.depth_min, config.depth_max).astype(int)
    gates_per_layer = rng.integers(1, widths + 1)
    records = []
    for i in range(n_tasks):
        records.append(
            TaskRecord(
                id=f"task-{i:05d}",
                n_qubits=int(widths[i]),
                layers=int(depths[i]),
                gate_count=int(depths[i] * gates_per_layer[i]),
                shots=config.shots,
            )
        )
    return records


def write_manifest(path, records: list[TaskRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_HEADER)
        for r in records:
            writer.writerow([r.id, r.n_qubits, r.layers, r.gate_count, r.shots])


def read_manifest(path) -> list[TaskRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != MANIFEST_HEADER:
            raise EnvironmentError_(f"manifest {path}: bad header {header}")
        return [
            TaskRecord(row[0], int(row[1]), int(row[2]), int(row[3]), int(row[4]))
            for row in reader
            if row
        ]


# --- OpenQASM 2 subset -------------------------------------------------------

SUPPORTED_GATES = {"h", "x", "rx", "ry", "rz", "cz", "cx", "swap"}
_ONE_QUBIT_GATES = {"h", "x", "rx", "ry", "rz"}
_PARAM_GATES = {"rx", "ry", "rz"}

_QREG_RE = re.compile(r"^(qreg|creg)\s+([A-Za-z_][\w]*)\s*\[\s*(\d+)\s*\]$")
_OPERAND_RE = re.compile(r"^([A-Za-z_][\w]*)(?:\s*\[\s*(\d+)\s*\])?$")
_GATE_RE = re.compile(r"^([A-Za-z_][\w]*)\s*(?:\(([^()]*)\))?\s+(.+)$")
_MEASURE_RE = re.compile(r"^measure\s+(.+?)\s*->\s*(.+)$")
_NUMBER_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def _eval_angle(expr: str, line: int) -> float:
    """Numeric literals and pi multiples: pi, -pi/2, 2*pi, 3*pi/4, 0.5, 1e-3."""
    text = expr.replace(" ", "")
    if not text:
        raise QasmParseError(f"empty gate parameter in {expr!r}", line)
    sign = 1.0
    if text[0] in "+-":
        sign = -1.0 if text[0] == "-" else 1.0
        text = text[1:]
    num, den = text, None
    if "/" in text:
        num, den = text.split("/", 1)
        if not _NUMBER_RE.match(den):
            raise QasmParseError(f"unsupported denominator in parameter {expr!r}", line)
    if num == "pi":
        value = math.pi
    elif num.endswith("*pi"):
        factor = num[: -len("*pi")]
        if not _NUMBER_RE.match(factor):
            raise QasmParseError(f"unsupported parameter expression {expr!r}", line)
        value = float(factor) * math.pi
    elif _NUMBER_RE.match(num):
        value = float(num)
    else:
        raise QasmParseError(f"unsupported parameter expression {expr!r}", line)
    if den is not None:
        value /= float(den)
    return sign * value


class _QasmProgram:
    def __init__(self):
        self.qreg_offsets: dict[str, int] = {}
        self.qreg_sizes: dict[str, int] = {}
        self.creg_sizes: dict[str, int] = {}
        self.n_qubits = 0
        # events: ("gate", kind, theta, qubit indices) | ("barrier", qubits)
        self.events: list[tuple] = []


def _parse_operand(prog: _QasmProgram, text: str, line: int) -> list[int]:
    m = _OPERAND_RE.match(text.strip())
    if not m:
        raise QasmParseError(f"malformed operand {text!r}", line)
    name, idx = m.group(1), m.group(2)
    if name not in prog.qreg_offsets:
        raise QasmParseError(f"undeclared quantum register {name!r}", line)
    size = prog.qreg_sizes[name]
    offset = prog.qreg_offsets[name]
    if idx is None:
        return [offset + i for i in range(size)]
    i = int(idx)
    if i >= size:
        raise QasmParseError(f"index {i} out of range for register {name!r}[{size}]", line)
    return [offset + i]


def _parse_statement(prog: _QasmProgram, stmt: str, line: int) -> None:
    m = _QREG_RE.match(stmt)
    if m:
        kind, name, size = m.group(1), m.group(2), int(m.group(3))
        if kind == "qreg":
            if name in prog.qreg_offsets:
                raise QasmParseError(f"register {name!r} redeclared", line)
            prog.qreg_offsets[name] = prog.n_qubits
            prog.qreg_sizes[name] = size
            prog.n_qubits += size
        else:
            prog.creg_sizes[name] = size
        return
    m = _MEASURE_RE.match(stmt)
    if m:
        targets = _parse_operand(prog, m.group(1), line)
        dest = m.group(2).strip()
        dm = _OPERAND_RE.match(dest)
        if not dm or dm.group(1) not in prog.creg_sizes:
            raise QasmParseError(f"measure into undeclared classical register {dest!r}", line)
        del targets  # measurement does not affect width/depth/gate count
        return
    m = _GATE_RE.match(stmt)
    if not m:
        raise QasmParseError(f"unsupported statement {stmt!r}", line)
    name, param, operand_text = m.group(1), m.group(2), m.group(3)
    operands = [op.strip() for op in operand_text.split(",")]
    if name == "barrier":
        qubits: list[int] = []
        for op in operands:
            qubits.extend(_parse_operand(prog, op, line))
        prog.events.append(("barrier", tuple(qubits)))
        return
    if name not in SUPPORTED_GATES:
        raise QasmParseError(f"unsupported gate {name!r}", line)
    theta = None
    if name in _PARAM_GATES:
        if param is None:
            raise QasmParseError(f"gate {name!r} requires a parameter", line)
        theta = _eval_angle(param, line)
    elif param is not None:
        raise QasmParseError(f"gate {name!r} takes no parameter", line)
    if name in _ONE_QUBIT_GATES:
        if len(operands) != 1:
            raise QasmParseError(f"gate {name!r} expects one operand", line)
        for q in _parse_operand(prog, operands[0], line):
            prog.events.append(("gate", name, theta, (q,)))
        return
    if len(operands) != 2:
        raise QasmParseError(f"gate {name!r} expects two operands", line)
    pair = []
    for op in operands:
        qs = _parse_operand(prog, op, line)
        if len(qs) != 1:
            raise QasmParseError(
                f"register broadcast is not supported for two-qubit gate {name!r}", line
            )
        pair.append(qs[0])
    if pair[0] == pair[1]:
        raise QasmParseError(f"gate {name!r} targets must be distinct", line)
    prog.events.append(("gate", name, theta, tuple(pair)))


def _parse_program(text: str) -> _QasmProgram:
    prog = _QasmProgram()
    saw_version = False
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("//", 1)[0].strip()
        if not line:
            continue
        statements = [s.strip() for s in line.split(";")]
        if statements[-1]:
            raise QasmParseError(f"statement not terminated by ';': {statements[-1]!r}", lineno)
        for stmt in statements[:-1]:
            if not stmt:
                continue
            if not saw_version:
                if re.fullmatch(r"OPENQASM\s+2(\.\d+)?", stmt):
                    saw_version = True
                    continue
                raise QasmParseError(
                    f"expected 'OPENQASM 2.0;' header, found {stmt!r}", lineno
                )
            if stmt.startswith("include"):
                warnings.warn(f"ignoring include statement: {stmt!r}", stacklevel=2)
                continue
            _parse_statement(prog, stmt, lineno)
    if not saw_version:
        raise QasmParseError("missing 'OPENQASM 2.0;' header")
    return prog


def parse_qasm_subset(text: str) -> QasmCircuitSummary:
    """Width, ASAP-layered depth, and gate count of a QASM-2 subset program.

    Gates occupy 1 + the deepest layer among their operands; barriers
    synchronize their qubits without counting; measures are ignored.
    """
    prog = _parse_program(text)
    frontier = [0] * prog.n_qubits
    gate_count = 0
    for event in prog.events:
        if event[0] == "barrier":
            qubits = event[1]
            if qubits:
                sync = max(frontier[q] for q in qubits)
                for q in qubits:
                    frontier[q] = sync
            continue
        _, _, _, qubits = event
        layer = 1 + max(frontier[q] for q in qubits)
        for q in qubits:
            frontier[q] = layer
        gate_count += 1
    depth = max(frontier) if frontier else 0
    return QasmCircuitSummary(n_qubits=prog.n_qubits, depth=depth, gate_count=gate_count)


def parse_qasm_circuit(text: str) -> Circuit:
    """The gate sequence as a simulator circuit (barriers and measures dropped)."""
    prog = _parse_program(text)
    ops = []
    for event in prog.events:
        if event[0] != "gate":
            continue
        _, name, theta, qubits = event
        kind = "cnot" if name == "cx" else name
        if theta is None:
            ops.append(GateOp(kind, qubits))
        else:
            ops.append(GateOp(kind, qubits, theta))
    return Circuit(max(prog.n_qubits, 1), tuple(ops))


def ingest_directory(path, shots: int = DEFAULT_SHOTS, permissive: bool = False) -> list[TaskRecord]:
    """Parse every .qasm file under ``path`` into manifest rows, sorted by filename.

    In strict mode any parse failure aborts with a message naming the file;
    with ``permissive=True`` failing files are skipped with a warning.
    """
    root = Path(path)
    files = sorted(root.glob("*.qasm"))
    if not files:
        raise EnvironmentError_(f"no .qasm files found in {root}")
    records = []
    failures = []
    for f in files:
        try:
            summary = parse_qasm_subset(f.read_text(encoding="utf-8"))
        except QasmParseError as exc:
            failures.append(f"{f.name}: {exc}")
            continue
        records.append(
            TaskRecord(
                id=f.stem,
                n_qubits=summary.n_qubits,
                layers=max(summary.depth, 1),
                gate_count=summary.gate_count,
                shots=shots,
            )
        )
    if failures and not permissive:
        raise QasmParseError("failed to parse: " + "; ".join(failures))
    if failures:
        warnings.warn(f"skipped {len(failures)} unparseable file(s): {'; '.join(failures)}")
    return records
