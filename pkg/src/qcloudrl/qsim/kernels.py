"""Batched circuit evaluation kernels.

Parameter-shift gradients need the same circuit evaluated at many angle
settings; these kernels run all settings at once on a batch axis. They are an
internal fast path: tests pin their agreement with the one-state-at-a-time
functions in :mod:`statevector` and :mod:`density`.

Templates are tuples ``(kind, q, q2, src, idx)`` per op, where ``src`` selects
the angle slot: FIXED (none), PHI (variational angles) or ENC (encoding
angles), and ``idx`` indexes the corresponding batch column.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import SimulationError
from .density import NoisePolicy
from .statevector import z_signs

FIXED, PHI, ENC = 0, 1, 2

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def observable_sign_matrix(n_qubits: int, n_obs: int) -> np.ndarray:
    """(n_obs, 2^n) matrix of single-qubit Z eigenvalue signs for qubits 0..n_obs-1."""
    return np.stack([z_signs(n_qubits, 1 << q) for q in range(n_obs)])


def _angle(op, phi_batch: np.ndarray, enc_batch: np.ndarray) -> np.ndarray:
    _, _, _, src, idx = op
    return phi_batch[:, idx] if src == PHI else enc_batch[:, idx]


def _qubit_index_pairs(n_qubits: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(2**n_qubits)
    idx0 = idx[(idx >> q) & 1 == 0]
    return idx0, idx0 + (1 << q)


def _rotation_entries(kind: str, theta: np.ndarray):
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    if kind == "rx":
        return c, -1j * s, -1j * s, c
    if kind == "ry":
        return c, -s, s, c
    if kind == "rz":
        return c - 1j * s, None, None, c + 1j * s
    raise SimulationError(f"not a rotation kind: {kind!r}")


def statevector_z_batch(
    n_qubits: int,
    template: tuple,
    phi_batch: np.ndarray,
    enc_batch: np.ndarray,
    n_obs: int,
) -> np.ndarray:
    """Run the template from |0...0> for every batch row; return per-qubit
    Z expectations of qubits 0..n_obs-1, shape (B, n_obs)."""
    batch = phi_batch.shape[0]
    states = np.zeros((batch, 2**n_qubits), dtype=complex)
    states[:, 0] = 1.0
    pair_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for op in template:
        kind, q, q2, src, _ = op
        if kind in ("rx", "ry", "rz"):
            if q not in pair_cache:
                pair_cache[q] = _qubit_index_pairs(n_qubits, q)
            idx0, idx1 = pair_cache[q]
            theta = _angle(op, phi_batch, enc_batch)
            u00, u01, u10, u11 = _rotation_entries(kind, theta)
            if kind == "rz":
                states[:, idx0] *= u00[:, None]
                states[:, idx1] *= u11[:, None]
            else:
                a, b = states[:, idx0], states[:, idx1]
                states[:, idx0] = u00[:, None] * a + u01[:, None] * b
                states[:, idx1] = u10[:, None] * a + u11[:, None] * b
        elif kind == "cz":
            idx = np.arange(2**n_qubits)
            both = ((idx >> q) & 1 == 1) & ((idx >> q2) & 1 == 1)
            states[:, both] *= -1.0
        elif kind in ("h", "x"):
            if q not in pair_cache:
                pair_cache[q] = _qubit_index_pairs(n_qubits, q)
            idx0, idx1 = pair_cache[q]
            a, b = states[:, idx0], states[:, idx1]
            if kind == "h":
                states[:, idx0] = _INV_SQRT2 * (a + b)
                states[:, idx1] = _INV_SQRT2 * (a - b)
            else:
                states[:, idx0], states[:, idx1] = b, a
        else:
            raise SimulationError(f"unsupported template op kind {kind!r}")
    probs = np.abs(states) ** 2
    signs = observable_sign_matrix(n_qubits, n_obs)
    return probs @ signs.T


def _conjugate_1q_batch(rhos: np.ndarray, entries, idx0, idx1) -> None:
    u00, u01, u10, u11 = (e[:, None, None] if isinstance(e, np.ndarray) else e for e in entries)
    r0, r1 = rhos[:, idx0, :], rhos[:, idx1, :]
    rhos[:, idx0, :] = u00 * r0 + u01 * r1
    rhos[:, idx1, :] = u10 * r0 + u11 * r1
    c0, c1 = rhos[:, :, idx0], rhos[:, :, idx1]
    rhos[:, :, idx0] = np.conj(u00) * c0 + np.conj(u01) * c1
    rhos[:, :, idx1] = np.conj(u10) * c0 + np.conj(u11) * c1


def _apply_channel_batch(rhos: np.ndarray, operators, idx0, idx1) -> np.ndarray:
    acc = np.zeros_like(rhos)
    for k in operators:
        tmp = np.zeros_like(rhos)
        r0, r1 = rhos[:, idx0, :], rhos[:, idx1, :]
        tmp[:, idx0, :] = k[0, 0] * r0 + k[0, 1] * r1
        tmp[:, idx1, :] = k[1, 0] * r0 + k[1, 1] * r1
        c0, c1 = tmp[:, :, idx0].copy(), tmp[:, :, idx1].copy()
        tmp[:, :, idx0] = np.conj(k[0, 0]) * c0 + np.conj(k[0, 1]) * c1
        tmp[:, :, idx1] = np.conj(k[1, 0]) * c0 + np.conj(k[1, 1]) * c1
        acc += tmp
    return acc


def density_z_batch(
    n_qubits: int,
    template: tuple,
    phi_batch: np.ndarray,
    enc_batch: np.ndarray,
    n_obs: int,
    noise: NoisePolicy,
) -> np.ndarray:
    """Noisy analogue of :func:`statevector_z_batch` on density matrices."""
    batch = phi_batch.shape[0]
    dim = 2**n_qubits
    rhos = np.zeros((batch, dim, dim), dtype=complex)
    rhos[:, 0, 0] = 1.0
    channels = noise.active_channels()
    pair_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def pairs(q: int):
        if q not in pair_cache:
            pair_cache[q] = _qubit_index_pairs(n_qubits, q)
        return pair_cache[q]

    for op in template:
        kind, q, q2, src, _ = op
        if kind in ("rx", "ry", "rz"):
            theta = _angle(op, phi_batch, enc_batch)
            entries = _rotation_entries(kind, theta)
            if kind == "rz":
                entries = (entries[0], np.zeros_like(theta), np.zeros_like(theta), entries[3])
            _conjugate_1q_batch(rhos, entries, *pairs(q))
            targets = (q,)
        elif kind == "cz":
            idx = np.arange(dim)
            both = ((idx >> q) & 1 == 1) & ((idx >> q2) & 1 == 1)
            rhos[:, both, :] *= -1.0
            rhos[:, :, both] *= -1.0
            targets = (q, q2)
        elif kind == "h":
            h = (_INV_SQRT2, _INV_SQRT2, _INV_SQRT2, -_INV_SQRT2)
            _conjugate_1q_batch(rhos, h, *pairs(q))
            targets = (q,)
        elif kind == "x":
            _conjugate_1q_batch(rhos, (0.0, 1.0, 1.0, 0.0), *pairs(q))
            targets = (q,)
        else:
            raise SimulationError(f"unsupported template op kind {kind!r}")
        if channels:
            for tq in targets:
                i0, i1 = pairs(tq)
                for ch in channels:
                    rhos = _apply_channel_batch(rhos, ch.operators, i0, i1)
    diag = np.real(np.einsum("bii->bi", rhos))
    signs = observable_sign_matrix(n_qubits, n_obs)
    return diag @ signs.T
