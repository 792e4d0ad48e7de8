"""Parameter-shift gradients, RL loss functions, a finite-difference oracle,
and a small functional Adam with per-group learning rates.

Every trainable angle enters the circuit as exp(-i*theta*sigma/2), so the
shift rule d<Z>/dtheta = (<Z>(theta + pi/2) - <Z>(theta - pi/2)) / 2 is exact;
lambda and w gradients follow by the chain rule (including the tanh squash of
the Q head). All shifted evaluations of one observation run as a single batch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError
from .pqc import (
    PURE_EVALUATOR,
    ParameterSet,
    PqcArchitecture,
    encoding_angles,
    q_values,
    softmax,
    squash_input,
)

LOG_PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class GradientSet:
    """Partial derivatives shaped like the ParameterSet fields."""

    d_phi: np.ndarray
    d_lam: np.ndarray
    d_w: np.ndarray

    def as_dict(self) -> dict[str, np.ndarray]:
        return {"phi": self.d_phi, "lambda": self.d_lam, "w": self.d_w}

    @staticmethod
    def zeros_like(params: ParameterSet) -> "GradientSet":
        return GradientSet(
            np.zeros_like(params.phi), np.zeros_like(params.lam), np.zeros_like(params.w)
        )


@dataclass(frozen=True)
class ShiftGradients:
    """Raw per-qubit Z expectations and their gradients for all actions at once.

    ``d_phi`` has shape (n_phi, n_actions) and ``d_lam`` (n_lambda, n_actions);
    both differentiate the unweighted z, already chained through lambda.
    """

    z: np.ndarray
    d_phi: np.ndarray
    d_lam: np.ndarray


def observable_shift_gradients(
    arch: PqcArchitecture,
    params: ParameterSet,
    s,
    *,
    squash: bool = False,
    evaluator=None,
) -> ShiftGradients:
    """Evaluate z and all shift gradients in one batched run.

    With ``squash=True`` the circuit input is s' = tanh(lambda_0 * s) and the
    lambda gradient includes the tanh chain term for the first encoding layer.
    """
    ev = evaluator if evaluator is not None else PURE_EVALUATOR
    params.validate_for(arch)
    s = np.asarray(s, dtype=float)
    if s.shape != (arch.n_qubits,):
        raise DimensionError(f"observation has shape {s.shape}, expected ({arch.n_qubits},)")
    x = np.tanh(params.lam[: arch.n_qubits] * s) if squash else s
    enc = encoding_angles(arch, params, x)
    n_phi, n_enc = arch.n_phi, arch.n_lambda
    n_shift = n_phi + n_enc
    batch = 1 + 2 * n_shift
    phi_b = np.tile(params.phi, (batch, 1))
    enc_b = np.tile(enc, (batch, 1))
    half_pi = math.pi / 2.0
    for k in range(n_phi):
        phi_b[1 + 2 * k, k] += half_pi
        phi_b[2 + 2 * k, k] -= half_pi
    for m in range(n_enc):
        enc_b[1 + 2 * (n_phi + m), m] += half_pi
        enc_b[2 + 2 * (n_phi + m), m] -= half_pi
    zb = ev.z_from_angle_batch(arch, phi_b, enc_b)
    z0 = zb[0]
    diffs = 0.5 * (zb[1::2] - zb[2::2])
    g_phi = diffs[:n_phi]
    g_enc = diffs[n_phi:]
    d_lam = g_enc * np.tile(x, arch.n_layers)[:, None]
    if squash:
        n = arch.n_qubits
        lam_by_layer = params.lam.reshape(arch.n_layers, n)
        g_by_layer = g_enc.reshape(arch.n_layers, n, arch.n_actions)
        # ds'_j/dlambda_{0,j} = s_j * (1 - s'_j^2) feeds every encoding layer
        dsq = s * (1.0 - x**2)
        extra = np.einsum("ln,lna->na", lam_by_layer, g_by_layer) * dsq[:, None]
        d_lam = d_lam.copy()
        d_lam[:n] += extra
    return ShiftGradients(z=z0, d_phi=g_phi, d_lam=d_lam)


def param_shift_grad(
    arch: PqcArchitecture,
    params: ParameterSet,
    s,
    action: int,
    *,
    squash: bool = False,
    evaluator=None,
) -> GradientSet:
    """Gradient of the weighted expectation <O_a> = w_a * z_a."""
    if not 0 <= action < arch.n_actions:
        raise DimensionError(f"action {action} out of range for {arch.n_actions} actions")
    sg = observable_shift_gradients(arch, params, s, squash=squash, evaluator=evaluator)
    w_a = params.w[action]
    d_w = np.zeros_like(params.w)
    d_w[action] = sg.z[action]
    return GradientSet(w_a * sg.d_phi[:, action], w_a * sg.d_lam[:, action], d_w)


def discounted_returns(rewards: Sequence[float], gamma: float) -> np.ndarray:
    """G_t = sum_k gamma^k r_{t+k}."""
    out = np.zeros(len(rewards))
    acc = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        acc = rewards[t] + gamma * acc
        out[t] = acc
    return out


def reinforce_loss_grad(
    trajectory: Sequence,
    arch: PqcArchitecture,
    params: ParameterSet,
    gamma: float,
    evaluator=None,
) -> tuple[float, GradientSet]:
    """Episode loss -sum_t G_t log pi(a_t|s_t) and its exact gradient.

    Trajectory items expose ``obs``, ``action`` and ``reward``. The softmax
    identity d log pi(a)/d<O_b> = delta_ab - pi_b routes the shift gradients
    of every observable into the loss.
    """
    if len(trajectory) == 0:
        raise DimensionError("trajectory must be nonempty")
    if not 0.0 < gamma <= 1.0:
        raise DimensionError(f"gamma must be in (0, 1], got {gamma}")
    returns = discounted_returns([step.reward for step in trajectory], gamma)
    loss = 0.0
    d_phi = np.zeros_like(params.phi)
    d_lam = np.zeros_like(params.lam)
    d_w = np.zeros_like(params.w)
    for step, g_t in zip(trajectory, returns):
        sg = observable_shift_gradients(arch, params, step.obs, evaluator=evaluator)
        logits = params.w * sg.z
        probs = softmax(logits)
        a = step.action
        loss -= g_t * math.log(max(probs[a], LOG_PROB_FLOOR))
        coeff = -probs
        coeff[a] += 1.0
        wc = params.w * coeff
        d_phi -= g_t * (sg.d_phi @ wc)
        d_lam -= g_t * (sg.d_lam @ wc)
        d_w -= g_t * coeff * sg.z
    return float(loss), GradientSet(d_phi, d_lam, d_w)


def dqn_loss_grad(
    batch: Sequence,
    arch: PqcArchitecture,
    params: ParameterSet,
    target_params: ParameterSet,
    gamma: float,
    evaluator=None,
) -> tuple[float, GradientSet]:
    """Mean-squared Bellman error over a transition batch and its gradient.

    Targets y = r + gamma * max_a' Q_target(s', a') come from the frozen
    ``target_params`` (y = r on terminal transitions); no gradient flows
    through the target network.
    """
    if len(batch) == 0:
        raise DimensionError("batch must be nonempty")
    d_phi = np.zeros_like(params.phi)
    d_lam = np.zeros_like(params.lam)
    d_w = np.zeros_like(params.w)
    loss = 0.0
    inv_b = 1.0 / len(batch)
    for tr in batch:
        sg = observable_shift_gradients(arch, params, tr.s, squash=True, evaluator=evaluator)
        a = tr.a
        q_sa = params.w[a] * sg.z[a]
        if tr.terminal:
            y = tr.r
        else:
            y = tr.r + gamma * float(np.max(q_values(arch, target_params, tr.s_next, evaluator)))
        resid = q_sa - y
        loss += resid * resid * inv_b
        coeff = 2.0 * resid * inv_b
        d_phi += coeff * params.w[a] * sg.d_phi[:, a]
        d_lam += coeff * params.w[a] * sg.d_lam[:, a]
        d_w[a] += coeff * sg.z[a]
    return float(loss), GradientSet(d_phi, d_lam, d_w)


def finite_diff_grad(
    f: Callable[[ParameterSet], float], params: ParameterSet, h: float = 1e-5
) -> GradientSet:
    """Central differences (f(x+h) - f(x-h)) / 2h per coordinate; test oracle."""
    if h <= 0:
        raise DimensionError(f"h must be positive, got {h}")

    def column(name: str) -> np.ndarray:
        base = getattr(params, name)
        grad = np.zeros_like(base)
        for i in range(base.size):
            plus, minus = base.copy(), base.copy()
            plus[i] += h
            minus[i] -= h
            fields = {"phi": params.phi, "lam": params.lam, "w": params.w}
            up = dict(fields, **{name: plus})
            dn = dict(fields, **{name: minus})
            grad[i] = (f(ParameterSet(**up)) - f(ParameterSet(**dn))) / (2.0 * h)
        return grad

    return GradientSet(column("phi"), column("lam"), column("w"))


DEFAULT_PQC_LRS = {"phi": 0.03, "lambda": 0.05, "w": 0.03}


@dataclass(frozen=True)
class AdamState:
    """First/second moment accumulators per parameter group."""

    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    lr: dict[str, float]
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-7


def adam_init(
    params: dict[str, np.ndarray],
    lr: dict[str, float],
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-7,
) -> AdamState:
    missing = set(params) - set(lr)
    if missing:
        raise DimensionError(f"no learning rate for parameter groups: {sorted(missing)}")
    zeros = {k: np.zeros_like(v) for k, v in params.items()}
    return AdamState(
        m=zeros, v={k: np.zeros_like(v) for k, v in params.items()},
        lr=dict(lr), beta1=beta1, beta2=beta2, eps=eps,
    )


def adam_step(
    state: AdamState, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]
) -> tuple[dict[str, np.ndarray], AdamState]:
    """One bias-corrected Adam update; returns new params and state."""
    t = state.step + 1
    new_params: dict[str, np.ndarray] = {}
    new_m: dict[str, np.ndarray] = {}
    new_v: dict[str, np.ndarray] = {}
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise DimensionError(
                f"gradient for {name!r} has shape {g.shape}, parameter has {p.shape}"
            )
        m = state.beta1 * state.m[name] + (1.0 - state.beta1) * g
        v = state.beta2 * state.v[name] + (1.0 - state.beta2) * g * g
        m_hat = m / (1.0 - state.beta1**t)
        v_hat = v / (1.0 - state.beta2**t)
        new_params[name] = p - state.lr[name] * m_hat / (np.sqrt(v_hat) + state.eps)
        new_m[name] = m
        new_v[name] = v
    return new_params, AdamState(
        m=new_m, v=new_v, lr=state.lr, step=t,
        beta1=state.beta1, beta2=state.beta2, eps=state.eps,
    )
