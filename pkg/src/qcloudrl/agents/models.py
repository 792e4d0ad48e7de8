"""Learnable decision models: PQC and MLP variants of the policy and Q heads.

All four expose the same small surface the training loops need: stochastic
heads (action_probs / q_values), greedy selection, a loss-with-gradient
method, parameter dictionaries for Adam, and checkpoint io.
"""

from __future__ import annotations

import numpy as np

from .. import autograd, checkpoint, pqc
from ..errors import DimensionError
from .mlp import MlpModel, mlp_backward, mlp_forward, mlp_forward_batch

MLP_LR = 1e-3


class PqcPolicyModel:
    """Softmax policy over weighted Z expectations of a re-uploading PQC."""

    algorithm = "reinforce-pqc"

    def __init__(self, arch: pqc.PqcArchitecture, params: pqc.ParameterSet, evaluator=None):
        params.validate_for(arch)
        self.arch = arch
        self.params = params
        self.evaluator = evaluator if evaluator is not None else pqc.PURE_EVALUATOR

    def action_probs(self, obs) -> np.ndarray:
        return pqc.policy(self.arch, self.params, obs, self.evaluator)

    def select_action(self, obs, env=None) -> int:
        return int(np.argmax(self.action_probs(obs)))

    def episode_loss_grad(self, steps, gamma: float):
        loss, grad = autograd.reinforce_loss_grad(
            steps, self.arch, self.params, gamma, self.evaluator
        )
        return loss, grad.as_dict()

    def adam_lrs(self) -> dict[str, float]:
        return dict(autograd.DEFAULT_PQC_LRS)

    def get_params(self) -> dict[str, np.ndarray]:
        return self.params.as_dict()

    def set_params(self, d: dict[str, np.ndarray]) -> None:
        self.params = pqc.ParameterSet.from_dict(d)

    def parameter_count(self) -> int:
        return self.params.count()

    def save(self, path) -> None:
        checkpoint.save_pqc_checkpoint(path, self.arch, self.params)


class PqcQModel:
    """PQC Q head: weighted Z expectations on the tanh-squashed observation."""

    algorithm = "dqn-pqc"

    def __init__(self, arch: pqc.PqcArchitecture, params: pqc.ParameterSet, evaluator=None):
        params.validate_for(arch)
        self.arch = arch
        self.params = params
        self.evaluator = evaluator if evaluator is not None else pqc.PURE_EVALUATOR

    def q_values(self, obs) -> np.ndarray:
        return pqc.q_values(self.arch, self.params, obs, self.evaluator)

    def select_action(self, obs, env=None) -> int:
        return int(np.argmax(self.q_values(obs)))

    def target_snapshot(self) -> pqc.ParameterSet:
        return pqc.ParameterSet.from_dict(self.params.as_dict())

    def batch_loss_grad(self, batch, target_params: pqc.ParameterSet, gamma: float):
        loss, grad = autograd.dqn_loss_grad(
            batch, self.arch, self.params, target_params, gamma, self.evaluator
        )
        return loss, grad.as_dict()

    def adam_lrs(self) -> dict[str, float]:
        return dict(autograd.DEFAULT_PQC_LRS)

    def get_params(self) -> dict[str, np.ndarray]:
        return self.params.as_dict()

    def set_params(self, d: dict[str, np.ndarray]) -> None:
        self.params = pqc.ParameterSet.from_dict(d)

    def parameter_count(self) -> int:
        return self.params.count()

    def save(self, path) -> None:
        checkpoint.save_pqc_checkpoint(path, self.arch, self.params)


def _softmax_rows(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


class MlpPolicyModel:
    """Classical baseline: softmax over MLP logits."""

    algorithm = "reinforce-mlp"

    def __init__(self, model: MlpModel):
        self.model = model

    def action_probs(self, obs) -> np.ndarray:
        logits = mlp_forward(self.model, obs)
        return pqc.softmax(logits)

    def select_action(self, obs, env=None) -> int:
        return int(np.argmax(self.action_probs(obs)))

    def episode_loss_grad(self, steps, gamma: float):
        if len(steps) == 0:
            raise DimensionError("trajectory must be nonempty")
        xs = np.stack([np.asarray(s.obs, dtype=float) for s in steps])
        logits, acts = mlp_forward_batch(self.model, xs)
        probs = _softmax_rows(logits)
        returns = autograd.discounted_returns([s.reward for s in steps], gamma)
        actions = np.array([s.action for s in steps])
        picked = probs[np.arange(len(steps)), actions]
        loss = -float(np.sum(returns * np.log(np.maximum(picked, autograd.LOG_PROB_FLOOR))))
        d_logits = probs.copy()
        d_logits[np.arange(len(steps)), actions] -= 1.0
        d_logits *= returns[:, None]
        return loss, mlp_backward(self.model, acts, d_logits)

    def adam_lrs(self) -> dict[str, float]:
        return {name: MLP_LR for name in self.model.as_dict()}

    def get_params(self) -> dict[str, np.ndarray]:
        return self.model.as_dict()

    def set_params(self, d: dict[str, np.ndarray]) -> None:
        self.model = MlpModel.from_dict(d)

    def parameter_count(self) -> int:
        return self.model.count_parameters()

    def save(self, path) -> None:
        checkpoint.save_mlp_checkpoint(path, self.model)


class MlpQModel:
    """Classical baseline: MLP logits read directly as Q values."""

    algorithm = "dqn-mlp"

    def __init__(self, model: MlpModel):
        self.model = model

    def q_values(self, obs) -> np.ndarray:
        return mlp_forward(self.model, obs)

    def select_action(self, obs, env=None) -> int:
        return int(np.argmax(self.q_values(obs)))

    def target_snapshot(self) -> MlpModel:
        return MlpModel.from_dict(self.model.as_dict())

    def batch_loss_grad(self, batch, target_model: MlpModel, gamma: float):
        if len(batch) == 0:
            raise DimensionError("batch must be nonempty")
        xs = np.stack([np.asarray(t.s, dtype=float) for t in batch])
        next_xs = np.stack([np.asarray(t.s_next, dtype=float) for t in batch])
        logits, acts = mlp_forward_batch(self.model, xs)
        next_q, _ = mlp_forward_batch(target_model, next_xs)
        actions = np.array([t.a for t in batch])
        rewards = np.array([t.r for t in batch])
        terminal = np.array([t.terminal for t in batch])
        targets = rewards + np.where(terminal, 0.0, gamma * next_q.max(axis=1))
        picked = logits[np.arange(len(batch)), actions]
        resid = picked - targets
        loss = float(np.mean(resid**2))
        d_logits = np.zeros_like(logits)
        d_logits[np.arange(len(batch)), actions] = 2.0 * resid / len(batch)
        return loss, mlp_backward(self.model, acts, d_logits)

    def adam_lrs(self) -> dict[str, float]:
        return {name: MLP_LR for name in self.model.as_dict()}

    def get_params(self) -> dict[str, np.ndarray]:
        return self.model.as_dict()

    def set_params(self, d: dict[str, np.ndarray]) -> None:
        self.model = MlpModel.from_dict(d)

    def parameter_count(self) -> int:
        return self.model.count_parameters()

    def save(self, path) -> None:
        checkpoint.save_mlp_checkpoint(path, self.model)
