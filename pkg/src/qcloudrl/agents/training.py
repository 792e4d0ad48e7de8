"""Training loops shared by the PQC and MLP models.

Both loops are bit-reproducible given (seed, config): episode task sequences
are seeded as [seed, episode] and a single action-sampling stream is consumed
in order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..autograd import adam_init, adam_step
from ..cloudenv import CloudEnv, Transition, cumulative_metrics
from ..errors import TrainingError
from .replay import EpsilonSchedule, ReplayBuffer


@dataclass(frozen=True)
class RolloutStep:
    """Observation the action was taken from, plus its outcome."""

    obs: np.ndarray
    action: int
    reward: float


@dataclass(frozen=True)
class EpisodeLog:
    episode: int
    ret: float
    wait: float
    epsilon: float | None = None


@dataclass(frozen=True)
class TrainConfig:
    episodes: int
    gamma: float = 0.99
    batch_size: int = 16
    buffer_capacity: int = 10_000
    update_every: int = 10
    target_every: int = 30
    epsilon: EpsilonSchedule = field(default_factory=EpsilonSchedule)
    lrs: dict | None = None  # per-group learning rates; model defaults when None


def _check_finite(loss: float, episode: int) -> None:
    if not math.isfinite(loss):
        raise TrainingError(f"non-finite loss {loss!r} at episode {episode}")


def train_reinforce(
    env: CloudEnv, model, config: TrainConfig, seed: int, on_episode=None
) -> list[EpisodeLog]:
    """One Adam update per episode from the full-episode REINFORCE loss."""
    logs: list[EpisodeLog] = []
    if config.episodes == 0:
        return logs
    adam = adam_init(model.get_params(), config.lrs or model.adam_lrs())
    rng = np.random.default_rng([seed, 101])
    for ep in range(config.episodes):
        obs = env.reset([seed, ep])
        steps: list[RolloutStep] = []
        done = False
        while not done:
            probs = model.action_probs(obs)
            action = int(rng.choice(len(probs), p=probs))
            next_obs, reward, done = env.step(action)
            steps.append(RolloutStep(obs, action, reward))
            obs = next_obs
        loss, grads = model.episode_loss_grad(steps, config.gamma)
        _check_finite(loss, ep)
        new_params, adam = adam_step(adam, model.get_params(), grads)
        model.set_params(new_params)
        ret, wait = cumulative_metrics(env.trace)
        logs.append(EpisodeLog(ep, ret, wait))
        if on_episode is not None:
            on_episode(logs[-1])
    return logs


def train_dqn(
    env: CloudEnv, model, config: TrainConfig, seed: int, on_episode=None
) -> list[EpisodeLog]:
    """Epsilon-greedy rollouts; an Adam update on a sampled batch every
    ``update_every`` environment steps, target sync every ``target_every``."""
    logs: list[EpisodeLog] = []
    if config.episodes == 0:
        return logs
    adam = adam_init(model.get_params(), config.lrs or model.adam_lrs())
    rng = np.random.default_rng([seed, 202])
    buffer = ReplayBuffer(config.buffer_capacity)
    target = model.target_snapshot()
    global_step = 0
    for ep in range(config.episodes):
        eps = config.epsilon.value(ep)
        obs = env.reset([seed, ep])
        done = False
        while not done:
            if rng.random() < eps:
                action = int(rng.integers(env.n_actions))
            else:
                action = int(np.argmax(model.q_values(obs)))
            next_obs, reward, done = env.step(action)
            buffer.push(Transition(obs, action, reward, next_obs, done))
            obs = next_obs
            global_step += 1
            if global_step % config.update_every == 0 and len(buffer) >= config.batch_size:
                batch = buffer.sample(config.batch_size, rng)
                loss, grads = model.batch_loss_grad(batch, target, config.gamma)
                _check_finite(loss, ep)
                new_params, adam = adam_step(adam, model.get_params(), grads)
                model.set_params(new_params)
            if global_step % config.target_every == 0:
                target = model.target_snapshot()
        ret, wait = cumulative_metrics(env.trace)
        logs.append(EpisodeLog(ep, ret, wait, epsilon=eps))
        if on_episode is not None:
            on_episode(logs[-1])
    return logs
