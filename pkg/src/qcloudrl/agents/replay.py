"""Replay memory and exploration schedule for deep Q-learning."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from ..cloudenv import Transition
from ..errors import EnvironmentError_


class ReplayBuffer:
    """Bounded FIFO transition store with uniform sampling."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise EnvironmentError_(f"replay capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._items: deque[Transition] = deque(maxlen=capacity)

    def push(self, transition: Transition) -> None:
        self._items.append(transition)

    def sample(self, batch_size: int, rng: np.random.Generator) -> list[Transition]:
        if batch_size > len(self._items):
            raise EnvironmentError_(
                f"cannot sample {batch_size} transitions from buffer of {len(self._items)}"
            )
        picks = rng.integers(0, len(self._items), size=batch_size)
        return [self._items[int(i)] for i in picks]

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self):
        return iter(self._items)


@dataclass(frozen=True)
class EpsilonSchedule:
    """Exponential exploration decay per episode: eps(k) = max(min, start * decay^k)."""

    start: float = 1.0
    minimum: float = 0.01
    decay: float = 0.99

    def value(self, episode: int) -> float:
        return max(self.minimum, self.start * self.decay**episode)
