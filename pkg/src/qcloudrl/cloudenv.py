"""Quantum-cloud scheduling environment.

Each decision step presents one task; the action picks the node it runs on.
Nodes execute FIFO. An assignment that fits starts at max(arrival, node busy
time) and earns reward 1/T with T the arrival-to-completion time
(T = waiting + shots * layers / CLOPS); an assignment wider than the node's
qubit capacity earns exactly -10 and the task is dropped.
"""

from __future__ import annotations

import csv
import json
from collections import deque
from dataclasses import dataclass, replace
from importlib import resources
from typing import Sequence

import numpy as np

from .errors import EnvironmentError_

INFEASIBLE_PENALTY = -10.0


@dataclass
class QNode:
    """A quantum processing node. EPLG is carried for reporting only."""

    id: str
    n_qubits: int
    clops: float
    eplg: float
    busy_until: float = 0.0
    pending_count: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise EnvironmentError_(f"node {self.id}: n_qubits must be positive")
        if self.clops <= 0:
            raise EnvironmentError_(f"node {self.id}: clops must be positive")


@dataclass(frozen=True)
class QTask:
    """One workload item as presented to the scheduler."""

    id: str
    arrival_time: float
    n_qubits: int
    layers: int
    gate_count: int
    shots: int = 1024

    def __post_init__(self):
        if self.n_qubits < 1 or self.layers < 1 or self.shots < 1:
            raise EnvironmentError_(f"task {self.id}: invalid metrics {self}")


@dataclass(frozen=True)
class StepRecord:
    """One scheduling decision, kept in the episode trace."""

    step: int
    task_id: str
    action: int
    reward: float
    wait: float
    executed: bool
    terminal: bool


@dataclass(frozen=True)
class Transition:
    """(s, a, r, s', terminal) tuple for replay-based learning."""

    s: np.ndarray
    a: int
    r: float
    s_next: np.ndarray
    terminal: bool


def execution_time(task: QTask, node: QNode) -> float:
    """shots * layers / CLOPS seconds (the single-shot time scaled by shots)."""
    return task.shots * task.layers / node.clops


@dataclass(frozen=True)
class EnvConfig:
    """Episode shape and observation normalization caps."""

    episode_length: int = 10
    interarrival: float = 1.0
    pending_cap: int = 20
    width_cap: int = 50
    depth_cap: int = 17598

    def __post_init__(self):
        if self.episode_length < 1 or self.interarrival <= 0:
            raise EnvironmentError_(f"invalid env config: {self}")


class CloudEnv:
    """Single-agent scheduling environment over a fixed node table.

    ``workload`` is a pool of task records (id, n_qubits, layers, gate_count,
    shots); reset() samples the episode's sequence from it with the given
    seed, so identical seeds replay identical episodes.
    """

    def __init__(self, nodes: Sequence[QNode], workload: Sequence, config: EnvConfig = EnvConfig()):
        if not nodes:
            raise EnvironmentError_("node table is empty")
        if not workload:
            raise EnvironmentError_("workload pool is empty")
        self.node_table = [replace(n, busy_until=0.0, pending_count=0) for n in nodes]
        self.workload = list(workload)
        self.config = config
        self.nodes: list[QNode] = []
        self._tasks: list[QTask] = []
        self._queues: list[deque] = []
        self._cursor = 0
        self._trace: list[StepRecord] = []

    @property
    def n_nodes(self) -> int:
        return len(self.node_table)

    @property
    def obs_length(self) -> int:
        return self.n_nodes + 3

    @property
    def n_actions(self) -> int:
        return self.n_nodes

    def reset(self, seed) -> np.ndarray:
        """Sample the episode's task sequence from the pool and clear all queues."""
        rng = np.random.default_rng(seed)
        picks = rng.integers(0, len(self.workload), size=self.config.episode_length)
        self._tasks = []
        for k, pick in enumerate(picks):
            rec = self.workload[int(pick)]
            self._tasks.append(
                QTask(
                    id=str(rec.id),
                    arrival_time=k * self.config.interarrival,
                    n_qubits=int(rec.n_qubits),
                    layers=int(rec.layers),
                    gate_count=int(rec.gate_count),
                    shots=int(rec.shots),
                )
            )
        self.nodes = [replace(n, busy_until=0.0, pending_count=0) for n in self.node_table]
        self._queues = [deque() for _ in self.node_table]
        self._cursor = 0
        self._trace = []
        return self._observation()

    @property
    def current_task(self) -> QTask:
        if not self._tasks or self._cursor >= len(self._tasks):
            raise EnvironmentError_("no pending task: episode is finished or env not reset")
        return self._tasks[self._cursor]

    @property
    def done(self) -> bool:
        return bool(self._tasks) and self._cursor >= len(self._tasks)

    @property
    def trace(self) -> list[StepRecord]:
        return list(self._trace)

    def _refresh_pending(self, now: float) -> None:
        for node, queue in zip(self.nodes, self._queues):
            while queue and queue[0] <= now:
                queue.popleft()
            node.pending_count = len(queue)

    def _observation(self) -> np.ndarray:
        cfg = self.config
        if self.done or not self._tasks:
            now = self._tasks[-1].arrival_time if self._tasks else 0.0
            task_feats = np.zeros(3)
        else:
            task = self.current_task
            now = task.arrival_time
            horizon = cfg.episode_length * cfg.interarrival
            task_feats = np.array(
                [task.arrival_time / horizon, task.n_qubits / cfg.width_cap, task.layers / cfg.depth_cap]
            )
        self._refresh_pending(now)
        pending = np.array([n.pending_count / cfg.pending_cap for n in self.nodes])
        return np.clip(np.concatenate([pending, task_feats]), 0.0, 1.0)

    def step(self, action: int) -> tuple[np.ndarray, float, bool]:
        """Assign the pending task to node ``action``; returns (obs, reward, done)."""
        if not isinstance(action, (int, np.integer)) or not 0 <= int(action) < self.n_nodes:
            raise EnvironmentError_(
                f"action {action!r} out of range for {self.n_nodes} nodes"
            )
        action = int(action)
        task = self.current_task
        node = self.nodes[action]
        now = task.arrival_time
        if task.n_qubits > node.n_qubits:
            reward, wait, executed = INFEASIBLE_PENALTY, 0.0, False
        else:
            start = max(now, node.busy_until)
            completion = start + execution_time(task, node)
            reward = 1.0 / (completion - task.arrival_time)
            wait = start - task.arrival_time
            executed = True
            node.busy_until = completion
            self._queues[action].append(completion)
        self._cursor += 1
        done = self._cursor >= len(self._tasks)
        obs = self._observation()
        self._trace.append(
            StepRecord(
                step=self._cursor - 1,
                task_id=task.id,
                action=action,
                reward=reward,
                wait=wait,
                executed=executed,
                terminal=done,
            )
        )
        return obs, reward, done


def cumulative_metrics(trace: Sequence[StepRecord]) -> tuple[float, float]:
    """(total return, total waiting time); dropped tasks contribute zero wait."""
    total_return = float(sum(r.reward for r in trace))
    total_wait = float(sum(r.wait for r in trace if r.executed))
    return total_return, total_wait


def write_trace_csv(path, rows: Sequence[tuple[int, StepRecord]]) -> None:
    """Step-level trace export: (episode, step, task_id, action, reward, wait)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["episode", "step", "task_id", "action", "reward", "wait"])
        for episode, rec in rows:
            writer.writerow([episode, rec.step, rec.task_id, rec.action, repr(rec.reward), repr(rec.wait)])


def load_node_table(path) -> list[QNode]:
    """Read a node table from a JSON file: {"nodes": [{id, n_qubits, eplg, clops}]}."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    return _nodes_from_payload(payload, str(path))


def _nodes_from_payload(payload, source: str) -> list[QNode]:
    try:
        records = payload["nodes"]
        nodes = [
            QNode(id=str(r["id"]), n_qubits=int(r["n_qubits"]), clops=float(r["clops"]), eplg=float(r["eplg"]))
            for r in records
        ]
    except (KeyError, TypeError) as exc:
        raise EnvironmentError_(f"malformed node table {source}: {exc}") from exc
    if not nodes:
        raise EnvironmentError_(f"node table {source} is empty")
    return nodes


def default_node_table() -> list[QNode]:
    """The five shipped IBM device profiles (qubits, EPLG, CLOPS)."""
    payload = json.loads(
        resources.files("qcloudrl.data").joinpath("qpu_nodes.json").read_text(encoding="utf-8")
    )
    return _nodes_from_payload(payload, "qpu_nodes.json")
