"""Greedy baseline: least-pending valid node."""

from __future__ import annotations

from typing import Sequence

from ..cloudenv import QNode, QTask
from ..errors import EnvironmentError_


def greedy_select(task: QTask, nodes: Sequence[QNode]) -> int:
    """Index of the valid node (capacity >= task width) with fewest pending
    tasks, ties broken by lowest index. If no node fits, fall back to the
    largest-capacity node and accept the infeasibility penalty."""
    if not nodes:
        raise EnvironmentError_("empty node list")
    valid = [i for i, n in enumerate(nodes) if n.n_qubits >= task.n_qubits]
    if valid:
        return min(valid, key=lambda i: (nodes[i].pending_count, i))
    return min(range(len(nodes)), key=lambda i: (-nodes[i].n_qubits, i))


class GreedyAgent:
    """Stateless scheduler; reads queue depths straight from the environment."""

    name = "greedy"

    def select_action(self, obs, env) -> int:
        return greedy_select(env.current_task, env.nodes)
