"""Paired-seed evaluation: every agent replays the identical task sequences."""

from __future__ import annotations

from dataclasses import dataclass

from ..cloudenv import CloudEnv, StepRecord, cumulative_metrics


@dataclass(frozen=True)
class EvalEpisode:
    episode: int
    ret: float
    wait: float


@dataclass(frozen=True)
class EvalResult:
    per_agent: dict[str, list[EvalEpisode]]
    step_rows: dict[str, list[tuple[int, StepRecord]]]
    task_streams: dict[str, list[tuple[str, ...]]]

    def summary_rows(self) -> list[tuple[str, float, float]]:
        rows = []
        for name, episodes in self.per_agent.items():
            n = len(episodes)
            rows.append(
                (
                    name,
                    sum(e.ret for e in episodes) / n,
                    sum(e.wait for e in episodes) / n,
                )
            )
        return rows


def evaluate(agents: list[tuple[str, object]], env: CloudEnv, n_episodes: int, seed: int) -> EvalResult:
    """Greedy/argmax rollouts (no exploration) over n_episodes per agent.

    Episode k is seeded as [seed, k] for every agent, so comparisons are
    paired; the returned task streams let callers assert the pairing.
    """
    per_agent: dict[str, list[EvalEpisode]] = {}
    step_rows: dict[str, list[tuple[int, StepRecord]]] = {}
    task_streams: dict[str, list[tuple[str, ...]]] = {}
    for name, agent in agents:
        episodes: list[EvalEpisode] = []
        rows: list[tuple[int, StepRecord]] = []
        streams: list[tuple[str, ...]] = []
        for ep in range(n_episodes):
            obs = env.reset([seed, ep])
            done = False
            while not done:
                action = agent.select_action(obs, env)
                obs, _, done = env.step(action)
            trace = env.trace
            ret, wait = cumulative_metrics(trace)
            episodes.append(EvalEpisode(ep, ret, wait))
            rows.extend((ep, rec) for rec in trace)
            streams.append(tuple(rec.task_id for rec in trace))
        per_agent[name] = episodes
        step_rows[name] = rows
        task_streams[name] = streams
    return EvalResult(per_agent=per_agent, step_rows=step_rows, task_streams=task_streams)
