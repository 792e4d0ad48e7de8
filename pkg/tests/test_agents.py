"""Greedy baseline, replay machinery, MLP backprop, training-loop contracts."""

import itertools

import numpy as np
import pytest

from qcloudrl.agents import (
    EpsilonSchedule,
    GreedyAgent,
    MlpModel,
    MlpPolicyModel,
    MlpQModel,
    PqcPolicyModel,
    PqcQModel,
    ReplayBuffer,
    RolloutStep,
    TrainConfig,
    evaluate,
    greedy_select,
    init_mlp,
    mlp_forward,
    mlp_forward_batch,
    mlp_backward,
    train_dqn,
    train_reinforce,
)
from qcloudrl.cloudenv import CloudEnv, EnvConfig, QNode, QTask, Transition
from qcloudrl.errors import EnvironmentError_
from qcloudrl.pqc import PqcArchitecture, init_parameters
from qcloudrl.workload import TaskRecord


def node(i, cap, pending=0, clops=100000.0):
    return QNode(f"n{i}", cap, clops, 0.0, pending_count=pending)


def task(width):
    return QTask("t", 0.0, width, 100, 100, 1024)


class TestGreedySelect:
    def test_min_pending_among_valid(self):
        nodes = [node(0, 156, 3), node(1, 133, 0), node(2, 127, 2)]
        assert greedy_select(task(40), nodes) == 1

    def test_capacity_filter_overrides_queues(self):
        caps = [156, 133, 127, 127, 27]
        nodes = [node(i, c, pending=10 - i) for i, c in enumerate(caps)]
        assert greedy_select(task(140), nodes) == 0

    def test_tie_breaks_to_lowest_index(self):
        nodes = [node(0, 50, 0), node(1, 50, 0)]
        assert greedy_select(task(10), nodes) == 0

    def test_forced_infeasible_picks_max_capacity(self):
        nodes = [node(0, 20, 0), node(1, 30, 5), node(2, 25, 0)]
        assert greedy_select(task(40), nodes) == 1

    def test_empty_node_list(self):
        with pytest.raises(EnvironmentError_):
            greedy_select(task(5), [])

    def test_exhaustive_oracle_small_configs(self):
        # all (queue, capacity) configurations with <= 3 nodes and queues <= 2
        for n_nodes in (1, 2, 3):
            for queues in itertools.product(range(3), repeat=n_nodes):
                for caps in itertools.product((20, 40), repeat=n_nodes):
                    for width in (10, 30, 50):
                        nodes = [node(i, c, q) for i, (c, q) in enumerate(zip(caps, queues))]
                        got = greedy_select(task(width), nodes)
                        valid = [i for i in range(n_nodes) if caps[i] >= width]
                        if valid:
                            best = min(valid, key=lambda i: (queues[i], i))
                        else:
                            best = min(range(n_nodes), key=lambda i: (-caps[i], i))
                        assert got == best


class TestEpsilonSchedule:
    def test_start_value(self):
        assert EpsilonSchedule().value(0) == 1.0

    def test_decay_formula(self):
        sched = EpsilonSchedule()
        assert sched.value(100) == pytest.approx(0.99**100)
        assert sched.value(100) == pytest.approx(0.3660, abs=1e-4)

    def test_floor(self):
        sched = EpsilonSchedule()
        assert sched.value(1000) == 0.01

    def test_bounds_and_monotonicity(self):
        sched = EpsilonSchedule()
        values = [sched.value(k) for k in range(0, 2000, 25)]
        assert all(0.01 <= v <= 1.0 for v in values)
        assert all(a >= b for a, b in zip(values, values[1:]))


class TestReplayBuffer:
    def _tr(self, i):
        return Transition(np.array([float(i)]), 0, float(i), np.array([0.0]), False)

    def test_ring_eviction(self):
        buf = ReplayBuffer(5)
        for i in range(8):
            buf.push(self._tr(i))
        assert len(buf) == 5
        assert [t.r for t in buf] == [3.0, 4.0, 5.0, 6.0, 7.0]

    def test_uniform_sampling_determinism(self):
        buf = ReplayBuffer(10)
        for i in range(10):
            buf.push(self._tr(i))
        rng1, rng2 = np.random.default_rng(0), np.random.default_rng(0)
        s1 = [t.r for t in buf.sample(4, rng1)]
        s2 = [t.r for t in buf.sample(4, rng2)]
        assert s1 == s2

    def test_sample_larger_than_size_rejected(self):
        buf = ReplayBuffer(10)
        buf.push(self._tr(0))
        with pytest.raises(EnvironmentError_):
            buf.sample(2, np.random.default_rng(0))


class TestMlp:
    def test_default_parameter_count(self):
        model = init_mlp(np.random.default_rng(0))
        assert model.count_parameters() == 9221

    def test_zero_weight_model_gives_uniform_policy(self):
        model = init_mlp(np.random.default_rng(0))
        model = MlpModel([np.zeros_like(w) for w in model.weights],
                         [np.zeros_like(b) for b in model.biases])
        probs = MlpPolicyModel(model).action_probs(np.ones(8))
        np.testing.assert_allclose(probs, np.full(5, 0.2), atol=1e-12)

    def test_backprop_matches_finite_differences(self):
        rng = np.random.default_rng(1)
        model = init_mlp(rng, sizes=(4, 8, 8, 8, 3))
        x = rng.normal(size=(2, 4))
        target = rng.normal(size=(2, 3))

        def loss_of(m):
            out, _ = mlp_forward_batch(m, x)
            return float(np.sum((out - target) ** 2))

        logits, acts = mlp_forward_batch(model, x)
        grads = mlp_backward(model, acts, 2.0 * (logits - target))
        h = 1e-6
        worst = 0.0
        for key, g in grads.items():
            kind, idx = key[0], int(key[1:])
            arrs = model.weights if kind == "W" else model.biases
            flat_iter = np.ndindex(*arrs[idx].shape)
            for pos in itertools.islice(flat_iter, 0, None, 7):  # subsample coords
                arrs[idx][pos] += h
                up = loss_of(model)
                arrs[idx][pos] -= 2 * h
                dn = loss_of(model)
                arrs[idx][pos] += h
                fd = (up - dn) / (2 * h)
                denom = max(abs(fd), 1e-6)
                worst = max(worst, abs(g[pos] - fd) / denom)
        assert worst < 1e-5

    def test_round_trip_dict(self):
        model = init_mlp(np.random.default_rng(2))
        clone = MlpModel.from_dict(model.as_dict())
        for w1, w2 in zip(model.weights, clone.weights):
            np.testing.assert_array_equal(w1, w2)


def make_env(episode_length=4, n_nodes=2):
    nodes = [QNode("fast", 64, 200000, 1e-3), QNode("slow", 64, 20000, 1e-2)][:n_nodes]
    pool = [TaskRecord(f"t{i}", 8, 200, 200, 1024) for i in range(20)]
    return CloudEnv(nodes, pool, EnvConfig(episode_length=episode_length, interarrival=1.0,
                                           depth_cap=200))


def pqc_policy_model(env, layers=1, seed=0):
    arch = PqcArchitecture(env.obs_length, layers, env.n_actions)
    return PqcPolicyModel(arch, init_parameters(arch, np.random.default_rng(seed)))


def pqc_q_model(env, layers=1, seed=0):
    arch = PqcArchitecture(env.obs_length, layers, env.n_actions)
    return PqcQModel(arch, init_parameters(arch, np.random.default_rng(seed)))


class TestTrainingLoops:
    def test_zero_episode_run_keeps_params(self):
        env = make_env()
        model = pqc_policy_model(env)
        before = model.get_params()
        logs = train_reinforce(env, model, TrainConfig(episodes=0), seed=0)
        assert logs == []
        after = model.get_params()
        for key in before:
            np.testing.assert_array_equal(before[key], after[key])

    def test_reward_log_length_matches_episodes(self):
        env = make_env()
        logs = train_reinforce(env, pqc_policy_model(env), TrainConfig(episodes=5), seed=1)
        assert [log.episode for log in logs] == list(range(5))

    def test_reinforce_seed_determinism(self):
        results = []
        for _ in range(2):
            env = make_env()
            model = pqc_policy_model(env, seed=3)
            logs = train_reinforce(env, model, TrainConfig(episodes=4), seed=9)
            results.append(([(l.ret, l.wait) for l in logs], model.get_params()))
        assert results[0][0] == results[1][0]
        for key in results[0][1]:
            np.testing.assert_array_equal(results[0][1][key], results[1][1][key])

    def test_dqn_seed_determinism(self):
        results = []
        for _ in range(2):
            env = make_env()
            model = pqc_q_model(env, seed=4)
            logs = train_dqn(env, model, TrainConfig(episodes=6, batch_size=4), seed=10)
            results.append(([(l.ret, l.wait, l.epsilon) for l in logs], model.get_params()))
        assert results[0][0] == results[1][0]
        for key in results[0][1]:
            np.testing.assert_array_equal(results[0][1][key], results[1][1][key])

    def test_dqn_epsilon_column_logged(self):
        env = make_env()
        logs = train_dqn(env, pqc_q_model(env), TrainConfig(episodes=3, batch_size=4), seed=2)
        assert [l.epsilon for l in logs] == [1.0, 0.99, pytest.approx(0.99**2)]

    def test_dqn_updates_wait_for_batch(self):
        # buffer smaller than a batch: parameters must stay untouched
        env = make_env(episode_length=3)
        model = pqc_q_model(env)
        before = model.get_params()
        train_dqn(env, model, TrainConfig(episodes=1, batch_size=64), seed=5)
        after = model.get_params()
        for key in before:
            np.testing.assert_array_equal(before[key], after[key])

    def test_mlp_models_train_through_same_loops(self):
        env = make_env()
        sizes = (env.obs_length, 8, 8, 8, env.n_actions)
        policy_model = MlpPolicyModel(init_mlp(np.random.default_rng(0), sizes))
        logs = train_reinforce(env, policy_model, TrainConfig(episodes=3), seed=0)
        assert len(logs) == 3
        q_model = MlpQModel(init_mlp(np.random.default_rng(1), sizes))
        logs = train_dqn(env, q_model, TrainConfig(episodes=3, batch_size=4), seed=0)
        assert len(logs) == 3


class TestTargetStaleness:
    def test_target_outputs_fixed_between_syncs(self):
        env = make_env()
        model = pqc_q_model(env, seed=6)
        target = model.target_snapshot()
        obs = env.reset(0)
        from qcloudrl.pqc import q_values

        before = q_values(model.arch, target, obs)
        # online update must not move the snapshot
        params = model.get_params()
        params["phi"] = params["phi"] + 0.5
        model.set_params(params)
        after = q_values(model.arch, target, obs)
        np.testing.assert_array_equal(before, after)


class TestEvaluate:
    def test_identical_metrics_for_identical_agents(self):
        env = make_env()
        res = evaluate([("a", GreedyAgent()), ("b", GreedyAgent())], env, 5, seed=3)
        assert res.per_agent["a"] == [
            type(e)(e.episode, e.ret, e.wait) for e in res.per_agent["b"]
        ]

    def test_paired_task_streams(self):
        env = make_env()
        model = pqc_policy_model(env)
        res = evaluate([("greedy", GreedyAgent()), ("pqc", model)], env, 6, seed=4)
        assert res.task_streams["greedy"] == res.task_streams["pqc"]

    def test_summary_row_order_follows_config(self):
        env = make_env()
        res = evaluate([("z", GreedyAgent()), ("a", GreedyAgent())], env, 2, seed=5)
        assert [row[0] for row in res.summary_rows()] == ["z", "a"]
