"""Command-line entry point.

Verbs: train, eval, noisy, gen-workload, parse-qasm, inspect-checkpoint.
Exit codes: 0 success, 1 config error, 2 runtime/numerical failure.
Reports are CSV curve files plus SVG figures in the output directory; the
QCLOUDRL_OUTDIR environment variable sets the default output directory.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import checkpoint as ckpt
from . import reporting
from .agents import (
    GreedyAgent,
    EpsilonSchedule,
    MlpPolicyModel,
    MlpQModel,
    PqcPolicyModel,
    PqcQModel,
    TrainConfig,
    evaluate,
    init_mlp,
    train_dqn,
    train_reinforce,
)
from .cloudenv import CloudEnv, EnvConfig, default_node_table, load_node_table, write_trace_csv
from .config import (
    NOISY_DEFAULTS,
    PQC_ALGORITHMS,
    POLICY_ALGORITHMS,
    AgentSpec,
    ExperimentConfig,
    build_config,
    default_outdir,
    load_config_file,
)
from .errors import ConfigError, QcloudrlError
from .pqc import NoisyEvaluator, ParameterSet, PqcArchitecture, init_parameters
from .qsim import MAX_DENSITY_QUBITS, MAX_STATEVECTOR_QUBITS, NoisePolicy
from .workload import (
    GeneratorConfig,
    TaskRecord,
    generate_workload,
    ingest_directory,
    parse_qasm_subset,
    read_manifest,
    write_manifest,
)


def _build_nodes(config: ExperimentConfig):
    nodes = load_node_table(config.nodes_path) if config.nodes_path else default_node_table()
    if config.n_nodes is not None:
        if config.n_nodes > len(nodes):
            raise ConfigError(f"n_nodes={config.n_nodes} but the node table has {len(nodes)}")
        nodes = nodes[: config.n_nodes]
    return nodes


def _build_pool(config: ExperimentConfig):
    w = config.workload
    if w.kind == "manifest":
        return read_manifest(w.path)
    gen = GeneratorConfig(
        width_min=w.width_min,
        width_max=w.width_max,
        depth_min=w.depth_min,
        depth_max=w.depth_max,
        mean_depth=w.mean_depth,
        shots=w.shots,
    )
    return generate_workload(w.n_tasks, w.seed, gen)


def build_environment(config: ExperimentConfig) -> CloudEnv:
    nodes = _build_nodes(config)
    pool = _build_pool(config)
    env_cfg = EnvConfig(
        episode_length=config.episode_length,
        interarrival=config.interarrival,
        pending_cap=config.pending_cap,
        depth_cap=max(r.layers for r in pool),
    )
    env = CloudEnv(nodes, pool, env_cfg)
    cap = MAX_DENSITY_QUBITS if config.noise.enabled else MAX_STATEVECTOR_QUBITS
    if env.obs_length > cap:
        raise ConfigError(
            f"observation length {env.obs_length} exceeds the {cap}-qubit simulator cap; "
            "reduce n_nodes"
        )
    return env


def _make_evaluator(config: ExperimentConfig):
    if not config.noise.enabled:
        return None
    policy = NoisePolicy.from_strengths(config.noise.amplitude_damping, config.noise.depolarizing)
    return NoisyEvaluator(policy)


def build_model(config: ExperimentConfig, env: CloudEnv, evaluator=None, force_noisy: bool = False):
    algo = config.algorithm
    if algo == "greedy":
        raise ConfigError("algorithm 'greedy' has no trainable parameters; use the eval command")
    if force_noisy and algo not in PQC_ALGORITHMS:
        raise ConfigError(f"the noisy regime supports PQC algorithms only, got {algo!r}")
    seed_rng = np.random.default_rng([config.seed, 3])
    if algo in PQC_ALGORITHMS:
        evaluator = evaluator if evaluator is not None else (
            NoisyEvaluator(NoisePolicy.from_strengths(config.noise.amplitude_damping,
                                                      config.noise.depolarizing))
            if force_noisy else _make_evaluator(config)
        )
        arch = PqcArchitecture(
            n_qubits=env.obs_length, n_layers=config.pqc_layers, n_actions=env.n_actions
        )
        params = init_parameters(arch, seed_rng)
        cls = PqcPolicyModel if algo in POLICY_ALGORITHMS else PqcQModel
        return cls(arch, params, evaluator)
    sizes = (env.obs_length, 64, 64, 64, env.n_actions)
    model = init_mlp(seed_rng, sizes)
    cls = MlpPolicyModel if algo in POLICY_ALGORITHMS else MlpQModel
    return cls(model)


def _train_config(config: ExperimentConfig, model) -> TrainConfig:
    if config.algorithm in PQC_ALGORITHMS:
        lrs = config.pqc_lrs()
    else:
        lrs = {name: config.lr_mlp for name in model.get_params()}
    return TrainConfig(
        episodes=config.episodes,
        gamma=config.gamma,
        batch_size=config.batch_size,
        buffer_capacity=config.buffer_capacity,
        update_every=config.update_every,
        target_every=config.target_every,
        epsilon=EpsilonSchedule(config.epsilon_start, config.epsilon_min, config.epsilon_decay),
        lrs=lrs,
    )


def _write_train_outputs(config: ExperimentConfig, logs, outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "train_log.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["episode", "return", "wait", "epsilon"])
        for log in logs:
            eps = "" if log.epsilon is None else repr(float(log.epsilon))
            writer.writerow([log.episode, repr(float(log.ret)), repr(float(log.wait)), eps])
    returns = [log.ret for log in logs]
    ma = reporting.write_curve_csv(
        outdir / "train_returns.csv", "return", returns, config.train_ma_window
    )
    reporting.render_curve_figure(
        outdir / "train_returns.svg",
        returns,
        ma,
        config.train_ma_window,
        f"{config.algorithm} training",
        "return",
    )


def _progress_printer(total: int):
    stride = max(1, total // 10)

    def callback(log):
        if (log.episode + 1) % stride == 0 or log.episode + 1 == total:
            print(
                f"episode {log.episode + 1}/{total}  return={log.ret:.4f}  wait={log.wait:.4f}",
                flush=True,
            )

    return callback


def _run_training(config: ExperimentConfig, noisy: bool) -> int:
    env = build_environment(config)
    model = build_model(config, env, force_noisy=noisy)
    train_cfg = _train_config(config, model)
    print(f"training {config.algorithm}: {config.episodes} episodes, seed {config.seed}")
    trainer = train_reinforce if config.algorithm in POLICY_ALGORITHMS else train_dqn
    logs = trainer(env, model, train_cfg, config.seed, on_episode=_progress_printer(config.episodes))
    outdir = Path(config.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    model.save(outdir / "checkpoint.txt")
    _write_train_outputs(config, logs, outdir)
    mean_ret = float(np.mean([log.ret for log in logs]))
    print(f"done: mean return {mean_ret:.4f}; outputs in {outdir}")
    return 0


def _agent_from_spec(spec: AgentSpec, config: ExperimentConfig, env: CloudEnv):
    if spec.algorithm == "greedy":
        return GreedyAgent()
    kind, payload = ckpt.load_checkpoint(spec.checkpoint)
    evaluator = _make_evaluator(config)
    if spec.algorithm in PQC_ALGORITHMS:
        if kind != "pqc":
            raise ConfigError(f"agent {spec.label}: checkpoint {spec.checkpoint} is not a PQC")
        arch, params = payload
        if arch.n_qubits != env.obs_length or arch.n_actions != env.n_actions:
            raise ConfigError(
                f"agent {spec.label}: checkpoint architecture {arch} does not match the "
                f"environment (obs length {env.obs_length}, {env.n_actions} actions)"
            )
        cls = PqcPolicyModel if spec.algorithm in POLICY_ALGORITHMS else PqcQModel
        return cls(arch, params, evaluator)
    if kind != "mlp":
        raise ConfigError(f"agent {spec.label}: checkpoint {spec.checkpoint} is not an MLP")
    model = payload
    if model.sizes[0] != env.obs_length or model.sizes[-1] != env.n_actions:
        raise ConfigError(
            f"agent {spec.label}: MLP sizes {model.sizes} do not match the environment"
        )
    cls = MlpPolicyModel if spec.algorithm in POLICY_ALGORITHMS else MlpQModel
    return cls(model)


def _run_eval(config: ExperimentConfig) -> int:
    if not config.agents:
        raise ConfigError("eval requires an 'agents' list in the config")
    env = build_environment(config)
    agents = [(spec.label, _agent_from_spec(spec, config, env)) for spec in config.agents]
    result = evaluate(agents, env, config.eval_episodes, config.eval_seed)
    outdir = Path(config.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    window = config.eval_ma_window
    return_curves: dict[str, list[float]] = {}
    wait_curves: dict[str, list[float]] = {}
    for name, episodes in result.per_agent.items():
        returns = [e.ret for e in episodes]
        waits = [e.wait for e in episodes]
        return_curves[name] = returns
        wait_curves[name] = waits
        reporting.write_curve_csv(outdir / f"eval_returns_{name}.csv", "return", returns, window)
        reporting.write_curve_csv(outdir / f"eval_waits_{name}.csv", "wait", waits, window)
        write_trace_csv(outdir / f"eval_steps_{name}.csv", result.step_rows[name])
    reporting.render_multi_curve_figure(
        outdir / "eval_returns.svg", return_curves, window, "evaluation returns", "return"
    )
    reporting.render_multi_curve_figure(
        outdir / "eval_waits.svg", wait_curves, window, "evaluation waiting time", "wait (s)"
    )
    table = reporting.write_summary_table(
        outdir / "eval_summary.csv", outdir / "eval_summary.txt", result.summary_rows()
    )
    print(table, end="")
    print(f"outputs in {outdir}")
    return 0


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON experiment config file")
    parser.add_argument("--algorithm", help="greedy|reinforce-pqc|dqn-pqc|reinforce-mlp|dqn-mlp")
    parser.add_argument("--episodes", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--pqc-layers", dest="pqc_layers", type=int)
    parser.add_argument("--n-nodes", dest="n_nodes", type=int)
    parser.add_argument("--nodes-path", dest="nodes_path")
    parser.add_argument("--eval-episodes", dest="eval_episodes", type=int)
    parser.add_argument("--eval-seed", dest="eval_seed", type=int)
    parser.add_argument("--outdir")


def _experiment_from_args(args, command_defaults: dict | None = None) -> ExperimentConfig:
    file_values = load_config_file(args.config) if args.config else {}
    override_keys = (
        "algorithm",
        "episodes",
        "seed",
        "pqc_layers",
        "n_nodes",
        "nodes_path",
        "eval_episodes",
        "eval_seed",
        "outdir",
    )
    overrides = {k: getattr(args, k, None) for k in override_keys}
    defaults = {"outdir": default_outdir()}
    defaults.update(command_defaults or {})
    return build_config(file_values, overrides, defaults)


def _cmd_train(args) -> int:
    config = _experiment_from_args(args)
    return _run_training(config, noisy=False)


def _cmd_noisy(args) -> int:
    config = _experiment_from_args(args, command_defaults=dict(NOISY_DEFAULTS))
    return _run_training(config, noisy=True)


def _cmd_eval(args) -> int:
    config = _experiment_from_args(args)
    if args.agent:
        specs = []
        for entry in args.agent:
            algorithm, _, path = entry.partition("=")
            specs.append(AgentSpec(algorithm=algorithm, checkpoint=path or None))
        config = dataclasses.replace(config, agents=tuple(specs))
    return _run_eval(config)


def _cmd_gen_workload(args) -> int:
    gen = GeneratorConfig(
        width_min=args.width_min,
        width_max=args.width_max,
        depth_min=args.depth_min,
        depth_max=args.depth_max,
        mean_depth=args.mean_depth,
        shots=args.shots,
    )
    records = generate_workload(args.n_tasks, args.seed, gen)
    write_manifest(args.out, records)
    widths = [r.n_qubits for r in records]
    depths = [r.layers for r in records]
    print(
        f"wrote {len(records)} tasks to {args.out} "
        f"(width {min(widths)}-{max(widths)}, depth {min(depths)}-{max(depths)}, "
        f"mean depth {sum(depths) / len(depths):.1f})"
    )
    return 0


def _cmd_parse_qasm(args) -> int:
    paths = [Path(p) for p in args.paths]
    if len(paths) == 1 and paths[0].is_dir():
        records = ingest_directory(paths[0], shots=args.shots, permissive=args.permissive)
    else:
        records = []
        for p in paths:
            summary = parse_qasm_subset(p.read_text(encoding="utf-8"))
            records.append(
                TaskRecord(
                    id=p.stem,
                    n_qubits=summary.n_qubits,
                    layers=max(summary.depth, 1),
                    gate_count=summary.gate_count,
                    shots=args.shots,
                )
            )
    print(f"{'id':<24} {'n_qubits':>8} {'layers':>8} {'gate_count':>10} {'shots':>6}")
    for r in records:
        print(f"{r.id:<24} {r.n_qubits:>8} {r.layers:>8} {r.gate_count:>10} {r.shots:>6}")
    if args.out:
        write_manifest(args.out, records)
        print(f"wrote manifest {args.out}")
    return 0


def _cmd_inspect_checkpoint(args) -> int:
    print(ckpt.describe_checkpoint(args.path))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcloudrl",
        description="Quantum cloud scheduling: simulate, train, and evaluate RL agents.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train one agent and write checkpoint + curves")
    _add_common_flags(p_train)
    p_train.set_defaults(handler=_cmd_train)

    p_eval = sub.add_parser("eval", help="paired-seed evaluation of trained agents")
    _add_common_flags(p_eval)
    p_eval.add_argument(
        "--agent",
        action="append",
        metavar="ALGO[=CHECKPOINT]",
        help="agent to evaluate, e.g. greedy or reinforce-pqc=runs/checkpoint.txt "
        "(repeatable; overrides the config's agents list)",
    )
    p_eval.set_defaults(handler=_cmd_eval)

    p_noisy = sub.add_parser(
        "noisy", help="train a PQC agent in the noisy regime (2 nodes, 1 layer, 150 episodes)"
    )
    _add_common_flags(p_noisy)
    p_noisy.set_defaults(handler=_cmd_noisy)

    p_gen = sub.add_parser("gen-workload", help="write a synthetic task manifest CSV")
    p_gen.add_argument("--n-tasks", dest="n_tasks", type=int, required=True)
    p_gen.add_argument("--seed", type=int, default=11)
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--width-min", dest="width_min", type=int, default=2)
    p_gen.add_argument("--width-max", dest="width_max", type=int, default=50)
    p_gen.add_argument("--depth-min", dest="depth_min", type=int, default=2)
    p_gen.add_argument("--depth-max", dest="depth_max", type=int, default=17598)
    p_gen.add_argument("--mean-depth", dest="mean_depth", type=float, default=400.0)
    p_gen.add_argument("--shots", type=int, default=1024)
    p_gen.set_defaults(handler=_cmd_gen_workload)

    p_parse = sub.add_parser("parse-qasm", help="extract width/depth/gates from QASM files")
    p_parse.add_argument("paths", nargs="+", help="QASM files, or a single directory")
    p_parse.add_argument("--out", help="also write a manifest CSV")
    p_parse.add_argument("--shots", type=int, default=1024)
    p_parse.add_argument("--permissive", action="store_true", help="skip unparseable files")
    p_parse.set_defaults(handler=_cmd_parse_qasm)

    p_inspect = sub.add_parser("inspect-checkpoint", help="print checkpoint metadata")
    p_inspect.add_argument("path")
    p_inspect.set_defaults(handler=_cmd_inspect_checkpoint)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except QcloudrlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"unexpected error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
