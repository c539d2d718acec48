"""Command-line entry point.

Single-artifact commands (collect, train-*, build-graph, plan, relabel,
evaluate, export-layout, dataset validate) read and write explicit file
paths; run-pipeline drives all of them through one config file with
stage caching. Relative output paths resolve under $VMG_OUTPUT_ROOT
when it is set.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import data as vmg_data
from .agent import Agent, evaluate_agent, make_reward_fn, relabel_graph
from .envs import collect as collect_dataset
from .envs import env_names, make
from .errors import VmgError
from .graph import MemoryGraph, build_graph, export_layout
from .metric import MetricModel, train_metric
from .pipeline import PipelineConfig, parse_config, replay_manifest, run_pipeline
from .plan import PlanConfig, ValueTable, value_iteration
from .serialize import write_json
from .translate import Translator, train_translator

OUTPUT_ROOT_VAR = "VMG_OUTPUT_ROOT"


def _out_path(path):
    root = os.environ.get(OUTPUT_ROOT_VAR)
    if root and not os.path.isabs(path):
        return os.path.join(root, path)
    return path


def _ensure_parent(path):
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    return path


def _load_train_sections(args):
    if args.config:
        return parse_config(args.config)
    return PipelineConfig.from_dict({})


def cmd_collect(args):
    env = make(args.env)
    kwargs = {}
    if args.noise_sigma is not None:
        kwargs["noise_sigma"] = args.noise_sigma
    if args.chaos_prob is not None:
        kwargs["chaos_prob"] = args.chaos_prob
    if args.detour_prob is not None:
        kwargs["detour_prob"] = args.detour_prob
    if args.flip_prob is not None:
        kwargs["flip_prob"] = args.flip_prob
    ds = collect_dataset(env, args.n_transitions, args.seed, **kwargs)
    out = _ensure_parent(_out_path(args.out))
    vmg_data.save(out, ds)
    print(f"wrote {ds.n_transitions} transitions ({ds.n_episodes} episodes) to {out}")


def cmd_dataset_validate(args):
    ds = vmg_data.load(args.path)
    print(
        f"{args.path}: OK ({ds.n_episodes} episodes, {ds.n_transitions} transitions, "
        f"obs_dim={ds.obs_dim}, action_dim={ds.action_dim})"
    )


def cmd_train_metric(args):
    cfg = _load_train_sections(args).metric
    ds = vmg_data.load(args.dataset)
    out_dir = _out_path(args.out)
    epochs = args.epochs if args.epochs is not None else cfg.epochs
    _, history, paths = train_metric(
        ds,
        seed=args.seed,
        out_dir=out_dir,
        epochs=epochs,
        batch_size=cfg.batch_size,
        lr=cfg.lr,
        feature_dim=cfg.feature_dim,
        margin=cfg.margin,
        steps_per_epoch=cfg.steps_per_epoch,
        checkpoint_every=cfg.checkpoint_every,
        log=lambda rec: print(f"epoch {rec['epoch']}: loss {rec['loss']:.6f}"),
    )
    write_json(os.path.join(out_dir, "history.json"), history)
    print(f"final checkpoint: {paths[-1]}")


def cmd_train_translator(args):
    cfg = _load_train_sections(args).translator
    ds = vmg_data.load(args.dataset)
    out_dir = _out_path(args.out)
    epochs = args.epochs if args.epochs is not None else cfg.epochs
    _, history, paths = train_translator(
        ds,
        seed=args.seed,
        out_dir=out_dir,
        epochs=epochs,
        batch_size=cfg.batch_size,
        lr=cfg.lr,
        k_max=cfg.k_max,
        steps_per_epoch=cfg.steps_per_epoch,
        checkpoint_every=cfg.checkpoint_every,
        log=lambda rec: print(f"epoch {rec['epoch']}: loss {rec['loss']:.6f}"),
    )
    write_json(os.path.join(out_dir, "history.json"), history)
    print(f"final checkpoint: {paths[-1]}")


def cmd_build_graph(args):
    ds = vmg_data.load(args.dataset)
    model, _ = MetricModel.load(args.metric_checkpoint)
    graph = build_graph(ds, model, args.gamma_m, args.reward_mode)
    out = _ensure_parent(_out_path(args.out))
    graph.save(out)
    stats = graph.stats()
    print(
        f"wrote {out}: {stats['n_vertices']} vertices, {stats['n_edges']} edges, "
        f"compression {stats['transition_compression']:.1f}x"
    )


def cmd_plan(args):
    graph = MemoryGraph.load(args.graph)
    values = value_iteration(graph, args.discount)
    out = _ensure_parent(_out_path(args.out))
    values.save(out)
    print(
        f"wrote {out}: {values.iterations} sweeps, "
        f"converged={values.converged}, max value {float(np.max(values.values)):.4f}"
    )


def _parse_center(text):
    return [float(x) for x in text.split(",")]


def cmd_relabel(args):
    graph = MemoryGraph.load(args.graph)
    ds = vmg_data.load(args.dataset)
    model, _ = MetricModel.load(args.metric_checkpoint)
    params = {}
    if args.center is not None:
        params["center"] = _parse_center(args.center)
    if args.radius is not None:
        params["radius"] = args.radius
    fn = make_reward_fn(args.reward, **params)
    relabeled = relabel_graph(graph, ds, model, fn, reward_mode=args.reward_mode)
    out = _ensure_parent(_out_path(args.out))
    relabeled.save(out)
    print(f"wrote {out} (reward '{args.reward}')")
    if args.values_out:
        values = value_iteration(relabeled, args.discount)
        vout = _ensure_parent(_out_path(args.values_out))
        values.save(vout)
        print(f"wrote {vout}")


def _plan_config_from_args(args):
    return PlanConfig(
        discount=args.discount,
        n_search_steps=args.n_search_steps,
        n_subgoal=args.n_subgoal,
        greedy=args.greedy,
    )


def cmd_evaluate(args):
    env = make(args.env)
    model, _ = MetricModel.load(args.metric_checkpoint)
    tran, _ = Translator.load(args.translator_checkpoint)
    graph = MemoryGraph.load(args.graph)
    values = ValueTable.load(args.values)
    agent = Agent(
        model,
        tran,
        graph,
        values,
        plan_config=_plan_config_from_args(args),
        action_bounds=(env.spec.action_low, env.spec.action_high),
    )
    report = evaluate_agent(agent, env, n_episodes=args.episodes, base_seed=args.seed)
    doc = report.to_dict()
    if args.out:
        write_json(_ensure_parent(_out_path(args.out)), doc)
    print(json.dumps(doc, indent=2, sort_keys=True))


def cmd_export_layout(args):
    graph = MemoryGraph.load(args.graph)
    out = _ensure_parent(_out_path(args.out))
    export_layout(graph, out)
    print(f"wrote {out}")


def cmd_run_pipeline(args):
    config = parse_config(args.config)
    out_dir = _out_path(args.out)
    doc = run_pipeline(config, out_dir)
    report_path = os.path.join(out_dir, "report.json")
    with open(report_path, encoding="utf-8") as fh:
        report = json.load(fh)
    print(json.dumps(report, indent=2, sort_keys=True))
    print(f"manifest: {os.path.join(out_dir, 'manifest.json')}")
    del doc


def cmd_replay(args):
    result = replay_manifest(args.manifest, _out_path(args.out))
    status = "MATCH" if result["match"] else "MISMATCH"
    print(f"replay {status}: {len(result['artifacts'])} artifacts compared")
    if not result["match"]:
        for rel, (old, new) in sorted(result["artifacts"].items()):
            if old != new:
                print(f"  {rel}: recorded {old and old[:12]}, replayed {new and new[:12]}")
        sys.exit(1)


def build_parser():
    parser = argparse.ArgumentParser(prog="vmg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("collect", help="run a scripted collector and save a dataset")
    p.add_argument("--env", required=True, choices=env_names())
    p.add_argument("--n-transitions", type=int, default=20_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="dataset path (.npz or .jsonl)")
    p.add_argument("--noise-sigma", type=float, default=None)
    p.add_argument("--chaos-prob", type=float, default=None)
    p.add_argument("--detour-prob", type=float, default=None)
    p.add_argument("--flip-prob", type=float, default=None)
    p.set_defaults(fn=cmd_collect)

    p = sub.add_parser("dataset", help="dataset utilities")
    dsub = p.add_subparsers(dest="dataset_command", required=True)
    v = dsub.add_parser("validate", help="parse a dataset file and report its shape")
    v.add_argument("path")
    v.set_defaults(fn=cmd_dataset_validate)

    for name, fn in (("train-metric", cmd_train_metric), ("train-translator", cmd_train_translator)):
        p = sub.add_parser(name, help=f"{name.replace('-', ' ')} on a dataset")
        p.add_argument("--dataset", required=True)
        p.add_argument("--out", required=True, help="checkpoint directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--config", default=None, help="pipeline config supplying the training section")
        p.add_argument("--epochs", type=int, default=None, help="override the config epoch count")
        p.set_defaults(fn=fn)

    p = sub.add_parser("build-graph", help="merge dataset states into a memory graph")
    p.add_argument("--dataset", required=True)
    p.add_argument("--metric-checkpoint", required=True)
    p.add_argument("--gamma-m", type=float, default=0.8)
    p.add_argument("--reward-mode", default="avg_with_internal")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_build_graph)

    p = sub.add_parser("plan", help="run value iteration over a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--discount", type=float, default=0.8)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_plan)

    p = sub.add_parser("relabel", help="recompute edge rewards for a new task")
    p.add_argument("--graph", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--metric-checkpoint", required=True)
    p.add_argument("--reward", required=True, help="zero | goal_region | negative_distance")
    p.add_argument("--center", default=None, help="comma-separated coordinates")
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--reward-mode", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--values-out", default=None, help="also rerun value iteration")
    p.add_argument("--discount", type=float, default=0.8)
    p.set_defaults(fn=cmd_relabel)

    p = sub.add_parser("evaluate", help="roll out an assembled agent")
    p.add_argument("--env", required=True, choices=env_names())
    p.add_argument("--metric-checkpoint", required=True)
    p.add_argument("--translator-checkpoint", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--values", required=True)
    p.add_argument("--episodes", type=int, default=100)
    p.add_argument("--seed", type=int, default=10_000, help="base seed for evaluation episodes")
    p.add_argument("--discount", type=float, default=0.8)
    p.add_argument("--n-search-steps", type=int, default=None)
    p.add_argument("--n-subgoal", type=int, default=1)
    p.add_argument("--greedy", action="store_true")
    p.add_argument("--out", default=None, help="write the report as JSON")
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("export-layout", help="project a graph to 2-D for plotting")
    p.add_argument("--graph", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_export_layout)

    p = sub.add_parser("run-pipeline", help="run every stage from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="run directory")
    p.set_defaults(fn=cmd_run_pipeline)

    p = sub.add_parser("replay", help="re-run a manifest and compare artifact hashes")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="fresh directory for the replayed run")
    p.set_defaults(fn=cmd_replay)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.fn(args)
    except (VmgError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
