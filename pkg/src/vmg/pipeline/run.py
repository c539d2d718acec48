"""Pipeline orchestration: collect, train, build, plan, evaluate.

Stage order and data flow:

    collect -> dataset.npz
    per model seed s:
        metric:s      -> seed-SSS/metric/*.npz, history.json
        translator:s  -> seed-SSS/translator/*.npz, history.json
        select:s      -> seed-SSS/selection.json   (paired checkpoint pick)
        graph:s       -> seed-SSS/graph.npz
        plan:s        -> seed-SSS/values.npz
        eval:s        -> seed-SSS/report.json
    baselines -> baselines.json
    aggregate -> report.json

Each stage's signature covers exactly its config slice and input hashes,
so edits rerun the smallest sufficient suffix of this plan. Replaying a
finished manifest into a fresh directory must reproduce every artifact
hash; anything time- or path-dependent is a bug here.
"""

import dataclasses
import math
import os
import shutil

from .. import data as data_io
from ..agent import Agent, aggregate_reports, evaluate_agent
from ..envs import make, random_baseline, scripted_baseline
from ..errors import ConfigError
from ..graph import build_graph
from ..metric import MetricModel, train_metric
from ..metric.train import checkpoint_name as metric_checkpoint_name
from ..plan import PlanConfig, ValueTable, value_iteration
from ..serialize import file_sha256, read_json, write_json
from ..translate import Translator, train_translator
from ..translate.train import checkpoint_name as translator_checkpoint_name
from .config import PipelineConfig
from .manifest import Manifest, load_manifest, stage_signature

# checkpoint-selection window: candidates from this fraction of training onward
SELECTION_WINDOW = 0.625


def _seed_dir(seed):
    return f"seed-{seed:03d}"


def _plan_config(cfg):
    return PlanConfig(
        discount=cfg.plan.discount,
        n_search_steps=cfg.plan.n_search_steps,
        n_subgoal=cfg.plan.n_subgoal,
        greedy=cfg.plan.greedy,
    )


def _checkpoint_epochs(epochs, every):
    marks = list(range(every, epochs + 1, every))
    if not marks or marks[-1] != epochs:
        marks.append(epochs)
    return marks


def _run_stage(manifest, name, params, inputs, compute):
    """compute() returns relative artifact paths; returns (hashes, cached)."""
    sig = stage_signature(name, params, inputs)
    manifest.touched.add(name)
    cached = manifest.cached_artifacts(name, sig)
    if cached is not None:
        manifest.doc["stages"][name]["cached"] = True
        manifest.save()
        return cached, True
    try:
        rel_paths = compute()
    except Exception as exc:
        manifest.record_failed(name, sig, params, inputs, exc)
        raise
    return manifest.record_completed(name, sig, params, inputs, rel_paths, cached=False), False


def _collect_kwargs(data_cfg, env):
    if env.spec.name.startswith("point-"):
        return {
            "noise_sigma": data_cfg.noise_sigma,
            "chaos_prob": data_cfg.chaos_prob,
            "detour_prob": data_cfg.detour_prob,
        }
    return {"flip_prob": data_cfg.flip_prob}


def _stage_collect(cfg, manifest, run_dir):
    from ..envs import collect

    env = make(cfg.data.env)
    params = dataclasses.asdict(cfg.data)
    inputs = {}
    if cfg.data.path is not None:
        if not os.path.exists(cfg.data.path):
            raise ConfigError(f"data.path: file not found: {cfg.data.path}")
        inputs["source"] = file_sha256(cfg.data.path)

    def compute():
        out = os.path.join(run_dir, "dataset.npz")
        if cfg.data.path is not None:
            ds = data_io.load(cfg.data.path)
            env_tag = ds.metadata.get("env")
            if env_tag is not None and env_tag != cfg.data.env:
                raise ConfigError(
                    f"data.path: dataset was collected on {env_tag!r}, config says {cfg.data.env!r}"
                )
            if cfg.data.path.endswith(".npz"):
                shutil.copyfile(cfg.data.path, out)
            else:
                data_io.save(out, ds)
        else:
            ds = collect(env, cfg.data.n_transitions, cfg.data.seed, **_collect_kwargs(cfg.data, env))
            data_io.save(out, ds)
        return ["dataset.npz"]

    return _run_stage(manifest, "collect", params, inputs, compute)


def _train_stage(cfg, manifest, run_dir, kind, seed, dataset_hash):
    section = cfg.metric if kind == "metric" else cfg.translator
    params = {**dataclasses.asdict(section), "seed": seed}
    inputs = {"dataset": dataset_hash}
    rel_dir = os.path.join(_seed_dir(seed), kind)

    def compute():
        dataset = data_io.load(os.path.join(run_dir, "dataset.npz"))
        out_dir = os.path.join(run_dir, rel_dir)
        if kind == "metric":
            _, history, paths = train_metric(
                dataset,
                seed=seed,
                out_dir=out_dir,
                epochs=section.epochs,
                batch_size=section.batch_size,
                lr=section.lr,
                feature_dim=section.feature_dim,
                margin=section.margin,
                steps_per_epoch=section.steps_per_epoch,
                checkpoint_every=section.checkpoint_every,
            )
        else:
            _, history, paths = train_translator(
                dataset,
                seed=seed,
                out_dir=out_dir,
                epochs=section.epochs,
                batch_size=section.batch_size,
                lr=section.lr,
                k_max=section.k_max,
                steps_per_epoch=section.steps_per_epoch,
                checkpoint_every=section.checkpoint_every,
            )
        write_json(os.path.join(out_dir, "history.json"), history)
        rels = [os.path.relpath(p, run_dir) for p in paths]
        return rels + [os.path.join(rel_dir, "history.json")]

    return _run_stage(manifest, f"{kind}:{seed}", params, inputs, compute)


def _paired_epochs(cfg):
    metric_marks = _checkpoint_epochs(cfg.metric.epochs, cfg.metric.checkpoint_every)
    tran_marks = _checkpoint_epochs(cfg.translator.epochs, cfg.translator.checkpoint_every)
    shared = sorted(set(metric_marks) & set(tran_marks))
    lo = math.ceil(SELECTION_WINDOW * min(cfg.metric.epochs, cfg.translator.epochs))
    window = [e for e in shared if e >= lo]
    if window:
        return window
    # nothing paired late enough: fall back to the final checkpoints
    return [(metric_marks[-1], tran_marks[-1])] if metric_marks[-1] != tran_marks[-1] else [metric_marks[-1]]


def _ckpt_pair(epoch):
    if isinstance(epoch, tuple):
        return metric_checkpoint_name(epoch[0]), translator_checkpoint_name(epoch[1])
    return metric_checkpoint_name(epoch), translator_checkpoint_name(epoch)


def _stage_select(cfg, manifest, run_dir, seed, train_hashes):
    params = {
        "mode": cfg.checkpoint,
        "selection_episodes": cfg.eval.selection_episodes,
        "plan": dataclasses.asdict(cfg.plan),
        "graph": dataclasses.asdict(cfg.graph),
        "env": cfg.data.env,
    }
    rel = os.path.join(_seed_dir(seed), "selection.json")

    def compute():
        candidates = _paired_epochs(cfg)
        if cfg.checkpoint == "last":
            choice, scores = candidates[-1], {}
        else:
            dataset = data_io.load(os.path.join(run_dir, "dataset.npz"))
            env = make(cfg.data.env)
            scores = {}
            best, best_rate = None, -1.0
            for epoch in candidates:
                m_name, t_name = _ckpt_pair(epoch)
                model, _ = MetricModel.load(os.path.join(run_dir, _seed_dir(seed), "metric", m_name))
                tran, _ = Translator.load(
                    os.path.join(run_dir, _seed_dir(seed), "translator", t_name)
                )
                graph = build_graph(dataset, model, cfg.graph.gamma_m, cfg.graph.reward_mode)
                values = value_iteration(graph, cfg.plan.discount)
                agent = Agent(
                    model,
                    tran,
                    graph,
                    values,
                    plan_config=_plan_config(cfg),
                    action_bounds=(env.spec.action_low, env.spec.action_high),
                )
                report = evaluate_agent(
                    agent,
                    env,
                    n_episodes=cfg.eval.selection_episodes,
                    base_seed=cfg.eval.base_seed + 7919,
                )
                scores[str(epoch)] = report.success_rate
                # ties go to the later epoch
                if report.success_rate >= best_rate:
                    best, best_rate = epoch, report.success_rate
            choice = best
        m_name, t_name = _ckpt_pair(choice)
        write_json(
            os.path.join(run_dir, rel),
            {
                "mode": cfg.checkpoint,
                "epoch": list(choice) if isinstance(choice, tuple) else choice,
                "metric_checkpoint": os.path.join(_seed_dir(seed), "metric", m_name),
                "translator_checkpoint": os.path.join(_seed_dir(seed), "translator", t_name),
                "scores": scores,
            },
        )
        return [rel]

    return _run_stage(manifest, f"select:{seed}", params, {"checkpoints": train_hashes}, compute)


def _selected_paths(run_dir, seed):
    sel = read_json(os.path.join(run_dir, _seed_dir(seed), "selection.json"))
    return sel["metric_checkpoint"], sel["translator_checkpoint"]


def _stage_graph(cfg, manifest, run_dir, seed, dataset_hash, metric_hash):
    params = dataclasses.asdict(cfg.graph)
    inputs = {"dataset": dataset_hash, "metric": metric_hash}
    rel = os.path.join(_seed_dir(seed), "graph.npz")

    def compute():
        dataset = data_io.load(os.path.join(run_dir, "dataset.npz"))
        metric_rel, _ = _selected_paths(run_dir, seed)
        model, _ = MetricModel.load(os.path.join(run_dir, metric_rel))
        graph = build_graph(
            dataset,
            model,
            cfg.graph.gamma_m,
            cfg.graph.reward_mode,
            metadata={"dataset_sha256": dataset_hash, "metric_sha256": metric_hash},
        )
        graph.save(os.path.join(run_dir, rel))
        return [rel]

    return _run_stage(manifest, f"graph:{seed}", params, inputs, compute)


def _stage_plan(cfg, manifest, run_dir, seed, graph_hash):
    params = {"discount": cfg.plan.discount}
    inputs = {"graph": graph_hash}
    rel = os.path.join(_seed_dir(seed), "values.npz")

    def compute():
        from ..graph import MemoryGraph

        graph = MemoryGraph.load(os.path.join(run_dir, _seed_dir(seed), "graph.npz"))
        values = value_iteration(graph, cfg.plan.discount)
        values.save(os.path.join(run_dir, rel))
        return [rel]

    return _run_stage(manifest, f"plan:{seed}", params, inputs, compute)


def _sorted_inputs(d):
    return {k: d[k] for k in sorted(d)}


def _json_safe_stats(stats):
    out = {}
    for k, v in stats.items():
        if isinstance(v, float) and not math.isfinite(v):
            v = None
        out[k] = v
    return out


def _stage_eval(cfg, manifest, run_dir, seed, input_hashes):
    params = {
        "episodes": cfg.eval.episodes,
        "base_seed": cfg.eval.base_seed,
        "plan": dataclasses.asdict(cfg.plan),
    }
    rel = os.path.join(_seed_dir(seed), "report.json")

    def compute():
        from ..graph import MemoryGraph

        metric_rel, tran_rel = _selected_paths(run_dir, seed)
        model, _ = MetricModel.load(os.path.join(run_dir, metric_rel))
        tran, _ = Translator.load(os.path.join(run_dir, tran_rel))
        graph = MemoryGraph.load(os.path.join(run_dir, _seed_dir(seed), "graph.npz"))
        values = ValueTable.load(os.path.join(run_dir, _seed_dir(seed), "values.npz"))
        env = make(cfg.data.env)
        agent = Agent(
            model,
            tran,
            graph,
            values,
            plan_config=_plan_config(cfg),
            action_bounds=(env.spec.action_low, env.spec.action_high),
        )
        report = evaluate_agent(agent, env, n_episodes=cfg.eval.episodes, base_seed=cfg.eval.base_seed)
        doc = report.to_dict()
        doc["seed"] = seed
        doc["graph"] = _json_safe_stats(graph.stats())
        write_json(os.path.join(run_dir, rel), doc)
        return [rel]

    return _run_stage(manifest, f"eval:{seed}", params, _sorted_inputs(input_hashes), compute)


def _stage_baselines(cfg, manifest, run_dir):
    from ..agent.evaluate import normalized_score
    from ..envs.policies import ChainForwardPolicy

    params = {
        "env": cfg.data.env,
        "episodes": cfg.eval.episodes,
        "base_seed": cfg.eval.base_seed,
        "noise_sigma": cfg.data.noise_sigma,
        "chaos_prob": cfg.data.chaos_prob,
        "flip_prob": cfg.data.flip_prob,
    }

    def compute():
        from ..envs import run_episodes

        env = make(cfg.data.env)
        rand_rate = random_baseline(env, cfg.eval.episodes, cfg.eval.base_seed)
        if cfg.data.env.startswith("point-"):
            scripted_rate = scripted_baseline(
                env,
                cfg.eval.episodes,
                cfg.eval.base_seed,
                noise_sigma=cfg.data.noise_sigma,
                chaos_prob=cfg.data.chaos_prob,
            )
        else:
            policy = ChainForwardPolicy(cfg.data.flip_prob)
            successes, _ = run_episodes(env, policy.act, cfg.eval.episodes, cfg.eval.base_seed)
            scripted_rate = float(sum(successes) / len(successes))
        write_json(
            os.path.join(run_dir, "baselines.json"),
            {
                "random": {
                    "success_rate": rand_rate,
                    "normalized_score": normalized_score(rand_rate, env.spec),
                },
                "scripted": {
                    "success_rate": scripted_rate,
                    "normalized_score": normalized_score(scripted_rate, env.spec),
                },
            },
        )
        return ["baselines.json"]

    return _run_stage(manifest, "baselines", params, {}, compute)


def _stage_aggregate(cfg, manifest, run_dir, seeds, eval_hashes):
    params = {"seeds": seeds}

    def compute():
        from ..agent.evaluate import EvalReport

        reports = []
        for seed in seeds:
            doc = read_json(os.path.join(run_dir, _seed_dir(seed), "report.json"))
            reports.append(
                EvalReport(
                    n_episodes=doc["n_episodes"],
                    success_rate=doc["success_rate"],
                    mean_return=doc["mean_return"],
                    normalized_score=doc["normalized_score"],
                )
            )
        agg = aggregate_reports(reports)
        agg["baselines"] = read_json(os.path.join(run_dir, "baselines.json"))
        write_json(os.path.join(run_dir, "report.json"), agg)
        return ["report.json"]

    return _run_stage(manifest, "aggregate", params, eval_hashes, compute)


def run_pipeline(config, run_dir, log=print):
    """Execute every stage, reusing cached results; returns the manifest doc."""
    if isinstance(config, dict):
        config = PipelineConfig.from_dict(config)
    config.validate()
    os.makedirs(run_dir, exist_ok=True)
    config.save(os.path.join(run_dir, "config.json"))
    manifest = Manifest(run_dir, config.to_dict())

    def note(name, cached):
        if log is not None:
            log(f"[{name}] {'cached' if cached else 'done'}")

    collected, cached = _stage_collect(config, manifest, run_dir)
    note("collect", cached)
    dataset_hash = collected["dataset.npz"]

    seeds = [config.seed + i for i in range(config.eval.model_seeds)]
    eval_hashes = {}
    for seed in seeds:
        os.makedirs(os.path.join(run_dir, _seed_dir(seed)), exist_ok=True)
        m_hashes, cached = _train_stage(config, manifest, run_dir, "metric", seed, dataset_hash)
        note(f"metric:{seed}", cached)
        t_hashes, cached = _train_stage(config, manifest, run_dir, "translator", seed, dataset_hash)
        note(f"translator:{seed}", cached)

        train_hashes = _sorted_inputs({**m_hashes, **t_hashes})
        sel_hashes, cached = _stage_select(config, manifest, run_dir, seed, train_hashes)
        note(f"select:{seed}", cached)

        metric_rel, tran_rel = _selected_paths(run_dir, seed)
        g_hashes, cached = _stage_graph(
            config, manifest, run_dir, seed, dataset_hash, m_hashes[metric_rel]
        )
        note(f"graph:{seed}", cached)
        graph_hash = g_hashes[os.path.join(_seed_dir(seed), "graph.npz")]

        v_hashes, cached = _stage_plan(config, manifest, run_dir, seed, graph_hash)
        note(f"plan:{seed}", cached)

        e_hashes, cached = _stage_eval(
            config,
            manifest,
            run_dir,
            seed,
            {
                "graph": graph_hash,
                "values": v_hashes[os.path.join(_seed_dir(seed), "values.npz")],
                "metric": m_hashes[metric_rel],
                "translator": t_hashes[tran_rel],
            },
        )
        note(f"eval:{seed}", cached)
        eval_hashes[f"eval:{seed}"] = e_hashes[os.path.join(_seed_dir(seed), "report.json")]

    _, cached = _stage_baselines(config, manifest, run_dir)
    note("baselines", cached)
    _, cached = _stage_aggregate(config, manifest, run_dir, seeds, eval_hashes)
    note("aggregate", cached)
    manifest.prune_untouched()
    return manifest.doc


def replay_manifest(manifest_path, out_dir, log=print):
    """Re-run a finished manifest's config in a fresh directory and compare
    every artifact hash; returns {"match": bool, "artifacts": {rel: (old, new)}}."""
    doc = load_manifest(manifest_path)
    expected = {}
    for stage in doc["stages"].values():
        expected.update(stage.get("artifacts", {}))
    run_pipeline(doc["config"], out_dir, log=log)
    fresh = load_manifest(os.path.join(out_dir, "manifest.json"))
    actual = {}
    for stage in fresh["stages"].values():
        actual.update(stage.get("artifacts", {}))
    report = {}
    match = set(expected) == set(actual)
    for rel in sorted(set(expected) | set(actual)):
        old, new = expected.get(rel), actual.get(rel)
        report[rel] = (old, new)
        if old != new:
            match = False
    return {"match": match, "artifacts": report}
