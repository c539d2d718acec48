"""Dataset collection with scripted policies, and shared rollout helpers.

Collection draws one RNG stream per run; per-episode reset seeds come
from a SeedSequence spawn so the whole dataset is a pure function of the
run seed.
"""

import numpy as np

from ..data import Dataset, Episode
from ..errors import InvalidArgumentError
from .point_maze import Layout, PointMaze
from .chain import ChainEnv
from .policies import ChainForwardPolicy, UniformRandomPolicy, WaypointPolicy

DEFAULT_NOISE_SIGMA = 0.6
DEFAULT_CHAOS_PROB = 0.75
DEFAULT_DETOUR_PROB = 0.45


def run_episodes(env, act_fn, n_episodes, base_seed):
    """Roll out act_fn(obs, rng); returns (successes, returns) lists.

    Episode i resets with seed base_seed + i, so scores are reproducible
    and two policies can be compared on identical starts.
    """
    successes, returns = [], []
    for i in range(n_episodes):
        rng = np.random.default_rng((base_seed, i))
        obs = env.reset(seed=base_seed + i)
        total = 0.0
        success = False
        done = False
        while not done:
            obs, r, done, info = env.step(act_fn(obs, rng))
            total += r
            success = success or info["success"]
        successes.append(success)
        returns.append(total)
    return successes, returns


def _record_episode(env, act_fn, reset_seed, rng, step_cap):
    states = [env.reset(seed=reset_seed)]
    actions, rewards = [], []
    for _ in range(step_cap):
        a = act_fn(states[-1], rng)
        obs, r, done, _ = env.step(a)
        actions.append(np.asarray(a, dtype=np.float64))
        rewards.append(r)
        states.append(obs)
        if done:
            break
    return Episode(np.stack(states), np.stack(actions), np.asarray(rewards))


def _truncate(episodes, n_transitions):
    out, total = [], 0
    for ep in episodes:
        room = n_transitions - total
        if room <= 0:
            break
        if len(ep) > room:
            ep = Episode(ep.states[: room + 1], ep.actions[:room], ep.rewards[:room])
        out.append(ep)
        total += len(ep)
    return out


def collect_maze_dataset(
    env,
    n_transitions,
    seed,
    noise_sigma=DEFAULT_NOISE_SIGMA,
    chaos_prob=DEFAULT_CHAOS_PROB,
    detour_prob=DEFAULT_DETOUR_PROB,
):
    """Noisy goal-seeking trajectories; a detour episode first visits a
    random free cell, which is what puts off-route regions into the data."""
    if not isinstance(env, PointMaze):
        raise InvalidArgumentError("collect_maze_dataset needs a PointMaze")
    if n_transitions < 1:
        raise InvalidArgumentError("n_transitions must be positive")
    # log through the goal region instead of stopping at its boundary
    env = env.for_collection()
    rng = np.random.default_rng(seed)
    seeds = iter(np.random.SeedSequence(seed).generate_state(1 << 20))
    layout = env.layout
    free = [c for c in layout.free_cells() if c != layout.goal]
    to_goal = WaypointPolicy(layout, layout.goal, noise_sigma, chaos_prob)
    detour_policies = {}

    episodes, total = [], 0
    while total < n_transitions:
        detour = None
        if rng.random() < detour_prob:
            detour = free[int(rng.integers(len(free)))]
            if detour not in detour_policies:
                detour_policies[detour] = WaypointPolicy(layout, detour, noise_sigma, chaos_prob)

        state = {"leg": detour_policies[detour] if detour else to_goal}

        def act(pos, noise_rng):
            leg = state["leg"]
            if leg is not to_goal and leg.done(pos):
                state["leg"] = leg = to_goal
            return leg.act(pos, noise_rng)

        ep = _record_episode(env, act, int(next(seeds)), rng, env.spec.max_steps)
        episodes.append(ep)
        total += len(ep)

    episodes = _truncate(episodes, n_transitions)
    return Dataset(
        episodes,
        metadata={
            "env": env.spec.name,
            "collector": "waypoint-noisy",
            "seed": int(seed),
            "noise_sigma": float(noise_sigma),
            "chaos_prob": float(chaos_prob),
            "detour_prob": float(detour_prob),
            "n_transitions": int(n_transitions),
        },
    )


def collect_chain_dataset(env, n_transitions, seed, flip_prob=0.3):
    if not isinstance(env, ChainEnv):
        raise InvalidArgumentError("collect_chain_dataset needs a ChainEnv")
    env = env.for_collection()
    rng = np.random.default_rng(seed)
    seeds = iter(np.random.SeedSequence(seed).generate_state(1 << 20))
    policy = ChainForwardPolicy(flip_prob)
    episodes, total = [], 0
    while total < n_transitions:
        ep = _record_episode(env, policy.act, int(next(seeds)), rng, env.spec.max_steps)
        episodes.append(ep)
        total += len(ep)
    episodes = _truncate(episodes, n_transitions)
    return Dataset(
        episodes,
        metadata={
            "env": env.spec.name,
            "collector": "chain-forward",
            "seed": int(seed),
            "flip_prob": float(flip_prob),
            "n_transitions": int(n_transitions),
        },
    )


def collect(env, n_transitions, seed, **kwargs):
    if isinstance(env, PointMaze):
        return collect_maze_dataset(env, n_transitions, seed, **kwargs)
    if isinstance(env, ChainEnv):
        return collect_chain_dataset(env, n_transitions, seed, **kwargs)
    raise InvalidArgumentError(f"no collector for {type(env).__name__}")


def scripted_baseline(
    env, n_episodes, base_seed, noise_sigma=DEFAULT_NOISE_SIGMA, chaos_prob=DEFAULT_CHAOS_PROB
):
    """Success rate of the collection policy itself, detours off."""
    policy = WaypointPolicy(env.layout, env.layout.goal, noise_sigma, chaos_prob)
    successes, _ = run_episodes(env, policy.act, n_episodes, base_seed)
    return float(np.mean(successes))


def random_baseline(env, n_episodes, base_seed):
    policy = UniformRandomPolicy(env.spec)
    successes, _ = run_episodes(env, policy.act, n_episodes, base_seed)
    return float(np.mean(successes))


def coverage_report(dataset, layout):
    """Fraction of free cells visited and raw visit counts per cell."""
    counts = np.zeros((layout.height, layout.width), dtype=np.int64)
    for pos in dataset.all_states():
        counts[layout.cell_of(pos)] += 1
    free = ~layout.walls
    visited = (counts > 0) & free
    return {
        "free_cells": int(free.sum()),
        "visited_cells": int(visited.sum()),
        "coverage": float(visited.sum() / free.sum()),
        "counts": counts,
    }
