"""Rollout evaluation and score normalization."""

from dataclasses import dataclass, field

import numpy as np

from ..envs import run_episodes
from ..errors import InvalidArgumentError


@dataclass
class EvalReport:
    n_episodes: int
    success_rate: float
    mean_return: float
    normalized_score: float
    successes: list = field(repr=False, default_factory=list)
    returns: list = field(repr=False, default_factory=list)

    def to_dict(self):
        return {
            "n_episodes": self.n_episodes,
            "success_rate": self.success_rate,
            "mean_return": self.mean_return,
            "normalized_score": self.normalized_score,
        }


def normalized_score(score, spec):
    span = spec.expert_score - spec.random_score
    if span <= 0:
        raise InvalidArgumentError(f"{spec.name}: degenerate score anchors")
    return 100.0 * (score - spec.random_score) / span


def evaluate_policy(env, act_fn, n_episodes, base_seed, success_fn=None):
    """Score any act(obs, rng) policy; success_fn overrides the env's own
    success signal with a predicate over the visited state list."""
    if success_fn is None:
        successes, returns = run_episodes(env, act_fn, n_episodes, base_seed)
    else:
        successes, returns = [], []
        for i in range(n_episodes):
            rng = np.random.default_rng((base_seed, i))
            obs = env.reset(seed=base_seed + i)
            visited = [obs]
            total, done = 0.0, False
            while not done:
                obs, r, done, _ = env.step(act_fn(obs, rng))
                visited.append(obs)
                total += r
            successes.append(bool(success_fn(visited)))
            returns.append(total)
    rate = float(np.mean(successes))
    return EvalReport(
        n_episodes=n_episodes,
        success_rate=rate,
        mean_return=float(np.mean(returns)),
        normalized_score=normalized_score(rate, env.spec),
        successes=[bool(s) for s in successes],
        returns=[float(r) for r in returns],
    )


def evaluate_agent(agent, env, n_episodes, base_seed, success_fn=None):
    return evaluate_policy(env, agent.act, n_episodes, base_seed, success_fn)


def aggregate_reports(reports):
    """Mean/std across model seeds, each seed already an EvalReport."""
    if not reports:
        raise InvalidArgumentError("no reports to aggregate")
    rates = np.array([r.success_rate for r in reports])
    scores = np.array([r.normalized_score for r in reports])
    return {
        "n_seeds": len(reports),
        "success_rate_mean": float(rates.mean()),
        "success_rate_std": float(rates.std()),
        "normalized_score_mean": float(scores.mean()),
        "normalized_score_std": float(scores.std()),
        "per_seed": [r.to_dict() for r in reports],
    }
