from .agent import Agent
from .evaluate import (
    EvalReport,
    aggregate_reports,
    evaluate_agent,
    evaluate_policy,
    normalized_score,
)
from .relabel import (
    REWARD_FNS,
    goal_region_reward,
    make_reward_fn,
    negative_distance_reward,
    relabel_and_replan,
    relabel_graph,
    zero_reward,
)

__all__ = [
    "Agent",
    "EvalReport",
    "aggregate_reports",
    "evaluate_agent",
    "evaluate_policy",
    "normalized_score",
    "REWARD_FNS",
    "goal_region_reward",
    "make_reward_fn",
    "negative_distance_reward",
    "relabel_and_replan",
    "relabel_graph",
    "zero_reward",
]
