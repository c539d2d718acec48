from .base import Env, EnvSpec, env_names, make, register
from .chain import ChainEnv
from .collect import (
    collect,
    coverage_report,
    random_baseline,
    run_episodes,
    scripted_baseline,
)
from .point_maze import Layout, PointMaze
from .policies import ChainForwardPolicy, UniformRandomPolicy, WaypointPolicy

__all__ = [
    "Env",
    "EnvSpec",
    "env_names",
    "make",
    "register",
    "ChainEnv",
    "collect",
    "coverage_report",
    "random_baseline",
    "run_episodes",
    "scripted_baseline",
    "Layout",
    "PointMaze",
    "ChainForwardPolicy",
    "UniformRandomPolicy",
    "WaypointPolicy",
]
