from .dataset import Dataset, Episode
from .io import load, save
from .sampling import (
    PairBatch,
    PairSampler,
    TransitionBatch,
    TransitionSampler,
    relabel_rewards,
)

__all__ = [
    "Dataset",
    "Episode",
    "load",
    "save",
    "PairBatch",
    "PairSampler",
    "TransitionBatch",
    "TransitionSampler",
    "relabel_rewards",
]
