from .adam import Adam
from .autodiff import Tensor, backward
from .checkpoint import load_checkpoint, save_checkpoint
from .mlp import HIDDEN_WIDTH, Mlp

__all__ = [
    "Adam",
    "Tensor",
    "backward",
    "load_checkpoint",
    "save_checkpoint",
    "HIDDEN_WIDTH",
    "Mlp",
]
