from .model import Translator
from .train import K_MAX, train_translator, translator_loss

__all__ = ["Translator", "K_MAX", "train_translator", "translator_loss"]
