from .losses import action_loss, contrastive_loss, metric_loss
from .model import FEATURE_DIM, MARGIN, MetricModel
from .train import train_metric

__all__ = [
    "action_loss",
    "contrastive_loss",
    "metric_loss",
    "FEATURE_DIM",
    "MARGIN",
    "MetricModel",
    "train_metric",
]
