"""From-scratch classical heads and evaluation metrics."""
from .forest import DecisionTree, RandomForestModel, RfConfig, predict_rf, train_rf
from .metrics import ConfusionMatrix, MetricsReport, confusion_matrix, metrics_from_cm, roc_auc, roc_curve
from .mlp import MlpConfig, MlpModel, loss_and_gradients, predict_mlp, train_mlp

__all__ = [
    "ConfusionMatrix", "DecisionTree", "MetricsReport", "MlpConfig", "MlpModel",
    "RandomForestModel", "RfConfig", "confusion_matrix", "loss_and_gradients",
    "metrics_from_cm", "predict_mlp", "predict_rf", "roc_auc", "roc_curve",
    "train_mlp", "train_rf",
]
