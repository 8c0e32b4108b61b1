"""Federated one-class SVM anomaly detection with conditional median-loss
aggregation and edge-based support-vector personalization."""

from .data import Event, Label, SynthConfig
from .federated import AggregationPolicy, RoundConfig, run_training
from .kernel import KernelConfig, KernelMatrix, gaussian_kernel, kernel_matrix, median_sigma
from .metrics import Confusion, confusion, f_score
from .ocsvm import OcsvmModel, TrainConfig, classify, decision, train_local
from .personalize import EdgeConfig, personalize_model

__all__ = [
    "AggregationPolicy",
    "Confusion",
    "EdgeConfig",
    "Event",
    "KernelConfig",
    "KernelMatrix",
    "Label",
    "OcsvmModel",
    "RoundConfig",
    "SynthConfig",
    "TrainConfig",
    "classify",
    "confusion",
    "decision",
    "f_score",
    "gaussian_kernel",
    "kernel_matrix",
    "median_sigma",
    "personalize_model",
    "run_training",
    "train_local",
]
