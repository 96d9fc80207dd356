"""Quantum-kernel SVM classification of two-qubit states across parameter domains."""

__version__ = "0.1.0"

from .exceptions import ConfigError, ContractError, InfeasiblePointError, ParameterError, SamplingExhaustedError
from .measures import concurrence, discord_label, entanglement_label, geometric_discord
from .qkernel import FeatureMapConfig, encode, gram_matrix
from .svm import SvmModel, predict, predict_proba, train_smo

__all__ = [
    "ConfigError", "ContractError", "InfeasiblePointError", "ParameterError", "SamplingExhaustedError",
    "concurrence", "discord_label", "entanglement_label", "geometric_discord",
    "FeatureMapConfig", "encode", "gram_matrix",
    "SvmModel", "predict", "predict_proba", "train_smo",
]
