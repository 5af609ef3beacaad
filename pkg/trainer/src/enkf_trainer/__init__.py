"""Surrogate trainer and figure renderer for the enkfda experiment suite."""

from .network import SurrogateNet, count_parameters, parameter_breakdown
from .reference import forward_reference, forward_reference_files
from .train import PRESETS, TrainingRun, train_from_csv, train_surrogate
from .weights_io import WeightFileError, export_payload, load, save

__version__ = "0.1.0"

__all__ = [
    "PRESETS",
    "SurrogateNet",
    "TrainingRun",
    "WeightFileError",
    "count_parameters",
    "export_payload",
    "forward_reference",
    "forward_reference_files",
    "load",
    "parameter_breakdown",
    "save",
    "train_from_csv",
    "train_surrogate",
]
