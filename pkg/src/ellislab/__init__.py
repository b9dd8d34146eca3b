"""Enveloping semigroups of Z-flows: concrete flows, numeric and closed-form E(X), detectors and theorem checks."""

from .config import ExperimentConfig, TheoremsConfig, parse_config
from .detectors import ReturnSet
from .flows import Flow, make_flow
from .harness import run_all, run_theorem
from .spaces import FunctionMetric, distance, function_distance, sample_grid
from .verdict import Verdict, Witness

__version__ = "0.1.0"

__all__ = [
    "ExperimentConfig",
    "Flow",
    "FunctionMetric",
    "ReturnSet",
    "TheoremsConfig",
    "Verdict",
    "Witness",
    "distance",
    "function_distance",
    "make_flow",
    "parse_config",
    "run_all",
    "run_theorem",
    "sample_grid",
]
