"""Benchmark FDR control (BH, BY, Storey) on simulated negative binomial RNA-seq counts."""

__version__ = "0.1.0"

from .randgen import ParameterError, RngState  # noqa: E402
from .simcore import CountMatrix, GroundTruth, SimulationConfig, simulate_dataset  # noqa: E402
from .detest import TestResult, run_de_tests  # noqa: E402
from .multtest import AdjustedResults, adjust_all, adjust_bh, adjust_by, adjust_storey, qvalues  # noqa: E402
from .evalmetrics import ConfusionSummary, confusion, error_rates, pr_curve, roc_curve  # noqa: E402

__all__ = [
    "AdjustedResults",
    "ConfusionSummary",
    "CountMatrix",
    "GroundTruth",
    "ParameterError",
    "RngState",
    "SimulationConfig",
    "TestResult",
    "adjust_all",
    "adjust_bh",
    "adjust_by",
    "adjust_storey",
    "confusion",
    "error_rates",
    "pr_curve",
    "qvalues",
    "roc_curve",
    "run_de_tests",
    "simulate_dataset",
]
