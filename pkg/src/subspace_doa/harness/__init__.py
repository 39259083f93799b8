"""Experiment orchestration: sweeps, error metrics, result files and config."""

from .metrics import mse_metric, trial_error
from .report import COLUMNS, emit_report, format_table, read_report
from .sweep import METHOD_MODES, EvalCell, SweepSpec, run_sweep

__all__ = [
    "COLUMNS",
    "METHOD_MODES",
    "EvalCell",
    "SweepSpec",
    "emit_report",
    "format_table",
    "mse_metric",
    "read_report",
    "run_sweep",
    "trial_error",
]
