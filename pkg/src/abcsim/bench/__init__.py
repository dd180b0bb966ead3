"""Experiment bench: specs, runners and CSV output."""
from .runner import (CSV_FIELDS, ResultRow, describe, frame_error_counts, read_csv, run, run_ber_experiment,
                     run_rate_experiment, run_training, write_csv)
from .spec import KINDS, SWEEPABLE, ExperimentSpec, SpecError, build_spec, parse_sweep, read_config_file

__all__ = [
    "CSV_FIELDS", "KINDS", "SWEEPABLE", "ExperimentSpec", "ResultRow", "SpecError", "build_spec",
    "describe", "frame_error_counts", "parse_sweep", "read_config_file", "read_csv", "run",
    "run_ber_experiment", "run_rate_experiment", "run_training", "write_csv",
]
