"""Configuration, experiment orchestration and verification reports."""
from .config import DEFAULT_PARAMS, EXPERIMENTS, ExperimentConfig, ModelSpec, default_config, load_config
from .experiments import run_experiment, run_verify_envelope, write_csv
from .report import CheckResult, VerificationReport, load_report

__all__ = [
    "DEFAULT_PARAMS",
    "EXPERIMENTS",
    "ExperimentConfig",
    "ModelSpec",
    "default_config",
    "load_config",
    "run_experiment",
    "run_verify_envelope",
    "write_csv",
    "CheckResult",
    "VerificationReport",
    "load_report",
]
