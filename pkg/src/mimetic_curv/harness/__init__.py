"""Experiment configs, convergence sweeps, CSV emission, and verification."""

from .config import ExperimentConfig, load_config
from .experiments import run_convergence, run_gauss_check

__all__ = ["ExperimentConfig", "load_config", "run_convergence", "run_gauss_check"]
