"""Delay-Doppler sensing toolkit for OTFS-based joint radar/communication.

The package builds the delay-Doppler channel (cross-talk) operator directly
or through a low-complexity factored form, sparsifies the factors with
Dirichlet-lobe masks, estimates target delay/Doppler by maximum-likelihood
grid search, and benchmarks the estimator against the Cramer-Rao bound with
a reproducible Monte-Carlo harness.
"""
from . import crlb, crosstalk, dirichlet, estimator, grid, harness
from .crosstalk import (DenseCrossTalk, FactoredCrossTalk, compose,
                        direct_crosstalk, factored_crosstalk, partials)
from .crlb import FisherMatrix, bounds, fisher, mean_vector
from .dirichlet import (BandMask, dirichlet_mag, lobe_samples, make_mask,
                        masks_for)
from .errors import ConfigError, DomainError, GuardError, ShapeError
from .estimator import (EstimationResult, SearchGrid, default_grid,
                        likelihood_metric, ml_estimate, simulate_rx)
from .grid import (QAM16, SPEED_OF_LIGHT, SensingTarget, SystemConfig,
                   delay_tap_count, devectorize, isfft, make_config,
                   random_dd_frame, sfft, target_params, vectorize)
from .harness import (ExperimentConfig, SweepRow, inspect_operator,
                      load_experiment, parse_experiment, run_crlb_curve,
                      run_rmse_sweep)

__version__ = "0.1.0"

__all__ = [
    "crlb", "crosstalk", "dirichlet", "estimator", "grid", "harness",
    "DenseCrossTalk", "FactoredCrossTalk", "compose", "direct_crosstalk",
    "factored_crosstalk", "partials",
    "FisherMatrix", "bounds", "fisher", "mean_vector",
    "BandMask", "dirichlet_mag", "lobe_samples", "make_mask", "masks_for",
    "ConfigError", "DomainError", "GuardError", "ShapeError",
    "EstimationResult", "SearchGrid", "default_grid", "likelihood_metric",
    "ml_estimate", "simulate_rx",
    "QAM16", "SPEED_OF_LIGHT", "SensingTarget", "SystemConfig",
    "delay_tap_count", "devectorize", "isfft", "make_config",
    "random_dd_frame", "sfft", "target_params", "vectorize",
    "ExperimentConfig", "SweepRow", "inspect_operator", "load_experiment",
    "parse_experiment", "run_crlb_curve", "run_rmse_sweep",
    "__version__",
]
