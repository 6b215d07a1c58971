"""Density evolution and Monte Carlo tools for LDPC decoders built from noisy components."""

from .ensembles import ConfigurationError, EnsembleSpec, TannerGraph, bazzi_family, parse_ensemble, regular, sample_graph
from .gallager_a import NoiseParams, eta_at_threshold, iterate_de, region_to_use_decoder, tau_points, threshold_eta
from .gaussian import GaussParams, gaussian_iterate, gaussian_threshold
from .memory import MemoryParams, capacity_report, memory_region
from .montecarlo import McConfig, mc_experiment, symmetry_test

__version__ = "0.1.0"
