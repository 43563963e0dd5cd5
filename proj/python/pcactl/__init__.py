"""Phase-shaped pulse search and principal control analysis."""

from ._core import (
    ConfigError,
    Error,
    ParseError,
    cli,
    covariance,
    deltas,
    eigendecompose,
    fitness,
    intensity,
    intensity_spectrum,
    load_run,
    run_search,
    synthesize,
    wigner,
)

__all__ = [
    "ConfigError",
    "Error",
    "ParseError",
    "cli",
    "covariance",
    "deltas",
    "eigendecompose",
    "fitness",
    "intensity",
    "intensity_spectrum",
    "load_run",
    "run_search",
    "synthesize",
    "wigner",
]
