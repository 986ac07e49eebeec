"""Analytic continuation in dimension: measures, loop integrals, propagators,
spectral flow, and fractal cosmology."""

from .core import (
    Dimension,
    DimkitError,
    EvalResult,
    ToleranceConfig,
    as_dimension,
)

__version__ = "0.1.0"

__all__ = [
    "Dimension",
    "DimkitError",
    "EvalResult",
    "ToleranceConfig",
    "as_dimension",
    "__version__",
]
