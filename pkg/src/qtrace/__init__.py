"""Logarithmic formal calculus, q-expansions, pseudotraces and modular operators."""

from .scalar import Scalar
from .series import LogSeries, MultiSeries

__version__ = "0.1.0"

__all__ = ["Scalar", "LogSeries", "MultiSeries", "__version__"]
