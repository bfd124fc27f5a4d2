"""Optical and spin states of macroscopic quantumness and the measures that grade them."""

from macroq.report import MeasureReport

__version__ = "0.1.0"

__all__ = ["MeasureReport", "__version__"]
