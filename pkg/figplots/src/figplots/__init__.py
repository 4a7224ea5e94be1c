"""Plotting companion for anisokrr result CSVs."""

from .plots import plot_risk, plot_spectrum
from .reader import ResultTable, SchemaError, read_table

__version__ = "0.1.0"

__all__ = ["ResultTable", "SchemaError", "read_table", "plot_spectrum",
           "plot_risk", "__version__"]
