"""Batch figure generation from divestsim CSV outputs.

Pure consumers: the scripts render the emitted numbers and never recompute
model quantities.  Inputs are validated against the simulator's CSV schemas
and any drift fails loudly.
"""

__version__ = "0.1.0"

from .figures import plot_sweep1d, plot_sweep2d, plot_trajectory
from .schemas import SchemaError, read_run_csv, read_sweep_csv

__all__ = [
    "SchemaError",
    "plot_sweep1d",
    "plot_sweep2d",
    "plot_trajectory",
    "read_run_csv",
    "read_sweep_csv",
]
