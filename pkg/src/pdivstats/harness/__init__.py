"""Experiment runner: seeded surveys, predictions, and table output."""

from ..rng import rng_stream
from .runner import ExperimentSpec, histogram, run, summarize, thread_count
from .tables import ChiSquare, DistTable, Row, chi_square, emit, parse

__all__ = ["ExperimentSpec", "DistTable", "Row", "ChiSquare", "run", "histogram", "summarize",
           "chi_square", "emit", "parse", "rng_stream", "thread_count"]
