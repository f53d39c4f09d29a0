"""Numerical lab for 2-dimensional complex Finsler metrics."""

__version__ = "0.1.0"
