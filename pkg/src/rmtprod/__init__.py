"""Exact spectral formulas and Monte Carlo samplers for products of Gaussian random matrices."""

__version__ = "0.1.0"
