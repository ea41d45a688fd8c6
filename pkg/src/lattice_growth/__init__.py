"""Exact and certified computations for the growth of discrete harmonic polynomials."""

__version__ = "0.1.0"
