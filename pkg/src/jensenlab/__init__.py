"""Numerical laboratory for bounds on sums of negative Schrodinger eigenvalues."""

__version__ = "0.1.0"
