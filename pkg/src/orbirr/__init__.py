"""Exact orbifold Riemann-Roch via the chartwise Kawasaki fixed-point formula."""

__version__ = "0.1.0"
