"""Numerical experiments on dot-product sets of paraboloids, fractals and finite fields."""

__version__ = "0.1.0"
