"""Functional combined PCA and CCA for curves with amplitude and phase variation."""

__version__ = "0.1.0"
