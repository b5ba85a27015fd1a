"""Radial harmonic analysis and Schrödinger propagators on Damek-Ricci spaces and R^n."""

__version__ = "0.1.0"
