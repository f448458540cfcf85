"""Embedded ensemble propagation for sampling-based uncertainty quantification."""

__version__ = "0.1.0"
