"""Exact simulation and transformation of one-tape linear-time machines."""

__version__ = "0.1.0"
