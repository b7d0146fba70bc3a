"""Numerical and exact checks for unit-length Killing fields and related isometric flows."""

__version__ = "0.1.0"
