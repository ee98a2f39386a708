"""Exact checks for vertex-algebra actions on filtered function spaces."""

__version__ = "0.1.0"
