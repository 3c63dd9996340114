"""Lattices, parabolic groups, periods and theta characters of the 8D F-theory/heterotic duality."""

__all__ = ["__version__"]

__version__ = "0.1.0"
