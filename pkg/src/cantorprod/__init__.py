"""Thickness, sums and products of Cantor sets in exact arithmetic."""

__version__ = "0.1.0"
