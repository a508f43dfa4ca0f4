"""Finite relative and simplicial categories with a verification harness."""

__version__ = "0.1.0"
