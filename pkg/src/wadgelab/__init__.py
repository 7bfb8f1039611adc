"""Exact workbench for continuous reductions between subsets of the real line."""

__version__ = "0.1.0"
