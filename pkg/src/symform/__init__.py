"""Symmetric forms on positive-semidefinite matrices."""

__version__ = "0.1.0"
