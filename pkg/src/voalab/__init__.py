"""Exact computations in rank-one lattice vertex algebras."""

__version__ = "0.1.0"
