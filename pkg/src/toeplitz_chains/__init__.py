"""Exact correlations of topological free-fermion chains via Toeplitz determinants."""

from .model import AIII, BDI, ModelSpec, aiii, bdi, parse_model, winding_number

__all__ = ["AIII", "BDI", "ModelSpec", "aiii", "bdi", "parse_model", "winding_number"]
__version__ = "0.1.0"
