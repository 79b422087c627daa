"""Upwind-biased discontinuous Galerkin for linear advection, SIAC filtering,
and superconvergence/dispersion diagnostics."""

__version__ = "0.1.0"
