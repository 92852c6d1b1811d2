"""Exact symbolic and numeric checks for the biharmonic-hypersurface ODE system."""

__version__ = "0.1.0"
