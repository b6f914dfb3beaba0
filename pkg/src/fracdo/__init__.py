"""Fractional Takagi-Taupin diffraction optics: special functions, Green functions and solvers."""
from ._backend import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
