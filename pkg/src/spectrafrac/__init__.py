"""
spectrafrac - fractal dimensions of discrete measures and spectral measures of 1D Schrodinger operators
"""

__version__ = "0.3.0"
__author__ = "spectrafrac developers"
__description__ = "Finite-scale fractal dimension estimates for spectral measures of discrete Schrodinger operators"
