﻿"""Vortex-patch V-states of the lake equation: radial Green functions, spectra and branches."""

__version__ = "0.1.0"

__all__ = [
    "branch",
    "config",
    "contour",
    "depth",
    "radialgreen",
    "spectral",
    "verify",
]
