﻿from .arcs import ArcMoments, PatchModes, arc_moments, patch_modes, source_amplitudes
from .fourier import FourierContour, check_nesting
from .functional import ContourFunctional, project, theta_grid
from .multiplier import fd_jacobian_doubly, kernel_alignment, multiplier_check
from .potential import ModeStream, PatchPotential

__all__ = [
    "ArcMoments",
    "ContourFunctional",
    "FourierContour",
    "ModeStream",
    "PatchModes",
    "PatchPotential",
    "arc_moments",
    "check_nesting",
    "fd_jacobian_doubly",
    "kernel_alignment",
    "multiplier_check",
    "patch_modes",
    "project",
    "source_amplitudes",
    "theta_grid",
]
