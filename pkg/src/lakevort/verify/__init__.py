﻿from .fd2d import Grid2D, fd_solve_2d, observed_order
from .modesum import ModeSumSolution, PatchSolution
from .oracles import bump_source, decomposition_check, log_identity_check, self_adjointness_check
from .rotation import rigid_rotation_check, step_patches
from .suite import VerificationSuite

__all__ = [
    "Grid2D",
    "ModeSumSolution",
    "PatchSolution",
    "VerificationSuite",
    "bump_source",
    "decomposition_check",
    "fd_solve_2d",
    "log_identity_check",
    "observed_order",
    "rigid_rotation_check",
    "self_adjointness_check",
    "step_patches",
]
