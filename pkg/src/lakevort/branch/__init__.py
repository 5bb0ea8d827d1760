﻿from .continuation import BRANCH_LABELS, TAIL_TOLERANCE, BranchContinuation
from .newton import NewtonResult, NewtonSettings, damped_newton, fd_jacobian

__all__ = [
    "BRANCH_LABELS",
    "BranchContinuation",
    "NewtonResult",
    "NewtonSettings",
    "TAIL_TOLERANCE",
    "damped_newton",
    "fd_jacobian",
]
