﻿from .mode_green import ModeGreen, ModeGreenBank, green_lambda, homogeneous_pair
from .mode_solver import solve_mode_n
from .mode_zero import ModeZeroKernel, solve_mode_zero, symmetric_mode_zero

__all__ = [
    "ModeGreen",
    "ModeGreenBank",
    "ModeZeroKernel",
    "green_lambda",
    "homogeneous_pair",
    "solve_mode_n",
    "solve_mode_zero",
    "symmetric_mode_zero",
]
