﻿from .calculator import (
    SpectralCalculator,
    find_threshold_N,
    kernel_generator,
    lambda_n,
    matrix_Mn,
    omega_doubly,
    omega_simply,
    threshold_M,
)
from .fixed_point import fn_bound, fn_fixed_point
from .kernels import log_distance, min_ratio, u_n_closed_form, u_n_integral

__all__ = [
    "SpectralCalculator",
    "find_threshold_N",
    "fn_bound",
    "fn_fixed_point",
    "kernel_generator",
    "lambda_n",
    "log_distance",
    "matrix_Mn",
    "min_ratio",
    "omega_doubly",
    "omega_simply",
    "threshold_M",
    "u_n_closed_form",
    "u_n_integral",
]
