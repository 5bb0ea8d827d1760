﻿from .profiles import (
    DepthFamily,
    DepthProfile,
    make_bump_profile,
    make_constant_profile,
    make_table_profile,
    profile_from_spec,
)
from .radial import q_factor, theta_profile, theta_sup, theta_values

__all__ = [
    "DepthFamily",
    "DepthProfile",
    "make_bump_profile",
    "make_constant_profile",
    "make_table_profile",
    "profile_from_spec",
    "q_factor",
    "theta_profile",
    "theta_sup",
    "theta_values",
]
