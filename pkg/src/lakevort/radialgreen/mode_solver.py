﻿from __future__ import annotations

import numpy as np
from scipy.integrate import cumulative_simpson

from ..models import RadialFunction
from .mode_green import ModeGreen


def _log_scaled_product(log_factor: np.ndarray, integral: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        log_magnitude = np.log(np.abs(integral))
    return np.sign(integral) * np.exp(log_factor + log_magnitude)


def solve_mode_n(mg: ModeGreen, g_n: RadialFunction) -> RadialFunction:
    """ψ_n(α) = [u+(α)∫_{r_min}^α u- g ρ dρ + u-(α)∫_α^{R_out} u+ g ρ dρ] / C.

    Both partial integrals are accumulated against exponentials rescaled by their
    largest value on the source support.
    """
    r = g_n.grid.nodes
    weight = g_n.values * r
    support = weight != 0.0
    if not np.any(support):
        zeros = np.zeros_like(r)
        return RadialFunction(g_n.grid, zeros, zeros.copy(), decay_exponent=mg.n)

    log_minus = mg.log_u_minus(r)
    log_plus = mg.log_u_plus(r)
    ref_minus = float(np.max(log_minus[support]))
    ref_plus = float(np.max(log_plus[support]))

    lower = cumulative_simpson(np.exp(np.minimum(log_minus - ref_minus, 0.0)) * weight, x=r, initial=0.0)
    upper = cumulative_simpson(
        (np.exp(np.minimum(log_plus - ref_plus, 0.0)) * weight)[::-1], x=-r[::-1], initial=0.0
    )[::-1]

    inner = _log_scaled_product(log_plus + ref_minus - mg.log_c, lower)
    outer = _log_scaled_product(log_minus + ref_plus - mg.log_c, upper)
    psi = inner + outer
    dpsi = (mg.phi_plus(r) * inner + mg.phi_minus(r) * outer) / r
    return RadialFunction(g_n.grid, psi, dpsi, decay_exponent=mg.n)
