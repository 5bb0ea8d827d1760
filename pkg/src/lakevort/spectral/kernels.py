﻿from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.integrate import quad

from ..depth import DepthProfile, theta_values


def min_ratio(alpha: float, beta: float) -> float:
    if not (alpha > 0.0 and beta > 0.0):
        raise ValueError(f"radii must be positive, got ({alpha}, {beta})")
    return min(alpha / beta, beta / alpha)


def log_distance(x: np.ndarray | float, y: np.ndarray | float) -> np.ndarray:
    """|log x - log y|, so that 𝚖(x, y)^n = exp(-n |log x - log y|)."""
    return np.abs(np.log(x) - np.log(y))


def u_n_closed_form(n: int, alpha: float, beta: float) -> float:
    """∫_0^∞ 𝚖^n(r, α) 𝚖^n(r, β) dr."""
    lo, hi = min(alpha, beta), max(alpha, beta)
    return min_ratio(alpha, beta) ** n * (hi - lo + lo / (2 * n + 1) + hi / (2 * n - 1))


def u_n_integral(
    p: DepthProfile,
    n: int,
    alpha: float,
    beta: float,
    theta: Callable[[float], float] | None = None,
    upper: float | None = None,
    tol: float = 1e-12,
) -> float:
    """U_n(α, β) = ∫ Θ(r) 𝚖^n(r, α) 𝚖^n(r, β) dr.

    ``theta`` replaces the profile's Θ; it then integrates up to ``upper``
    (default +inf) instead of the plateau radius.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if theta is None:
        if p.is_constant:
            return 0.0
        weight = lambda r: float(theta_values(p, r))  # noqa: E731
        stop = p.r_inf if upper is None else upper
    else:
        weight = theta
        stop = np.inf if upper is None else upper

    def integrand(r: float) -> float:
        if r <= 0.0:
            return 0.0
        return weight(r) * min(r / alpha, alpha / r) ** n * min(r / beta, beta / r) ** n

    cuts = sorted({0.0, *(x for x in (alpha, beta) if x < stop)})
    edges = [*cuts, stop]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi > lo:
            value, _ = quad(integrand, lo, hi, epsabs=tol, epsrel=tol, limit=200)
            total += value
    return total
