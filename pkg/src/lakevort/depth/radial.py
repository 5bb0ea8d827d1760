﻿from __future__ import annotations

import numpy as np
from scipy.integrate import quad

from ..models import RadialFunction, RadialGrid
from .profiles import DepthProfile

_SUP_SAMPLES = 20001


def theta_values(p: DepthProfile, r: np.ndarray | float) -> np.ndarray:
    """Θ(r) = d/dr(r d/dr b^(-1/2)) = w' + r w'' with w = b^(-1/2)."""
    r = np.asarray(r, dtype=float)
    b = p.b(r)
    db = p.db(r)
    d2b = p.d2b(r)
    w1 = -0.5 * b**-1.5 * db
    w2 = 0.75 * b**-2.5 * db * db - 0.5 * b**-1.5 * d2b
    return w1 + r * w2


def theta_profile(p: DepthProfile, grid: RadialGrid) -> RadialFunction:
    return RadialFunction(grid, theta_values(p, grid.nodes))


def theta_sup(p: DepthProfile, samples: int = _SUP_SAMPLES) -> float:
    if p.is_constant:
        return 0.0
    r = np.linspace(0.0, p.r_inf, samples)
    return float(np.max(np.abs(theta_values(p, r))))


def q_factor(p: DepthProfile, alpha: float, beta: float, tol: float = 1e-12) -> float:
    """Q(α, β) = α^-2 ∫ τ b(τ) dτ over [min(α, β), max(α, β)]."""
    if not alpha > 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if beta < 0.0:
        raise ValueError(f"beta must be nonnegative, got {beta}")
    lo, hi = min(alpha, beta), max(alpha, beta)
    if lo == hi:
        return 0.0
    points = [p.r_inf] if lo < p.r_inf < hi else None
    value, _ = quad(lambda t: t * p.b_scalar(t), lo, hi, points=points, epsabs=tol, epsrel=tol, limit=200)
    return value / (alpha * alpha)
