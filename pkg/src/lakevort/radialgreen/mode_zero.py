﻿from __future__ import annotations

import numpy as np
from scipy.integrate import cumulative_simpson, simpson
from scipy.interpolate import CubicHermiteSpline

from ..depth import DepthProfile
from ..models import RadialFunction, RadialGrid


def solve_mode_zero(p: DepthProfile, f0: RadialFunction) -> RadialFunction:
    """ψ(r) = -∫_0^r (b(s)/s) ∫_0^s τ f0(τ) dτ ds, normalized by ψ(0) = 0."""
    r = f0.grid.nodes
    f = f0.values
    r0 = r[0]
    b = p.b(r)

    enclosed = f[0] * r0 * r0 / 2.0 + cumulative_simpson(r * f, x=r, initial=0.0)
    dpsi = -b * enclosed / r
    psi = -b[0] * f[0] * r0 * r0 / 4.0 + cumulative_simpson(dpsi, x=r, initial=0.0)
    return RadialFunction(f0.grid, psi, dpsi, decay_exponent=0)


class ModeZeroKernel:
    """Symmetric mode-0 Green function G0(α, ρ) = -B(max(α, ρ)).

    B(x) = b_inf log x + ∫_x^{R∞} (b_inf - b(s))/s ds, so B' = b/x and
    B = b_inf log x on the plateau. M(x) = ∫_0^x b ρ dρ and N(x) = ∫_0^x B b ρ dρ
    give the potential of b·1_{ρ<x} in closed form.
    """

    def __init__(self, profile: DepthProfile, grid: RadialGrid) -> None:
        self.profile = profile
        self.grid = grid
        s = grid.log_nodes
        r = grid.nodes
        b = profile.b(r)

        if profile.is_constant:
            big_b = profile.b_inf * s
            big_m = profile.b_inf * r * r / 2.0
            big_n = profile.b_inf**2 * r * r * (s / 2.0 - 0.25)
        else:
            deficit = cumulative_simpson(profile.b_inf - b, x=s, initial=0.0)
            big_b = profile.b_inf * s + (deficit[-1] - deficit)
            big_m = b[0] * r[0] ** 2 / 2.0 + cumulative_simpson(b * r * r, x=s, initial=0.0)
            start = b[0] * r[0] ** 2 / 2.0 * (big_b[0] - b[0] / 2.0)
            big_n = start + cumulative_simpson(big_b * b * r * r, x=s, initial=0.0)

        self._big_b = CubicHermiteSpline(s, big_b, b)
        self._big_m = CubicHermiteSpline(s, big_m, b * r * r)
        self._big_n = CubicHermiteSpline(s, big_n, big_b * b * r * r)

    def big_b(self, r: np.ndarray | float) -> np.ndarray:
        return self._big_b(np.log(self.grid.require(r)))

    def big_m(self, r: np.ndarray | float) -> np.ndarray:
        return self._big_m(np.log(self.grid.require(r)))

    def big_n(self, r: np.ndarray | float) -> np.ndarray:
        return self._big_n(np.log(self.grid.require(r)))

    def green(self, alpha: np.ndarray | float, rho: np.ndarray | float) -> np.ndarray:
        return -self.big_b(np.maximum(alpha, rho))

    def disc_potential(self, alpha: np.ndarray, radius: float) -> tuple[np.ndarray, np.ndarray]:
        """ψ and ∂_αψ of the source b·1_{ρ < radius}."""
        alpha = np.asarray(alpha, dtype=float)
        inner = np.minimum(alpha, radius)
        enclosed = self.big_m(inner)
        psi = -self.big_b(alpha) * enclosed
        below = alpha < radius
        if np.any(below):
            psi = psi - np.where(below, self.big_n(radius) - self.big_n(inner), 0.0)
        dpsi = -self.profile.b(alpha) / alpha * enclosed
        return psi, dpsi

    def far_field_offset(self, f0: RadialFunction) -> float:
        """∫ B g0 ρ dρ, the shift from ψ(0) = 0 to the symmetric normalization."""
        r = f0.grid.nodes
        return float(simpson(self.big_b(r) * f0.values * r, x=r))


def symmetric_mode_zero(kernel: ModeZeroKernel, f0: RadialFunction) -> RadialFunction:
    """Mode-0 potential ∫ G0(α, ρ) f0(ρ) ρ dρ."""
    origin = solve_mode_zero(kernel.profile, f0)
    offset = kernel.far_field_offset(f0)
    return RadialFunction(f0.grid, origin.values - offset, origin.derivatives, decay_exponent=0)
