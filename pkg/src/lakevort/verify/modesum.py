﻿from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from ..contour import PatchPotential
from ..contour.potential import Patch
from ..models import RadialFunction, StreamSample
from ..radialgreen import ModeGreenBank, solve_mode_n, symmetric_mode_zero

Source = Callable[[np.ndarray, np.ndarray], np.ndarray]

_NEGLIGIBLE = 1e-14


class ModeSumSolution:
    """Whole-plane ψ for a compactly supported source, summed over angular modes.

    ψ(r, θ) = ψ_0(r) + Σ_ℓ ψ_ℓ^c(r) cos ℓθ + ψ_ℓ^s(r) sin ℓθ with every mode
    solved on the bank grid by the radial Green representation.
    """

    def __init__(self, bank: ModeGreenBank, source: Source, l_max: int = 32, n_theta: int = 256) -> None:
        if n_theta <= 2 * l_max:
            raise ValueError("n_theta must exceed 2*l_max")
        self.bank = bank
        grid = bank.grid
        r = grid.nodes
        eta = 2.0 * math.pi * np.arange(n_theta) / n_theta
        samples = np.asarray(source(r[:, None] * np.cos(eta), r[:, None] * np.sin(eta)), dtype=float)
        spectrum = np.fft.rfft(samples, axis=1) / n_theta

        self._zero = symmetric_mode_zero(bank.zero_kernel, RadialFunction(grid, spectrum[:, 0].real))
        scale = max(float(np.max(np.abs(spectrum[:, 0]))), 1.0e-300)
        self._modes: list[tuple[int, RadialFunction, RadialFunction | None]] = []
        for ell in range(1, l_max + 1):
            cos_part = 2.0 * spectrum[:, ell].real
            sin_part = -2.0 * spectrum[:, ell].imag
            has_cos = np.max(np.abs(cos_part)) > _NEGLIGIBLE * scale
            has_sin = np.max(np.abs(sin_part)) > _NEGLIGIBLE * scale
            if not (has_cos or has_sin):
                continue
            green = bank.get(ell)
            psi_cos = solve_mode_n(green, RadialFunction(grid, cos_part)) if has_cos else None
            psi_sin = solve_mode_n(green, RadialFunction(grid, sin_part)) if has_sin else None
            if psi_cos is None:
                psi_cos = RadialFunction(grid, np.zeros(grid.size))
            self._modes.append((ell, psi_cos, psi_sin))

    @property
    def mode_count(self) -> int:
        return len(self._modes)

    def polar(self, radius: np.ndarray, theta: np.ndarray) -> StreamSample:
        radius = np.maximum(np.asarray(radius, dtype=float), self.bank.grid.r_min)
        theta = np.asarray(theta, dtype=float)
        psi = self._zero(radius)
        dpsi_dr = self._zero.derivative(radius)
        dpsi_dtheta = np.zeros_like(psi)
        for ell, psi_cos, psi_sin in self._modes:
            cos_t, sin_t = np.cos(ell * theta), np.sin(ell * theta)
            psi = psi + psi_cos(radius) * cos_t
            dpsi_dr = dpsi_dr + psi_cos.derivative(radius) * cos_t
            dpsi_dtheta = dpsi_dtheta - ell * psi_cos(radius) * sin_t
            if psi_sin is not None:
                psi = psi + psi_sin(radius) * sin_t
                dpsi_dr = dpsi_dr + psi_sin.derivative(radius) * sin_t
                dpsi_dtheta = dpsi_dtheta + ell * psi_sin(radius) * cos_t
        return StreamSample(psi=psi, dpsi_dr=dpsi_dr, dpsi_dtheta=dpsi_dtheta)

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.polar(np.hypot(x, y), np.arctan2(y, x)).psi


class PatchSolution:
    """ψ of signed patch sources b·1_D through the band-quadrature potential."""

    def __init__(self, potential: PatchPotential, patches: Sequence[Patch]) -> None:
        self.potential = potential
        self.patches = tuple(patches)

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        radius = np.maximum(np.hypot(x, y), self.potential.bank.grid.r_min)
        sample = self.potential.evaluate_patches(self.patches, radius.ravel(), np.arctan2(y, x).ravel())
        return sample.psi.reshape(x.shape)

    def source(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        radius = np.hypot(x, y)
        theta = np.arctan2(y, x)
        total = np.zeros_like(radius)
        for contour, sign in self.patches:
            total += sign * (radius < contour.radius(theta))
        return total * self.potential.profile.b(radius)
