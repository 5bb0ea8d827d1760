﻿from __future__ import annotations

import math

import numpy as np

from ..depth.profiles import DepthProfile
from ..logging_config import get_logger
from ..models import BoundaryStream, FunctionalValue, RadialGrid
from ..radialgreen import ModeGreenBank
from .arcs import PatchModes, patch_modes
from .fourier import FourierContour, check_nesting
from .potential import Patch, PatchPotential

logger = get_logger(__name__)

DEFAULT_THETA_N = 256
DEFAULT_L_MAX_FACTOR = 8


def theta_grid(size: int) -> np.ndarray:
    return 2.0 * math.pi * np.arange(size) / size


def _fold_block(theta: np.ndarray, m: int) -> int:
    """Length of the leading block that tiles theta by 2π/m shifts, or 0."""
    size = theta.size
    if m == 1 or size % m:
        return 0
    if not np.allclose(theta, theta_grid(size), rtol=0.0, atol=1e-13):
        return 0
    return size // m


def project(values: np.ndarray, m: int, k_modes: int) -> tuple[np.ndarray, np.ndarray, float]:
    """sin/cos(kmθ) coefficients (k = 1..K) and mean of samples on a uniform grid."""
    size = values.size
    if size <= 2 * k_modes * m:
        raise ValueError(f"{size} angle samples cannot resolve mode {k_modes * m}")
    spectrum = np.fft.rfft(values)
    index = m * np.arange(1, k_modes + 1)
    return -2.0 * spectrum[index].imag / size, 2.0 * spectrum[index].real / size, float(spectrum[0].real / size)


class ContourFunctional:
    """Evaluates F(Ω, r) and G(Ω, r1, r2) on truncated Fourier contours."""

    def __init__(
        self,
        profile: DepthProfile,
        bank: ModeGreenBank | None = None,
        theta_n: int = DEFAULT_THETA_N,
        l_max_factor: int = DEFAULT_L_MAX_FACTOR,
        band_nodes: int = 0,
        n_r: int = 2048,
        r_out: float | None = None,
    ) -> None:
        self.profile = profile
        self.bank = bank or ModeGreenBank.for_profile(profile, r_out=r_out, n_r=n_r)
        self.theta_n = theta_n
        self.l_max_factor = l_max_factor
        self.band_nodes = band_nodes
        self._potentials: dict[int, PatchPotential] = {}

    def potential(self, m: int) -> PatchPotential:
        if m not in self._potentials:
            self._potentials[m] = PatchPotential(self.bank, self.l_max_factor * m, self.band_nodes)
        return self._potentials[m]

    def theta_for(self, m: int, k_modes: int, multiplier: int = 1) -> np.ndarray:
        size = max(self.theta_n * multiplier, 4 * k_modes * m + 4)
        size = m * math.ceil(size / m)
        return theta_grid(size)

    def patch_modes(
        self, outer: FourierContour, inner: FourierContour | None = None, grid: RadialGrid | None = None
    ) -> PatchModes:
        return patch_modes(self.profile, outer, inner, grid or self.bank.grid, self.l_max_factor * outer.m)

    def stream_on_boundary(
        self, patches: tuple[Patch, ...], contour: FourierContour, theta: np.ndarray
    ) -> BoundaryStream:
        """ψ(R(θ), θ) and d/dθ of it along the contour, for the signed patch sources."""
        theta = np.asarray(theta, dtype=float)
        block = _fold_block(theta, contour.m)
        head = theta[:block] if block else theta
        radius = contour.radius(head)
        sample = self.potential(contour.m).evaluate_patches(patches, radius, head)
        total = sample.dpsi_dr * contour.dradius(head) + sample.dpsi_dtheta
        psi = sample.psi
        if block:
            psi = np.tile(psi, contour.m)
            total = np.tile(total, contour.m)
        return BoundaryStream(theta=theta, psi=psi, dpsi_dtheta=total)

    def stream_for_modes(self, modes: PatchModes, contour: FourierContour, theta: np.ndarray) -> BoundaryStream:
        patches: list[Patch] = [(modes.outer, 1.0)]
        if modes.inner is not None:
            patches.append((modes.inner, -1.0))
        return self.stream_on_boundary(tuple(patches), contour, theta)

    def _component(
        self, omega: float, patches: tuple[Patch, ...], contour: FourierContour, theta: np.ndarray
    ) -> np.ndarray:
        stream = self.stream_on_boundary(patches, contour, theta)
        return omega * contour.dr(theta) + stream.dpsi_dtheta / self.profile.b(contour.radius(theta))

    def functional_F(
        self, omega: float, contour: FourierContour, theta: np.ndarray | None = None, k_modes: int | None = None
    ) -> FunctionalValue:
        contour.validate()
        k = k_modes or max(contour.k_modes, 1)
        theta = self.theta_for(contour.m, k) if theta is None else np.asarray(theta, dtype=float)
        values = self._component(omega, ((contour, 1.0),), contour, theta)
        sine, cosine, mean = project(values, contour.m, k)
        return FunctionalValue(theta=theta, values=(values,), sine=(sine,), cosine=(cosine,), mean=(mean,))

    def functional_G(
        self,
        omega: float,
        outer: FourierContour,
        inner: FourierContour,
        theta: np.ndarray | None = None,
        k_modes: int | None = None,
    ) -> FunctionalValue:
        outer.validate()
        inner.validate()
        check_nesting(outer, inner)
        k = k_modes or max(outer.k_modes, inner.k_modes, 1)
        theta = self.theta_for(outer.m, k) if theta is None else np.asarray(theta, dtype=float)
        patches: tuple[Patch, ...] = ((outer, 1.0), (inner, -1.0))
        values = tuple(self._component(omega, patches, contour, theta) for contour in (outer, inner))
        projections = [project(v, outer.m, k) for v in values]
        return FunctionalValue(
            theta=theta,
            values=values,
            sine=tuple(p[0] for p in projections),
            cosine=tuple(p[1] for p in projections),
            mean=tuple(p[2] for p in projections),
        )
