﻿from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..depth.profiles import DepthProfile
from ..errors import ContourError
from ..logging_config import get_logger
from ..models import RadialFunction, RadialGrid
from .fourier import FourierContour, bisect_roots, check_nesting, polish_roots

logger = get_logger(__name__)

_CHUNK = 1024
_ROOT_STEPS = 52


@dataclass(frozen=True)
class ArcMoments:
    """Full-circle integrals of 1, cos(ℓη), sin(ℓη) over {η : R(η) > ρ}."""

    ells: np.ndarray
    length: np.ndarray
    cosine: np.ndarray
    sine: np.ndarray


def _crossing_mesh(contour: FourierContour, span: float) -> np.ndarray:
    copies = int(round(span / contour.period))
    size = max(64, 16 * contour.k_modes) * copies
    mesh = (np.arange(size) + 0.5) * (span / size)
    extrema = (contour.extrema[None, :] + contour.period * np.arange(copies)[:, None]).ravel()
    return np.unique(np.concatenate([mesh, extrema]))


def arc_moments(contour: FourierContour, rho: np.ndarray, ells: Sequence[int]) -> ArcMoments:
    """Exact arc integrals from the crossings of R(η) = ρ.

    Entering an arc (R rising through ρ) contributes -sin(ℓη)/ℓ to the cosine moment and
    cos(ℓη)/ℓ to the sine moment, leaving contributes the opposite.
    """
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    ells_arr = np.asarray(list(ells), dtype=int)
    positive = ells_arr[ells_arr > 0]
    span = contour.period if np.all(positive % contour.m == 0) else 2.0 * math.pi
    copies = 2.0 * math.pi / span

    mesh = _crossing_mesh(contour, span)
    r_mesh = contour.r(mesh)
    inside_origin = contour.r(0.0)
    max_crossings = 2 * contour.k_modes * int(round(span / contour.period))

    length = np.zeros(rho.size)
    cosine = np.zeros((ells_arr.size, rho.size))
    sine = np.zeros((ells_arr.size, rho.size))
    ell_safe = np.where(ells_arr == 0, 1, ells_arr).astype(float)

    for start in range(0, rho.size, _CHUNK):
        block = slice(start, min(start + _CHUNK, rho.size))
        level = 0.5 * (rho[block] ** 2 - contour.a**2)
        inside = r_mesh[None, :] > level[:, None]
        nxt = np.roll(inside, -1, axis=1)
        rows, cells = np.nonzero(inside != nxt)
        counts = np.bincount(rows, minlength=level.size)
        if counts.size and counts.max() > max(max_crossings, 2):
            raise ContourError(
                f"{counts.max()} crossings at one radius exceed 2K = {max_crossings}: contour is not a graph"
            )
        left = mesh[cells]
        right = np.where(cells + 1 < mesh.size, mesh[(cells + 1) % mesh.size], mesh[0] + span)
        target = level[rows]
        roots = bisect_roots(lambda eta: contour.r(eta) - target, left, right, _ROOT_STEPS)
        roots = polish_roots(lambda eta: contour.r(eta) - target, contour.dr, roots, left, right)
        roots = np.mod(roots, span)
        sign = np.where(nxt[rows, cells], 1.0, -1.0)

        base = np.full(level.size, span) * (inside_origin > level)
        length[block] = copies * (base - np.bincount(rows, weights=sign * roots, minlength=level.size))
        phase = ells_arr[:, None] * roots[None, :]
        cos_terms = -sign * np.sin(phase) / ell_safe[:, None]
        sin_terms = sign * np.cos(phase) / ell_safe[:, None]
        for idx, ell in enumerate(ells_arr):
            if ell == 0:
                cosine[idx, block] = length[block]
                continue
            cosine[idx, block] = copies * np.bincount(rows, weights=cos_terms[idx], minlength=level.size)
            sine[idx, block] = copies * np.bincount(rows, weights=sin_terms[idx], minlength=level.size)

    return ArcMoments(ells=ells_arr, length=length, cosine=cosine, sine=sine)


def source_amplitudes(
    profile: DepthProfile, contour: FourierContour, rho: np.ndarray, ells: Sequence[int]
) -> tuple[np.ndarray, np.ndarray]:
    """Cosine and sine amplitudes of b·1_D at the radii rho, rows indexed like ells."""
    moments = arc_moments(contour, rho, ells)
    factor = np.where(moments.ells == 0, 1.0 / (2.0 * math.pi), 1.0 / math.pi)[:, None]
    weight = profile.b(np.asarray(rho, dtype=float))[None, :] * factor
    return weight * moments.cosine, weight * moments.sine


@dataclass(frozen=True)
class PatchModes:
    """Angular decomposition f(ρ,η) = g₀(ρ) + Σ_ℓ g_ℓ(ρ)cos(ℓη) + h_ℓ(ρ)sin(ℓη) of a patch source."""

    outer: FourierContour
    inner: FourierContour | None
    grid: RadialGrid
    ells: tuple[int, ...]
    cosine: np.ndarray
    sine: np.ndarray

    @property
    def l_max(self) -> int:
        return self.ells[-1]

    def amplitude(self, ell: int, part: str = "cos") -> RadialFunction:
        if ell not in self.ells:
            return RadialFunction(self.grid, np.zeros(self.grid.size))
        table = self.cosine if part == "cos" else self.sine
        return RadialFunction(self.grid, table[self.ells.index(ell)])

    def tail_ratio(self) -> float:
        if len(self.ells) < 3:
            return 0.0
        lead = float(np.max(np.abs(self.cosine[1])))
        tail = float(np.max(np.abs(self.cosine[-1])))
        return tail / lead if lead > 0.0 else 0.0

    def to_dict(self) -> dict[str, object]:
        return {
            "outer": self.outer.to_dict(),
            "inner": self.inner.to_dict() if self.inner is not None else None,
            "radii": self.grid.nodes.tolist(),
            "ells": list(self.ells),
            "cosine": self.cosine.tolist(),
            "sine": self.sine.tolist(),
        }


def patch_modes(
    profile: DepthProfile,
    outer: FourierContour,
    inner: FourierContour | None,
    grid: RadialGrid,
    l_max: int,
) -> PatchModes:
    if inner is not None:
        check_nesting(outer, inner)
    ells = tuple(range(0, l_max + 1, outer.m))
    cosine, sine = source_amplitudes(profile, outer, grid.nodes, ells)
    if inner is not None:
        inner_cos, inner_sin = source_amplitudes(profile, inner, grid.nodes, ells)
        cosine = cosine - inner_cos
        sine = sine - inner_sin
    modes = PatchModes(outer=outer, inner=inner, grid=grid, ells=ells, cosine=cosine, sine=sine)
    logger.debug("patch modes m=%d L=%d tail ratio %.3e", outer.m, l_max, modes.tail_ratio())
    return modes
