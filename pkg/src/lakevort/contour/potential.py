﻿from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from ..depth.profiles import DepthProfile
from ..models import StreamSample
from ..radialgreen import ModeGreenBank
from .arcs import arc_moments
from .fourier import FourierContour

Patch = tuple[FourierContour, float]

_EVAL_CHUNK = 256


@lru_cache(maxsize=16)
def _gauss(count: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(count)


def _band_rule(levels: np.ndarray, alpha: np.ndarray, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on every level segment, per evaluation radius.

    Each segment [L, L + w] is mapped by ρ = L + w(1 - cos t)/2 and the t-interval
    is cut at the image of α, so the kernel kink sits on a panel edge.
    """
    x, gw = _gauss(count)
    start = levels[None, :-1, None]
    width = np.diff(levels)[None, :, None]
    frac = np.clip((alpha[:, None, None] - start) / width, 0.0, 1.0)
    cut = np.arccos(1.0 - 2.0 * frac)
    unit = 0.5 * (x + 1.0)
    t = np.concatenate([cut * unit, cut + (math.pi - cut) * unit], axis=2)
    dt = np.concatenate([0.5 * cut * gw, 0.5 * (math.pi - cut) * gw], axis=2)
    rho = start + 0.5 * width * (1.0 - np.cos(t))
    weight = 0.5 * width * np.sin(t) * dt
    return rho.reshape(alpha.size, -1), weight.reshape(alpha.size, -1)


@dataclass(frozen=True, eq=False)
class ModeStream:
    """Mode amplitudes of ψ and ∂_αψ at radii alpha, rows indexed like ells."""

    ells: tuple[int, ...]
    psi_cos: np.ndarray
    dpsi_cos: np.ndarray
    psi_sin: np.ndarray
    dpsi_sin: np.ndarray

    def synthesize(self, theta: np.ndarray) -> StreamSample:
        ells = np.asarray(self.ells, dtype=float)[:, None]
        phase = ells * np.asarray(theta, dtype=float)[None, :]
        cos_p, sin_p = np.cos(phase), np.sin(phase)
        psi = np.sum(self.psi_cos * cos_p + self.psi_sin * sin_p, axis=0)
        dpsi_dr = np.sum(self.dpsi_cos * cos_p + self.dpsi_sin * sin_p, axis=0)
        dpsi_dtheta = np.sum(ells * (self.psi_sin * cos_p - self.psi_cos * sin_p), axis=0)
        return StreamSample(psi=psi, dpsi_dr=dpsi_dr, dpsi_dtheta=dpsi_dtheta)


class PatchPotential:
    """Stream function of b·1_D for a Fourier patch D, truncated at angular mode l_max.

    The disc ρ < min R is handled by the closed-form mode-0 kernel; the band
    min R ≤ ρ ≤ max R by Gauss-Legendre segments between consecutive extremum
    levels of R, cut at the evaluation radius, with exact arc moments at each node.
    """

    def __init__(self, bank: ModeGreenBank, l_max: int, band_nodes: int = 0) -> None:
        if l_max < 0:
            raise ValueError("l_max must be non-negative")
        self.bank = bank
        self.l_max = l_max
        self.band_nodes = band_nodes

    @property
    def profile(self) -> DepthProfile:
        return self.bank.profile

    def ells(self, m: int) -> tuple[int, ...]:
        return tuple(range(0, self.l_max + 1, m))

    def _node_count(self, m: int) -> int:
        return self.band_nodes or 32 + 2 * (self.l_max // m)

    def mode_stream(self, contour: FourierContour, alpha: np.ndarray) -> ModeStream:
        alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
        ells = self.ells(contour.m)
        n_ell = len(ells)
        lo, hi = contour.band
        kernel = self.bank.zero_kernel
        b_alpha = self.profile.b(alpha)

        psi_cos = np.zeros((n_ell, alpha.size))
        dpsi_cos = np.zeros_like(psi_cos)
        psi_sin = np.zeros_like(psi_cos)
        dpsi_sin = np.zeros_like(psi_cos)
        psi_cos[0], dpsi_cos[0] = kernel.disc_potential(alpha, lo)

        levels = contour.extremum_levels
        if hi - lo <= 1e-14 * hi or levels.size < 2:
            return ModeStream(ells, psi_cos, dpsi_cos, psi_sin, dpsi_sin)

        rho, weight = _band_rule(levels, alpha, self._node_count(contour.m))

        moments = arc_moments(contour, rho.ravel(), ells)
        shape = (n_ell,) + rho.shape
        b_rho = self.profile.b(rho)
        factor = np.where(np.asarray(ells) == 0, 1.0 / (2.0 * math.pi), 1.0 / math.pi)[:, None, None]
        g_cos = factor * b_rho * moments.cosine.reshape(shape)
        g_sin = factor * b_rho * moments.sine.reshape(shape)

        below = rho < alpha[:, None]
        wr = weight * rho
        outer = kernel.big_b(np.maximum(alpha[:, None], rho))
        psi_cos[0] -= np.sum(wr * g_cos[0] * outer, axis=1)
        dpsi_cos[0] -= b_alpha / alpha * np.sum(np.where(below, wr * g_cos[0], 0.0), axis=1)

        for idx in range(1, n_ell):
            green = self.bank.get(ells[idx])
            kern = wr * green.lambda_value(alpha[:, None], rho)
            slope_in = green.phi_plus(alpha) / alpha
            slope_out = green.phi_minus(alpha) / alpha
            for table, psi, dpsi in ((g_cos, psi_cos, dpsi_cos), (g_sin, psi_sin, dpsi_sin)):
                if not np.any(table[idx]):
                    continue
                terms = kern * table[idx]
                psi[idx] = np.sum(terms, axis=1)
                dpsi[idx] = slope_in * np.sum(np.where(below, terms, 0.0), axis=1) + slope_out * np.sum(
                    np.where(below, 0.0, terms), axis=1
                )
        return ModeStream(ells, psi_cos, dpsi_cos, psi_sin, dpsi_sin)

    def evaluate(self, contour: FourierContour, alpha: np.ndarray, theta: np.ndarray) -> StreamSample:
        """ψ, ∂_rψ, ∂_θψ at the polar points (alpha[j], theta[j])."""
        return self.evaluate_patches(((contour, 1.0),), alpha, theta)

    def evaluate_patches(self, patches: Sequence[Patch], alpha: np.ndarray, theta: np.ndarray) -> StreamSample:
        alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        psi = np.zeros(alpha.size)
        dpsi_dr = np.zeros(alpha.size)
        dpsi_dtheta = np.zeros(alpha.size)
        for contour, sign in patches:
            for start in range(0, alpha.size, _EVAL_CHUNK):
                part = slice(start, start + _EVAL_CHUNK)
                sample = self.mode_stream(contour, alpha[part]).synthesize(theta[part])
                psi[part] += sign * sample.psi
                dpsi_dr[part] += sign * sample.dpsi_dr
                dpsi_dtheta[part] += sign * sample.dpsi_dtheta
        return StreamSample(psi=psi, dpsi_dr=dpsi_dr, dpsi_dtheta=dpsi_dtheta)

    def velocity(self, patches: Sequence[Patch], x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Cartesian velocity (1/b)∇^⊥ψ: radial ψ_θ/(r b), azimuthal -ψ_r/b."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        radius = np.hypot(x, y)
        theta = np.arctan2(y, x)
        sample = self.evaluate_patches(patches, radius, theta)
        b = self.profile.b(radius)
        v_r = sample.dpsi_dtheta / (radius * b)
        v_t = -sample.dpsi_dr / b
        cos_t, sin_t = np.cos(theta), np.sin(theta)
        return v_r * cos_t - v_t * sin_t, v_r * sin_t + v_t * cos_t
