﻿from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Sequence

import numpy as np

from ..errors import ContourError, NestingError

VALIDITY_SAMPLES = 4096
_BISECTION_STEPS = 60
_NEWTON_STEPS = 2


def bisect_roots(func, left: np.ndarray, right: np.ndarray, steps: int = _BISECTION_STEPS) -> np.ndarray:
    """Vectorized bisection; func(left) and func(right) must differ in sign."""
    left = np.array(left, dtype=float)
    right = np.array(right, dtype=float)
    f_left = func(left)
    for _ in range(steps):
        mid = 0.5 * (left + right)
        f_mid = func(mid)
        same = np.sign(f_mid) == np.sign(f_left)
        left = np.where(same, mid, left)
        f_left = np.where(same, f_mid, f_left)
        right = np.where(same, right, mid)
    return 0.5 * (left + right)


def polish_roots(
    func, slope, roots: np.ndarray, left: np.ndarray, right: np.ndarray, steps: int = _NEWTON_STEPS
) -> np.ndarray:
    """Newton steps on bracketed roots; a step leaving [left, right] is dropped."""
    lo = np.minimum(left, right)
    hi = np.maximum(left, right)
    for _ in range(steps):
        d = slope(roots)
        safe = np.where(d == 0.0, 1.0, d)
        step = np.where(d == 0.0, 0.0, func(roots) / safe)
        trial = roots - step
        roots = np.where((trial >= lo) & (trial <= hi), trial, roots)
    return roots


@dataclass(frozen=True)
class FourierContour:
    """Patch boundary R(θ) = sqrt(a² + 2 r(θ)), r(θ) = Σ_k r_k cos(kmθ) + s_k sin(kmθ)."""

    a: float
    m: int
    coeffs: tuple[float, ...]
    sine_coeffs: tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise ContourError(f"reference radius must be positive, got {self.a}")
        if self.m < 1:
            raise ContourError(f"fold symmetry must be >= 1, got {self.m}")
        coeffs = tuple(float(c) for c in self.coeffs)
        sines = tuple(float(c) for c in self.sine_coeffs)
        if len(sines) > len(coeffs):
            coeffs = coeffs + (0.0,) * (len(sines) - len(coeffs))
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "sine_coeffs", sines)

    @classmethod
    def trivial(cls, a: float, m: int, k_modes: int) -> "FourierContour":
        return cls(a, m, (0.0,) * k_modes)

    @property
    def k_modes(self) -> int:
        return len(self.coeffs)

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.m

    @property
    def is_even(self) -> bool:
        return not any(self.sine_coeffs)

    @cached_property
    def _cos(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=float)

    @cached_property
    def _sin(self) -> np.ndarray:
        out = np.zeros(self.k_modes)
        out[: len(self.sine_coeffs)] = self.sine_coeffs
        return out

    @cached_property
    def _frequencies(self) -> np.ndarray:
        return self.m * np.arange(1, self.k_modes + 1, dtype=float)

    def _series(self, theta: np.ndarray | float, order: int) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if self.k_modes == 0:
            return np.zeros_like(theta)
        phase = theta[..., None] * self._frequencies
        freq = self._frequencies**order
        cos_part, sin_part = np.cos(phase), np.sin(phase)
        # d^order/dθ^order of (c cos + s sin), order in {0, 1, 2}
        if order == 0:
            terms = self._cos * cos_part + self._sin * sin_part
        elif order == 1:
            terms = -self._cos * sin_part + self._sin * cos_part
        else:
            terms = -(self._cos * cos_part + self._sin * sin_part)
        return np.sum(terms * freq, axis=-1)

    def r(self, theta: np.ndarray | float) -> np.ndarray:
        return self._series(theta, 0)

    def dr(self, theta: np.ndarray | float) -> np.ndarray:
        return self._series(theta, 1)

    def d2r(self, theta: np.ndarray | float) -> np.ndarray:
        return self._series(theta, 2)

    def radius(self, theta: np.ndarray | float) -> np.ndarray:
        squared = self.a * self.a + 2.0 * self.r(theta)
        if np.any(squared <= 0.0):
            raise ContourError("a^2 + 2 r(theta) <= 0: boundary is no longer a graph over the angle")
        return np.sqrt(squared)

    def dradius(self, theta: np.ndarray | float) -> np.ndarray:
        return self.dr(theta) / self.radius(theta)

    def is_valid(self, samples: int = VALIDITY_SAMPLES) -> bool:
        theta = np.linspace(0.0, self.period, samples, endpoint=False)
        return bool(np.all(self.a * self.a + 2.0 * self.r(theta) > 0.0))

    def validate(self, samples: int = VALIDITY_SAMPLES) -> "FourierContour":
        if not self.is_valid(samples):
            raise ContourError(f"contour a={self.a}, m={self.m} violates a^2 + 2 r > 0")
        return self

    @cached_property
    def extrema(self) -> np.ndarray:
        """Angles in [0, 2π/m) where r' changes sign."""
        if not np.any(self._cos) and not np.any(self._sin):
            return np.empty(0)
        size = max(64, 32 * self.k_modes)
        step = self.period / size
        mesh = (np.arange(size) + 0.5) * step
        slope = self.dr(mesh)
        change = np.nonzero(np.sign(slope) != np.sign(np.roll(slope, -1)))[0]
        if change.size == 0:
            return np.empty(0)
        roots = bisect_roots(self.dr, mesh[change], mesh[change] + step)
        roots = polish_roots(self.dr, self.d2r, roots, mesh[change], mesh[change] + step)
        return np.sort(np.mod(roots, self.period))

    @cached_property
    def band(self) -> tuple[float, float]:
        """(min R, max R) over the boundary."""
        sample = np.concatenate([self.extrema, np.linspace(0.0, self.period, 64, endpoint=False)])
        radii = self.radius(sample)
        return float(np.min(radii)), float(np.max(radii))

    @cached_property
    def extremum_levels(self) -> np.ndarray:
        """Distinct values of R at the extrema of r, sorted."""
        lo, hi = self.band
        levels = np.concatenate([[lo, hi], self.radius(self.extrema)]) if self.extrema.size else np.array([lo, hi])
        levels = np.sort(np.clip(levels, lo, hi))
        keep = np.concatenate([[True], np.diff(levels) > 1e-14 * hi])
        return levels[keep]

    def rotated(self, shift: float) -> "FourierContour":
        """Same curve with the angle origin moved to θ = shift."""
        phase = self._frequencies * shift
        cos_new = self._cos * np.cos(phase) + self._sin * np.sin(phase)
        sin_new = -self._cos * np.sin(phase) + self._sin * np.cos(phase)
        return FourierContour(self.a, self.m, tuple(cos_new), tuple(sin_new))

    def with_coeffs(self, coeffs: Sequence[float]) -> "FourierContour":
        return replace(self, coeffs=tuple(float(c) for c in coeffs), sine_coeffs=())

    def perturbed(self, k: int, amount: float) -> "FourierContour":
        coeffs = list(self.coeffs) + [0.0] * max(0, k - self.k_modes)
        coeffs[k - 1] += amount
        return replace(self, coeffs=tuple(coeffs))

    def boundary_points(self, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        radius = self.radius(theta)
        return radius * np.cos(theta), radius * np.sin(theta)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"a": self.a, "m": self.m, "coeffs": list(self.coeffs)}
        if self.sine_coeffs:
            data["sine_coeffs"] = list(self.sine_coeffs)
        return data


def check_nesting(outer: FourierContour, inner: FourierContour, samples: int = VALIDITY_SAMPLES) -> None:
    if outer.m != inner.m:
        raise NestingError(f"contours must share m, got {outer.m} and {inner.m}")
    theta = np.linspace(0.0, outer.period, samples, endpoint=False)
    try:
        gap = outer.radius(theta) - inner.radius(theta)
    except ContourError as exc:
        raise NestingError(str(exc)) from exc
    if np.any(gap <= 0.0):
        raise NestingError(f"inner contour leaves the outer one (min gap {np.min(gap):.3e})")
