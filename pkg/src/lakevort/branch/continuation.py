﻿from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..contour import ContourFunctional, FourierContour, check_nesting
from ..errors import ContourError, NewtonConvergenceError
from ..logging_config import get_logger
from ..models import BranchStep, FunctionalValue, VStateBranch
from ..spectral import SpectralCalculator
from .newton import NewtonSettings, damped_newton

logger = get_logger(__name__)

TAIL_TOLERANCE = 1e-3
BRANCH_LABELS = {"plus": "doubly-plus", "minus": "doubly-minus"}


@dataclass(frozen=True)
class _State:
    amplitude: float
    x: np.ndarray


def _extrapolate(history: list[_State], amplitude: float) -> np.ndarray:
    last = history[-1]
    if len(history) < 2:
        return last.x.copy()
    prev = history[-2]
    slope = (last.x - prev.x) / (last.amplitude - prev.amplitude)
    return last.x + slope * (amplitude - last.amplitude)


def _tail_ratio(contours: tuple[FourierContour, ...]) -> float:
    ratios = []
    for contour in contours:
        lead = abs(contour.coeffs[0]) if contour.coeffs else 0.0
        ratios.append(abs(contour.coeffs[-1]) / lead if lead > 0.0 else 0.0)
    return max(ratios, default=0.0)


class BranchContinuation:
    """Amplitude continuation of V-state branches from their bifurcation points."""

    def __init__(
        self,
        functional: ContourFunctional,
        spectral: SpectralCalculator | None = None,
        settings: NewtonSettings | None = None,
    ) -> None:
        self.functional = functional
        self.spectral = spectral or SpectralCalculator(functional.profile, functional.bank)
        self.settings = settings or NewtonSettings()

    # simply connected

    def _simply_contour(self, a: float, m: int, amplitude: float, x: np.ndarray) -> FourierContour:
        return FourierContour(a, m, (amplitude, *x[1:]))

    def continue_simply(self, a: float, m: int, s_max: float, ds: float, k_modes: int = 8) -> VStateBranch:
        if ds <= 0.0:
            raise ValueError("ds must be positive")
        if k_modes < 2:
            raise ValueError("at least two Fourier modes are needed")
        omega0 = self.spectral.omega_simply(a, m)
        theta = self.functional.theta_for(m, k_modes)

        def build(amplitude: float) -> Callable[[np.ndarray], np.ndarray]:
            def residual(x: np.ndarray) -> np.ndarray:
                contour = self._simply_contour(a, m, amplitude, x)
                return self.functional.functional_F(x[0], contour, theta, k_modes).residual_vector()

            return residual

        trivial = FourierContour.trivial(a, m, k_modes)
        first = self.functional.functional_F(omega0, trivial, theta, k_modes)
        start = np.zeros(k_modes)
        start[0] = omega0
        return self._run(
            m=m,
            label="simply",
            omega0=omega0,
            history=[_State(0.0, start)],
            first=BranchStep(0.0, omega0, (trivial,), first.projection_inf(), 0),
            s_max=s_max,
            ds=ds,
            scale=a * a,
            build=build,
            contours=lambda amplitude, x: (self._simply_contour(a, m, amplitude, x),),
        )

    # doubly connected

    @staticmethod
    def _doubly_contours(
        a1: float, a2: float, m: int, k_modes: int, x: np.ndarray
    ) -> tuple[FourierContour, FourierContour]:
        return (
            FourierContour(a1, m, tuple(x[1 : k_modes + 1])),
            FourierContour(a2, m, tuple(x[k_modes + 1 :])),
        )

    def continue_doubly(
        self, a1: float, a2: float, m: int, branch: str, s_max: float, ds: float, k_modes: int = 8
    ) -> VStateBranch:
        if ds <= 0.0:
            raise ValueError("ds must be positive")
        if branch not in BRANCH_LABELS:
            raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}")
        omega0 = self.spectral.omega_doubly(a1, a2, m).select(branch)
        generator = np.asarray(self.spectral.kernel_generator(a1, a2, m, branch), dtype=float)
        direction = generator / np.linalg.norm(generator)
        theta = self.functional.theta_for(m, k_modes)

        def build(amplitude: float) -> Callable[[np.ndarray], np.ndarray]:
            def residual(x: np.ndarray) -> np.ndarray:
                outer, inner = self._doubly_contours(a1, a2, m, k_modes, x)
                value = self.functional.functional_G(x[0], outer, inner, theta, k_modes)
                pin = direction[0] * x[1] + direction[1] * x[k_modes + 1] - amplitude
                return np.concatenate([value.residual_vector(), [pin]])

            return residual

        start = np.zeros(2 * k_modes + 1)
        start[0] = omega0
        trivial = self._doubly_contours(a1, a2, m, k_modes, start)
        first = self.functional.functional_G(omega0, *trivial, theta, k_modes)

        def seed(amplitude: float) -> np.ndarray:
            guess = start.copy()
            guess[1] = amplitude * direction[0]
            guess[k_modes + 1] = amplitude * direction[1]
            return guess

        def contours(amplitude: float, x: np.ndarray) -> tuple[FourierContour, ...]:
            outer, inner = self._doubly_contours(a1, a2, m, k_modes, x)
            check_nesting(outer, inner)
            return outer, inner

        return self._run(
            m=m,
            label=BRANCH_LABELS[branch],
            omega0=omega0,
            history=[_State(0.0, start)],
            first=BranchStep(0.0, omega0, trivial, first.projection_inf(), 0),
            s_max=s_max,
            ds=ds,
            scale=a1 * a1,
            build=build,
            contours=contours,
            seed=seed,
        )

    def _run(
        self,
        *,
        m: int,
        label: str,
        omega0: float,
        history: list[_State],
        first: BranchStep,
        s_max: float,
        ds: float,
        scale: float,
        build: Callable[[float], Callable[[np.ndarray], np.ndarray]],
        contours: Callable[[float, np.ndarray], tuple[FourierContour, ...]],
        seed: Callable[[float], np.ndarray] | None = None,
    ) -> VStateBranch:
        steps = [first]
        truncated = False
        diagnostic: str | None = None
        k_flagged = False
        count = int(math.floor(s_max / ds + 1e-9)) if s_max > 0.0 else 0

        for index in range(1, count + 1):
            amplitude = index * ds
            guess = seed(amplitude) if seed is not None and len(history) < 2 else _extrapolate(history, amplitude)
            fd_step = self.settings.fd_scale * max(scale, abs(guess[0]))
            try:
                result = damped_newton(build(amplitude), guess, fd_step, self.settings)
                shapes = contours(amplitude, result.x)
            except NewtonConvergenceError as exc:
                truncated = True
                diagnostic = f"Newton failed at s={amplitude:.6g} after {exc.iterations} iterations (residual {exc.residual:.3e}): {exc}"
                break
            except ContourError as exc:
                truncated = True
                diagnostic = f"invalid contour at s={amplitude:.6g}: {exc}"
                break

            tail = _tail_ratio(shapes)
            if tail > TAIL_TOLERANCE and not k_flagged:
                k_flagged = True
                logger.warning("%s branch m=%d: spectral tail %.2e at s=%.4g, K looks insufficient", label, m, tail, amplitude)
            steps.append(BranchStep(amplitude, float(result.x[0]), shapes, result.residual_inf, result.iterations, tail))
            history.append(_State(amplitude, result.x))
            logger.info(
                "%s m=%d s=%.4g omega=%.10f residual=%.2e iterations=%d",
                label, m, amplitude, result.x[0], result.residual_inf, result.iterations,
            )

        if truncated:
            logger.warning("%s branch m=%d truncated: %s", label, m, diagnostic)
        return VStateBranch(
            m=m,
            label=label,
            bifurcation_omega=omega0,
            steps=tuple(steps),
            truncated=truncated,
            diagnostic=diagnostic,
            k_flagged=k_flagged,
        )

    def _evaluate(self, step: BranchStep, multiplier: int) -> FunctionalValue:
        contours = step.contours
        m = contours[0].m
        k_modes = max(contour.k_modes for contour in contours)
        theta = self.functional.theta_for(m, k_modes, multiplier)
        if len(contours) == 1:
            return self.functional.functional_F(step.omega, contours[0], theta, k_modes)
        return self.functional.functional_G(step.omega, contours[0], contours[1], theta, k_modes)

    def residual_report(self, step: BranchStep, multiplier: int = 2) -> float:
        """Largest sin/cos(kmθ) projection of F (or G) re-evaluated on a finer angle grid."""
        value = self._evaluate(step, multiplier)
        cosine = max(float(np.max(np.abs(c))) for c in value.cosine)
        return max(value.projection_inf(), cosine)

    def pointwise_residual(self, step: BranchStep, multiplier: int = 2) -> float:
        return self._evaluate(step, multiplier).pointwise_inf()
