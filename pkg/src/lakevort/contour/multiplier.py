﻿from __future__ import annotations

from typing import Sequence

import numpy as np

from ..logging_config import get_logger
from ..models import MultiplierRow
from ..spectral import SpectralCalculator
from .fourier import FourierContour
from .functional import ContourFunctional

logger = get_logger(__name__)


def _relative(error: float, analytic: float, scale: float) -> float:
    return error / max(abs(analytic), scale)


def _row(n: int, component: str, analytic: float, fd: float, scale: float) -> MultiplierRow:
    error = abs(fd - analytic)
    return MultiplierRow(n, component, analytic, fd, error, _relative(error, analytic, scale))


def _fd_simply(functional: ContourFunctional, a: float, omega: float, m: int, n: int, eps: float) -> float:
    base = FourierContour.trivial(a, m, n)
    theta = functional.theta_for(m, n)
    plus = functional.functional_F(omega, base.perturbed(n, eps), theta, k_modes=n)
    minus = functional.functional_F(omega, base.perturbed(n, -eps), theta, k_modes=n)
    return float((plus.sine[0][n - 1] - minus.sine[0][n - 1]) / (2.0 * eps))


def fd_jacobian_doubly(
    functional: ContourFunctional, a1: float, a2: float, omega: float, m: int, n: int, eps: float
) -> np.ndarray:
    """2x2 central-difference derivative of the sin(nmθ) projections of G in the cos(nmθ) directions."""
    outer = FourierContour.trivial(a1, m, n)
    inner = FourierContour.trivial(a2, m, n)
    theta = functional.theta_for(m, n)
    jac = np.zeros((2, 2))
    for col in range(2):
        values = []
        for sign in (1.0, -1.0):
            pair = [outer, inner]
            pair[col] = pair[col].perturbed(n, sign * eps)
            g = functional.functional_G(omega, pair[0], pair[1], theta, k_modes=n)
            values.append(np.array([g.sine[0][n - 1], g.sine[1][n - 1]]))
        jac[:, col] = (values[0] - values[1]) / (2.0 * eps)
    return jac


def multiplier_check(
    functional: ContourFunctional,
    spectral: SpectralCalculator,
    radii: float | tuple[float, float],
    omega: float,
    m: int,
    n_values: Sequence[int],
    eps: float | None = None,
) -> list[MultiplierRow]:
    """Compare finite-difference derivatives of F (or G) at the trivial state with the analytic multipliers.

    Relative errors are taken against max(|analytic|, nm·(|Ω| + Q)·1e-3) so rows at a
    kernel direction, where the multiplier vanishes, stay meaningful.
    """
    rows: list[MultiplierRow] = []
    if isinstance(radii, tuple):
        a1, a2 = radii
        step = eps or 1e-6 * a1 * a1
        for n in n_values:
            nm = n * m
            analytic = -nm * spectral.matrix_Mn(omega, a1, a2, nm).as_array()
            jac = fd_jacobian_doubly(functional, a1, a2, omega, m, n, step)
            scale = nm * (abs(omega) + spectral.q(a1, 0.0)) * 1e-3
            for i in range(2):
                for j in range(2):
                    rows.append(_row(n, f"G{i + 1}/r{j + 1}", float(analytic[i, j]), float(jac[i, j]), scale))
    else:
        a = float(radii)
        step = eps or 1e-6 * a * a
        q = spectral.q(a, 0.0)
        for n in n_values:
            nm = n * m
            analytic = -nm * (omega - q + spectral.lambda_n(nm, a, a))
            fd = _fd_simply(functional, a, omega, m, n, step)
            rows.append(_row(n, "F", analytic, fd, nm * (abs(omega) + q) * 1e-3))
    worst = max((row.relative_error for row in rows), default=0.0)
    logger.info("multiplier check m=%d over n=%s: worst relative error %.3e", m, list(n_values), worst)
    return rows


def kernel_alignment(
    functional: ContourFunctional,
    spectral: SpectralCalculator,
    a1: float,
    a2: float,
    m: int,
    branch: str,
    eps: float | None = None,
) -> float:
    """Angle between the near-null direction of the FD Jacobian at Ω_m^± and the kernel generator."""
    omega = spectral.omega_doubly(a1, a2, m).select(branch)
    jac = fd_jacobian_doubly(functional, a1, a2, omega, m, 1, eps or 1e-6 * a1 * a1)
    _, _, vt = np.linalg.svd(jac)
    null = vt[-1]
    generator = np.asarray(spectral.kernel_generator(a1, a2, m, branch), dtype=float)
    cosine = abs(float(null @ generator)) / (np.linalg.norm(null) * np.linalg.norm(generator))
    return float(np.arccos(min(1.0, cosine)))
