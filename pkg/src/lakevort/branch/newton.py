﻿from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import ContourError, NewtonConvergenceError
from ..logging_config import get_logger

logger = get_logger(__name__)

Residual = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class NewtonSettings:
    tol: float = 1e-10
    max_iter: int = 25
    max_halvings: int = 8
    fd_scale: float = 1e-7
    jobs: int = 1


@dataclass(frozen=True)
class NewtonResult:
    x: np.ndarray
    residual: np.ndarray
    residual_inf: float
    iterations: int


def _safe(residual: Residual, x: np.ndarray) -> np.ndarray | None:
    try:
        value = np.asarray(residual(x), dtype=float)
    except ContourError:
        return None
    return value if np.all(np.isfinite(value)) else None


def _fd_column(residual: Residual, x: np.ndarray, fx: np.ndarray, step: float, j: int) -> np.ndarray:
    shifted = x.copy()
    shifted[j] += step
    value = _safe(residual, shifted)
    if value is not None:
        return (value - fx) / step
    shifted[j] = x[j] - step
    value = _safe(residual, shifted)
    if value is None:
        raise NewtonConvergenceError(f"no valid finite-difference point for unknown {j}", 0, float("inf"))
    return (fx - value) / step


def fd_jacobian(residual: Residual, x: np.ndarray, fx: np.ndarray, step: float, jobs: int = 1) -> np.ndarray:
    """Forward differences, falling back to backward ones where the forward point is invalid.

    With jobs > 1 the columns are evaluated on a thread pool.
    """
    if jobs > 1 and x.size > 1:
        with ThreadPoolExecutor(max_workers=min(jobs, x.size)) as pool:
            columns = list(pool.map(lambda j: _fd_column(residual, x, fx, step, j), range(x.size)))
        return np.stack(columns, axis=1)
    jac = np.empty((fx.size, x.size))
    for j in range(x.size):
        jac[:, j] = _fd_column(residual, x, fx, step, j)
    return jac


def damped_newton(residual: Residual, x0: np.ndarray, step: float, settings: NewtonSettings) -> NewtonResult:
    """Newton iteration with finite-difference Jacobian and step halving on residual increase."""
    x = np.array(x0, dtype=float)
    fx = _safe(residual, x)
    if fx is None:
        raise NewtonConvergenceError("initial guess is not a valid contour", 0, float("inf"))
    norm = float(np.max(np.abs(fx)))
    for iteration in range(1, settings.max_iter + 1):
        if norm <= settings.tol:
            return NewtonResult(x, fx, norm, iteration - 1)
        jac = fd_jacobian(residual, x, fx, step, settings.jobs)
        try:
            delta = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError as exc:
            raise NewtonConvergenceError(f"singular Jacobian: {exc}", iteration, norm) from exc

        damping = 1.0
        for _ in range(settings.max_halvings + 1):
            trial = x + damping * delta
            f_trial = _safe(residual, trial)
            if f_trial is not None and float(np.max(np.abs(f_trial))) < norm:
                break
            damping *= 0.5
        else:
            raise NewtonConvergenceError("line search failed to reduce the residual", iteration, norm)
        x, fx = trial, f_trial
        norm = float(np.max(np.abs(fx)))
        logger.debug("newton iteration %d: residual %.3e damping %.3g", iteration, norm, damping)
    if norm <= settings.tol:
        return NewtonResult(x, fx, norm, settings.max_iter)
    raise NewtonConvergenceError(
        f"no convergence in {settings.max_iter} iterations", settings.max_iter, norm
    )
