﻿from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline

from ..depth import DepthProfile
from ..errors import AbelIdentityError, SolverError
from ..logging_config import get_logger
from ..models import RadialFunction, RadialGrid
from .mode_zero import ModeZeroKernel

logger = get_logger(__name__)

RICCATI_RTOL = 1e-10
RICCATI_ATOL = 1e-14
ABEL_TOLERANCE = 1e-6


@dataclass(frozen=True, eq=False)
class ModeGreen:
    """Homogeneous solutions of the mode-n operator -(r u'/b)' + n^2 u/(b r).

    ``u_minus`` and ``u_plus`` hold log|u| with derivative d log|u|/dr, so that
    u_minus ~ r^n at 0 and u_plus = r^-n beyond the plateau radius. The Green
    value is Λ_n(α, β) = u_minus(min) u_plus(max) / C.
    """

    n: int
    grid: RadialGrid
    u_minus: RadialFunction
    u_plus: RadialFunction
    c: float
    log_c: float
    abel_deviation: float
    _deviation_minus: CubicHermiteSpline
    _deviation_plus: CubicHermiteSpline
    _phase_minus: CubicHermiteSpline
    _phase_plus: CubicHermiteSpline

    def log_u_minus(self, r: np.ndarray | float) -> np.ndarray:
        s = np.log(self.grid.require(r))
        return self.n * s + self._phase_minus(s)

    def log_u_plus(self, r: np.ndarray | float) -> np.ndarray:
        s = np.log(self.grid.require(r))
        return -self.n * s + self._phase_plus(s)

    def phi_minus(self, r: np.ndarray | float) -> np.ndarray:
        """r u_minus'/u_minus."""
        s = np.log(self.grid.require(r))
        return self.n + self._deviation_minus(s)

    def phi_plus(self, r: np.ndarray | float) -> np.ndarray:
        s = np.log(self.grid.require(r))
        return -self.n + self._deviation_plus(s)

    def lambda_value(self, alpha: np.ndarray | float, beta: np.ndarray | float) -> np.ndarray:
        alpha = np.asarray(alpha, dtype=float)
        beta = np.asarray(beta, dtype=float)
        lo = np.minimum(alpha, beta)
        hi = np.maximum(alpha, beta)
        return np.exp(self.log_u_minus(lo) + self.log_u_plus(hi) - self.log_c)

    def lambda_dalpha(self, alpha: np.ndarray | float, beta: np.ndarray | float) -> np.ndarray:
        """∂Λ_n(α, β)/∂α."""
        alpha = np.asarray(alpha, dtype=float)
        beta = np.asarray(beta, dtype=float)
        phi = np.where(beta < alpha, self.phi_plus(alpha), self.phi_minus(alpha))
        return self.lambda_value(alpha, beta) * phi / alpha


def _flat_tables(s: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return np.zeros_like(s), np.zeros_like(s), np.zeros_like(s)


def _sweep(
    p: DepthProfile,
    n: int,
    s: np.ndarray,
    outward: bool,
    rtol: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integrate the Riccati deviation and its primitive along s = log r.

    Outward: φ = n + δ; inward: φ = -n + δ. Returns (δ, ∫δ ds, dδ/ds) on ``s``.
    """
    sign = 1.0 if outward else -1.0
    nf = float(n)

    def rhs(t: float, y: np.ndarray) -> list[float]:
        r = np.exp(t)
        beta = float(r * p.db(r) / p.b(r))
        delta = y[0]
        ddelta = -2.0 * sign * nf * delta - delta * delta + beta * (sign * nf + delta)
        return [ddelta, delta]

    t_eval = s if outward else s[::-1]
    solution = solve_ivp(
        rhs,
        (t_eval[0], t_eval[-1]),
        [0.0, 0.0],
        method="RK45",
        t_eval=t_eval,
        rtol=rtol,
        atol=RICCATI_ATOL,
    )
    if not solution.success:
        raise SolverError(f"Riccati sweep for n={n} failed: {solution.message}")

    delta, phase = solution.y
    if not outward:
        delta, phase = delta[::-1], phase[::-1]
    r = np.exp(s)
    beta = r * p.db(r) / p.b(r)
    slope = -2.0 * sign * nf * delta - delta * delta + beta * (sign * nf + delta)
    return delta, phase, slope


def homogeneous_pair(
    p: DepthProfile,
    n: int,
    grid: RadialGrid,
    rtol: float = RICCATI_RTOL,
    abel_tol: float = ABEL_TOLERANCE,
) -> ModeGreen:
    if n < 1:
        raise ValueError(f"mode index must be >= 1, got {n}")
    if grid.r_out < p.r_inf:
        raise ValueError(f"grid outer radius {grid.r_out} is below the plateau radius {p.r_inf}")

    s = grid.log_nodes
    if p.is_constant:
        dm, pm, sm = _flat_tables(s)
        dp, pp, sp = _flat_tables(s)
    else:
        dm, pm, sm = _sweep(p, n, s, outward=True, rtol=rtol)
        dp, pp, sp = _sweep(p, n, s, outward=False, rtol=rtol)

    log_minus = n * s + pm
    log_plus = -n * s + pp
    phi_gap = 2.0 * n + dm - dp
    if np.any(phi_gap <= 0.0):
        raise AbelIdentityError(f"mode {n}: homogeneous solutions are not separated (C <= 0)")

    log_c_nodes = log_minus + log_plus - np.log(p.b(grid.nodes)) + np.log(phi_gap)
    log_c = float(np.mean(log_c_nodes))
    deviation = float(np.max(np.abs(np.expm1(log_c_nodes - log_c))))
    if deviation > abel_tol:
        raise AbelIdentityError(f"mode {n}: Abel identity violated, relative spread {deviation:.3e} > {abel_tol:.1e}")
    logger.debug("mode %d: C=%.12g abel_deviation=%.3e", n, np.exp(log_c), deviation)

    r = grid.nodes
    return ModeGreen(
        n=n,
        grid=grid,
        u_minus=RadialFunction(grid, log_minus, (n + dm) / r),
        u_plus=RadialFunction(grid, log_plus, (-n + dp) / r, decay_exponent=n),
        c=float(np.exp(log_c)),
        log_c=log_c,
        abel_deviation=deviation,
        _deviation_minus=CubicHermiteSpline(s, dm, sm),
        _deviation_plus=CubicHermiteSpline(s, dp, sp),
        _phase_minus=CubicHermiteSpline(s, pm, dm),
        _phase_plus=CubicHermiteSpline(s, pp, dp),
    )


def green_lambda(mg: ModeGreen, alpha: float, beta: float) -> float:
    return float(mg.lambda_value(alpha, beta))


class ModeGreenBank:
    """Per-n cache of ModeGreen objects for one profile and grid."""

    def __init__(self, profile: DepthProfile, grid: RadialGrid, rtol: float = RICCATI_RTOL) -> None:
        self.profile = profile
        self.grid = grid
        self.rtol = rtol
        self._greens: dict[int, ModeGreen] = {}
        self._lock = threading.Lock()
        self._zero_kernel: ModeZeroKernel | None = None

    @classmethod
    def for_profile(cls, profile: DepthProfile, r_out: float | None = None, n_r: int = 2048) -> "ModeGreenBank":
        outer = max(r_out or 0.0, 2.0 * profile.r_inf)
        return cls(profile, RadialGrid.geometric(1e-6 * profile.r_inf, outer, n_r))

    def get(self, n: int) -> ModeGreen:
        cached = self._greens.get(n)
        if cached is not None:
            return cached
        green = homogeneous_pair(self.profile, n, self.grid, rtol=self.rtol)
        with self._lock:
            return self._greens.setdefault(n, green)

    def lambda_value(self, n: int, alpha: np.ndarray | float, beta: np.ndarray | float) -> np.ndarray:
        return self.get(n).lambda_value(alpha, beta)

    @property
    def zero_kernel(self) -> ModeZeroKernel:
        if self._zero_kernel is None:
            kernel = ModeZeroKernel(self.profile, self.grid)
            with self._lock:
                if self._zero_kernel is None:
                    self._zero_kernel = kernel
        return self._zero_kernel

