﻿from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from ..depth.profiles import DepthProfile, make_constant_profile
from ..errors import SolverError
from ..logging_config import get_logger
from ..models import RadialFunction, RadialGrid
from ..radialgreen import homogeneous_pair, solve_mode_n, solve_mode_zero
from .fd2d import BoundaryData, Grid2D, fd_solve_2d

logger = get_logger(__name__)

MASS_TOLERANCE = 1e-6
_MIN_RTOL = 1e-13

RadialSource = Callable[[float], float]


def log_identity_check(n: int, x: float, y: float, theta: float, nodes: int = 4096) -> float:
    """|(1/2π)∫ log|y e^{iθ} - x e^{iη}| cos(nη) dη + cos(nθ) min(x,y)^n / (2n max(x,y)^n)|.

    Midpoint nodes are shifted off η = θ so the x = y case stays finite.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    eta = theta + 2.0 * math.pi * (np.arange(nodes) + 0.5) / nodes
    distance_sq = x * x + y * y - 2.0 * x * y * np.cos(eta - theta)
    quadrature = float(np.mean(0.5 * np.log(distance_sq) * np.cos(n * eta)))
    ratio = min(x, y) / max(x, y)
    closed = -math.cos(n * theta) * ratio**n / (2.0 * n)
    return abs(quadrature - closed)


def bump_source(center: tuple[float, float], width: float) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """(1 - |x - c|²/σ²)³ on |x - c| < σ, scaled to unit integral."""
    scale = 4.0 / (math.pi * width * width)

    def source(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        q = ((np.asarray(x) - center[0]) ** 2 + (np.asarray(y) - center[1]) ** 2) / (width * width)
        return scale * np.clip(1.0 - q, 0.0, None) ** 3

    return source


def self_adjointness_check(
    profile: DepthProfile,
    grid: Grid2D,
    omega1: np.ndarray,
    omega2: np.ndarray,
    boundary1: BoundaryData,
    boundary2: BoundaryData,
) -> float:
    """|∫ψ1 ω2 - ∫ω1 ψ2| with ψi the discrete solutions for ωi."""
    for label, table in (("omega1", omega1), ("omega2", omega2)):
        mass = grid.integrate(table)
        if abs(mass - 1.0) > MASS_TOLERANCE:
            raise ValueError(f"{label} must have unit mass, got {mass:.8f}")
    psi1 = fd_solve_2d(profile, grid, omega1, boundary1)
    psi2 = psi1 if omega2 is omega1 and boundary2 is boundary1 else fd_solve_2d(profile, grid, omega2, boundary2)
    return abs(grid.integrate(psi1 * omega2) - grid.integrate(omega1 * psi2))


def _breakpoints(profile: DepthProfile, start: float, support: float, end: float) -> list[float]:
    points = {start, support, end}
    if not profile.is_constant and start < profile.r_inf < end:
        points.add(profile.r_inf)
    return sorted(p for p in points if start <= p <= end)


def _integrate(
    rhs: Callable[[float, np.ndarray], list[float]],
    y0: np.ndarray,
    breaks: list[float],
    radii: np.ndarray,
    rtol: float,
) -> np.ndarray:
    out = np.empty((radii.size, y0.size))
    state = y0
    for left, right in zip(breaks[:-1], breaks[1:]):
        inside = (radii > left) & (radii <= right)
        t_eval = np.unique(np.append(radii[inside], right))
        sol = solve_ivp(rhs, (left, right), state, method="DOP853", rtol=rtol, atol=1e-15, t_eval=t_eval)
        if not sol.success:
            raise SolverError(f"radial integration failed on [{left}, {right}]: {sol.message}")
        values = sol.y.T
        if inside.any():
            out[inside] = values[np.searchsorted(t_eval, radii[inside])]
        state = values[-1]
    return out


def _reference_decomposition(
    profile: DepthProfile, f: Callable[[float], float], support: float, sample: np.ndarray, rtol: float
) -> tuple[np.ndarray, np.ndarray]:
    """ψ_b and log potential plus remainder from solve_ivp on the nested radial integrals.

    ψ_b' = -(b/r)∫τ f, log potential ψ_N' = -(1/r)∫τ b f, remainder
    φ_f' = -(b/r)∫(b'/b²)(∫τ b f).
    """
    start = 1e-8 * support

    def lhs(r: float, y: np.ndarray) -> list[float]:
        return [r * f(r), -profile.b_scalar(r) / r * y[0]]

    def rhs(r: float, y: np.ndarray) -> list[float]:
        b = profile.b_scalar(r)
        db = float(profile.db(r))
        return [r * b * f(r), db / (b * b) * y[0], -y[0] / r, -b / r * y[1]]

    f0, b0 = f(start), profile.b_scalar(start)
    breaks = _breakpoints(profile, start, support, float(sample[-1]))
    direct = _integrate(lhs, np.array([f0 * start**2 / 2.0, -b0 * f0 * start**2 / 4.0]), breaks, sample, rtol)
    split = _integrate(
        rhs, np.array([b0 * f0 * start**2 / 2.0, 0.0, -b0 * f0 * start**2 / 4.0, 0.0]), breaks, sample, rtol
    )
    return direct[:, 1], split[:, 2] + split[:, 3]


def _library_grid(profile: DepthProfile, support: float, end: float, size: int) -> RadialGrid:
    """Geometric pieces joined at the support and at the plateau radius."""
    start = 1e-4 * support
    breaks = [start, support, end]
    if not profile.is_constant and support < profile.r_inf < end:
        breaks.insert(2, profile.r_inf)
    total = math.log(end / start)
    pieces = [np.array([start])]
    for left, right in zip(breaks[:-1], breaks[1:]):
        count = max(8, int(size * math.log(right / left) / total))
        pieces.append(np.geomspace(left, right, count + 1)[1:])
    return RadialGrid(np.concatenate(pieces))


def _library_decomposition(
    profile: DepthProfile, f: Callable[[float], float], grid: RadialGrid, n: int
) -> tuple[RadialFunction, RadialFunction]:
    """ψ_b and ψ_N + φ_f from the library mode solvers on one grid.

    The remainder source is -(b'/b²)·ψ_N' for every mode.
    """
    r = grid.nodes
    b = profile.b(r)
    values = np.array([f(float(x)) for x in r])
    flat = make_constant_profile(1.0, min(profile.r_inf, grid.r_out))
    if n == 0:
        psi_b = solve_mode_zero(profile, RadialFunction(grid, values))
        psi_n = solve_mode_zero(flat, RadialFunction(grid, b * values))
        remainder = RadialFunction(grid, -profile.db(r) / (b * b) * psi_n.derivatives)
        phi = solve_mode_zero(profile, remainder)
    else:
        green_b = homogeneous_pair(profile, n, grid)
        green_flat = homogeneous_pair(flat, n, grid)
        psi_b = solve_mode_n(green_b, RadialFunction(grid, values))
        psi_n = solve_mode_n(green_flat, RadialFunction(grid, b * values))
        remainder = RadialFunction(grid, -profile.db(r) / (b * b) * psi_n.derivatives)
        phi = solve_mode_n(green_b, remainder)
    return psi_b, RadialFunction(grid, psi_n.values + phi.values, psi_n.derivatives + phi.derivatives)


def decomposition_check(
    profile: DepthProfile,
    source: RadialSource,
    support: float,
    radii: Sequence[float] | None = None,
    rtol: float = 1e-10,
    route: str = "library",
    n: int = 0,
    grid_size: int = 8192,
) -> float:
    """Largest gap between ψ_b and the log potential of b f plus the remainder φ_f.

    route="library" builds all three pieces with solve_mode_zero (or solve_mode_n for
    the mode-n amplitude f(r)cos(nθ)) and, for n = 0, also measures ψ_b against the
    solve_ivp reference; the source must be continuous at its support edge.
    route="reference" uses only the solve_ivp integrations and accepts jumps at the
    support. Additive constants are matched at the first radius for n = 0.
    """
    if route not in {"library", "reference"}:
        raise ValueError(f"route must be 'library' or 'reference', got {route!r}")
    if n < 0 or (n > 0 and route == "reference"):
        raise ValueError(f"mode {n} is not available on the {route} route")
    rtol = max(rtol, _MIN_RTOL)
    end = 3.0 * max(support, profile.r_inf)
    sample = np.sort(np.asarray(radii if radii is not None else np.geomspace(0.05 * support, end, 40), dtype=float))
    end = max(end, float(sample[-1]))

    def f(r: float) -> float:
        return float(source(r)) if r < support else 0.0

    def matched(values: np.ndarray) -> np.ndarray:
        return values - values[0] if n == 0 else values

    gaps: list[float] = []
    if route == "reference" or n == 0:
        ref_b, ref_split = _reference_decomposition(profile, f, support, sample, rtol)
        if route == "reference":
            gaps.append(float(np.max(np.abs(matched(ref_b) - matched(ref_split)))))
    if route == "library":
        psi_b, split = _library_decomposition(profile, f, _library_grid(profile, support, end, grid_size), n)
        lib_b = np.asarray(psi_b(sample))
        gaps.append(float(np.max(np.abs(matched(lib_b) - matched(np.asarray(split(sample)))))))
        if n == 0:
            gaps.append(float(np.max(np.abs(matched(lib_b) - matched(ref_b)))))
    gap = max(gaps)
    logger.debug("decomposition check (%s, n=%d) over %d radii: max gap %.3e", route, n, sample.size, gap)
    return gap
