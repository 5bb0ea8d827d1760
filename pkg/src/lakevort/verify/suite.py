﻿from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

from ..branch import BranchContinuation, NewtonSettings
from ..config import RunConfig
from ..contour import ContourFunctional, FourierContour, multiplier_check
from ..depth import DepthProfile
from ..errors import ConfigError
from ..logging_config import get_logger
from ..models import CheckResult
from ..radialgreen import ModeGreenBank
from ..spectral import SpectralCalculator
from .fd2d import Grid2D, fd_solve_2d, observed_order
from .modesum import ModeSumSolution, PatchSolution
from .oracles import bump_source, decomposition_check, log_identity_check, self_adjointness_check
from .rotation import rigid_rotation_check

logger = get_logger(__name__)

FD_SIZES = (129, 257, 513)
ORDER_WINDOW = (1.8, 2.2)
LOG_IDENTITY_TOL = 1e-8
LOG_IDENTITY_DIAGONAL_TOL = 1e-3
DECOMPOSITION_TOL = 1e-8
MULTIPLIER_TOL = 1e-4
MULTIPLIER_MODES = 8
ROTATION_TOL = 1e-5


class VerificationSuite:
    """Registry of independent checks, each producing CheckResult records."""

    def __init__(self, config: RunConfig, profile: DepthProfile | None = None) -> None:
        self.config = config
        self.profile = profile or config.build_profile()
        self.half_width = 2.0 * max(self.profile.r_inf, 1.0)
        self._bank: ModeGreenBank | None = None
        self.checks: dict[str, Callable[[], list[CheckResult]]] = {
            "log-identity": self.check_log_identity,
            "decomposition": self.check_decomposition,
            "fd-order": self.check_fd_order,
            "fd-patch": self.check_fd_patch,
            "self-adjoint": self.check_self_adjointness,
            "multiplier": self.check_multiplier,
            "rigid-rotation": self.check_rigid_rotation,
        }

    @property
    def bank(self) -> ModeGreenBank:
        if self._bank is None:
            r_out = self.config.effective_r_out(math.sqrt(2.0) * self.half_width)
            self._bank = ModeGreenBank.for_profile(self.profile, r_out=r_out, n_r=self.config.grid.n_r)
        return self._bank

    def select(self, selector: str) -> list[str]:
        if selector.strip() in {"", "all"}:
            return list(self.checks)
        names = [name.strip() for name in selector.split(",") if name.strip()]
        unknown = [name for name in names if name not in self.checks]
        if unknown:
            raise ConfigError(f"unknown checks {unknown}; available: {sorted(self.checks)}")
        return names

    def run(self, selector: str = "all", jobs: int = 1) -> list[CheckResult]:
        names = self.select(selector)
        if jobs > 1:
            _ = self.bank
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                batches = list(pool.map(lambda name: self.checks[name](), names))
        else:
            batches = [self.checks[name]() for name in names]
        results = [result for batch in batches for result in batch]
        failed = [result.check for result in results if not result.passed]
        logger.info("verification: %d checks, %d failed %s", len(results), len(failed), failed)
        return results

    # individual checks

    def check_log_identity(self) -> list[CheckResult]:
        worst = 0.0
        for n in (1, 2, 4, 8, 16):
            for ratio in (0.1, 0.4, 0.9):
                for theta in (0.0, math.pi / 4, 1.0):
                    worst = max(worst, log_identity_check(n, ratio, 1.0, theta))
        diagonal = log_identity_check(1, 1.0, 1.0, 0.0)
        return [
            CheckResult(
                "log-identity",
                {"n": [1, 16], "ratio": [0.1, 0.9], "nodes": 4096},
                worst,
                LOG_IDENTITY_TOL,
                worst <= LOG_IDENTITY_TOL,
            ),
            CheckResult(
                "log-identity-diagonal",
                {"n": 1, "x": 1.0, "y": 1.0, "theta": 0.0, "nodes": 4096},
                diagonal,
                LOG_IDENTITY_DIAGONAL_TOL,
                diagonal <= LOG_IDENTITY_DIAGONAL_TOL,
            ),
        ]

    def check_decomposition(self) -> list[CheckResult]:
        support = min(1.0, self.profile.r_inf)
        rtol = self.config.tolerances.quad_tol
        results = []
        for n in (0, 2):
            gap = decomposition_check(self.profile, lambda r: (1.0 - (r / support) ** 2) ** 3, support, rtol=rtol, n=n)
            results.append(
                CheckResult(
                    "decomposition",
                    {"source": "smooth-disc", "support": support, "mode": n, "route": "library"},
                    gap,
                    DECOMPOSITION_TOL,
                    gap <= DECOMPOSITION_TOL,
                )
            )
        gap = decomposition_check(self.profile, lambda r: 1.0, support, rtol=rtol, route="reference")
        results.append(
            CheckResult(
                "decomposition-reference",
                {"source": "indicator", "support": support, "mode": 0, "route": "reference"},
                gap,
                DECOMPOSITION_TOL,
                gap <= DECOMPOSITION_TOL,
            )
        )
        return results

    def check_fd_order(self) -> list[CheckResult]:
        source = bump_source((0.3, 0.2), 0.6)
        reference = ModeSumSolution(self.bank, source, l_max=64, n_theta=256)
        grids = [Grid2D(self.half_width, n) for n in FD_SIZES]
        errors = []
        for grid in grids:
            solution = fd_solve_2d(self.profile, grid, grid.sample(source), reference)
            stride = (grid.n - 1) // (grids[0].n - 1)
            inner = slice(stride * 32, grid.n - stride * 32, 4 * stride)
            x, y = grid.mesh
            errors.append(float(np.max(np.abs(solution[inner, inner] - reference(x[inner, inner], y[inner, inner])))))
        orders = observed_order(errors, [grid.h for grid in grids])
        lo, hi = ORDER_WINDOW
        return [
            CheckResult(
                "fd-order",
                {"sizes": list(FD_SIZES), "half_width": self.half_width},
                min(orders),
                lo,
                all(lo <= order <= hi for order in orders),
                {"errors": errors, "orders": orders},
            )
        ]

    def check_fd_patch(self) -> list[CheckResult]:
        contour = FourierContour(0.8, 3, (0.04, 0.004))
        functional = self._functional()
        reference = PatchSolution(functional.potential(3), ((contour, 1.0),))
        grid = Grid2D(self.half_width, FD_SIZES[1])
        solution = fd_solve_2d(self.profile, grid, grid.sample(reference.source), reference)
        x, y = grid.mesh
        window = slice(grid.n // 4, grid.n - grid.n // 4, 8)
        exact = reference(x[window, window], y[window, window])
        scale = float(np.max(np.abs(exact)))
        error = float(np.max(np.abs(solution[window, window] - exact))) / scale
        tolerance = 10.0 * grid.h
        return [CheckResult("fd-patch", {"m": 3, "n": grid.n}, error, tolerance, error <= tolerance)]

    def check_self_adjointness(self) -> list[CheckResult]:
        grid = Grid2D(self.half_width, FD_SIZES[1])
        first = bump_source((0.4, 0.0), 0.5)
        second = bump_source((-0.3, 0.35), 0.5)
        tables = []
        for source in (first, second):
            table = grid.sample(source)
            tables.append(table / grid.integrate(table))
        value = self_adjointness_check(
            self.profile,
            grid,
            tables[0],
            tables[1],
            ModeSumSolution(self.bank, first, l_max=64),
            ModeSumSolution(self.bank, second, l_max=64),
        )
        tolerance = 10.0 * grid.h**2
        return [CheckResult("self-adjoint", {"n": grid.n, "width": 0.5}, value, tolerance, value <= tolerance)]

    def _functional(self) -> ContourFunctional:
        grid = self.config.grid
        return ContourFunctional(
            self.profile,
            self.bank,
            theta_n=grid.theta_n,
            l_max_factor=grid.l_max_factor,
            band_nodes=grid.band_nodes,
        )

    def check_multiplier(self) -> list[CheckResult]:
        functional = self._functional()
        spectral = SpectralCalculator(self.profile, self.bank, self.config.tolerances.quad_tol)
        a, m = 0.8, 2
        omega = 0.5 * spectral.omega_simply(a, m)
        modes = range(1, MULTIPLIER_MODES + 1)
        simply = multiplier_check(functional, spectral, a, omega, m, modes)
        radii = (0.8, 0.5)
        doubly = multiplier_check(functional, spectral, radii, omega, m, modes)
        results = []
        for label, params, rows in (
            ("multiplier", {"a": a}, simply),
            ("multiplier-doubly", {"a1": radii[0], "a2": radii[1]}, doubly),
        ):
            worst = max(row.relative_error for row in rows)
            results.append(
                CheckResult(
                    label,
                    {**params, "m": m, "omega": omega, "n": [1, MULTIPLIER_MODES]},
                    worst,
                    MULTIPLIER_TOL,
                    worst <= MULTIPLIER_TOL,
                    {"rows": [row.__dict__ for row in rows]},
                )
            )
        return results

    def check_rigid_rotation(self) -> list[CheckResult]:
        functional = self._functional()
        spectral = SpectralCalculator(self.profile, self.bank, self.config.tolerances.quad_tol)
        settings = NewtonSettings(tol=self.config.tolerances.newton_tol)
        a, m = 0.8, 3
        branch = BranchContinuation(functional, spectral, settings).continue_simply(a, m, 0.02 * a * a, 0.02 * a * a)
        if branch.truncated:
            details = {"diagnostic": branch.diagnostic}
            return [CheckResult("rigid-rotation", {"a": a, "m": m}, math.inf, ROTATION_TOL * a, False, details)]
        step = branch.steps[-1]
        duration = 0.5 * math.pi / step.omega
        deviation = rigid_rotation_check(functional.potential(m), step, duration, dt=0.1)
        return [
            CheckResult(
                "rigid-rotation",
                {"a": a, "m": m, "amplitude": step.amplitude, "T": duration},
                deviation,
                ROTATION_TOL * a,
                deviation <= ROTATION_TOL * a,
            )
        ]
