﻿from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Sequence

import numpy as np

from ..depth import DepthProfile, q_factor, theta_sup
from ..errors import CrossCheckError, DegenerateSpectrumError, ThresholdSearchError
from ..logging_config import get_logger
from ..models import DoublyRoots, LambdaCrossCheck, MatrixMn, SpectralRow, SpectralTable, ThresholdReport
from ..radialgreen import ModeGreenBank
from .fixed_point import fn_fixed_point
from .kernels import min_ratio

logger = get_logger(__name__)

DEGENERACY_TOL = 1e-12
DEFAULT_WINDOW = 64
DEFAULT_N_LIMIT = 256


class SpectralCalculator:
    """Λ_n, Q and the bifurcation quantities built from them, for one profile."""

    def __init__(self, profile: DepthProfile, bank: ModeGreenBank | None = None, quad_tol: float = 1e-12) -> None:
        self.profile = profile
        self.bank = bank or ModeGreenBank.for_profile(profile)
        self.quad_tol = quad_tol
        self._theta_sup: float | None = None

    @property
    def theta_sup(self) -> float:
        if self._theta_sup is None:
            self._theta_sup = theta_sup(self.profile)
        return self._theta_sup

    def b(self, r: float) -> float:
        return self.profile.b_scalar(r)

    def q(self, alpha: float, beta: float) -> float:
        return q_factor(self.profile, alpha, beta, tol=self.quad_tol)

    def leading_term(self, n: int, alpha: float, beta: float) -> float:
        return math.sqrt(self.b(alpha) * self.b(beta)) * min_ratio(alpha, beta) ** n / (2 * n)

    def lambda_n(self, n: int, alpha: float, beta: float, route: str = "green") -> float:
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        if route == "green":
            return float(self.bank.lambda_value(n, alpha, beta))
        if route == "fixedpoint":
            f_n = fn_fixed_point(self.profile, n, alpha, [beta])
            return self.leading_term(n, alpha, beta) + float(f_n(beta))
        raise ValueError(f"route must be 'green' or 'fixedpoint', got {route!r}")

    def f_n(self, n: int, alpha: float, beta: float) -> float:
        """f_n(α, β) read off the Green route."""
        return self.lambda_n(n, alpha, beta) - self.leading_term(n, alpha, beta)

    def contraction_start(self, alpha: float, beta: float) -> int:
        upper = max(alpha, beta, self.profile.r_inf)
        return max(1, math.ceil(upper * self.theta_sup / 2.0))

    def cross_check(self, n: int, alpha: float, beta: float, tol: float) -> LambdaCrossCheck:
        green = self.lambda_n(n, alpha, beta, route="green")
        fixed = self.lambda_n(n, alpha, beta, route="fixedpoint")
        error = abs(green - fixed) / abs(green)
        check = LambdaCrossCheck(n, alpha, beta, green, fixed, error)
        if not error <= tol:
            raise CrossCheckError(
                f"Λ_{n}({alpha:g}, {beta:g}): green={green:.12g} fixedpoint={fixed:.12g} rel={error:.3e} > {tol:.1e}"
            )
        return check

    def threshold_M(self, alpha: float, beta: float) -> float:
        upper = max(alpha, beta, self.profile.r_inf)
        return 16.0 * upper * self.theta_sup * max(1.0, 1.0 / math.sqrt(self.b(alpha)))

    def omega_simply(self, a: float, m: int) -> float:
        if m < 1:
            raise ValueError(f"m must be >= 1, got {m}")
        return self.q(a, 0.0) - self.lambda_n(m, a, a)

    def _pair_lambdas(self, a1: float, a2: float, n: int) -> tuple[float, float, float]:
        return self.lambda_n(n, a1, a1), self.lambda_n(n, a2, a2), self.lambda_n(n, a1, a2)

    @staticmethod
    def _check_annulus(a1: float, a2: float) -> None:
        if not 0.0 < a2 < a1:
            raise ValueError(f"annulus radii must satisfy 0 < a2 < a1, got a1={a1}, a2={a2}")

    def _roots(self, q: float, l11: float, l22: float, l12: float, m: int) -> DoublyRoots:
        delta = (q - l11 - l22) ** 2 - 4.0 * l12 * l12
        scale = (abs(q) + l11 + l22) ** 2
        if not delta > DEGENERACY_TOL * scale:
            raise DegenerateSpectrumError(f"degenerate or complex spectrum at m={m}: Delta={delta:.6e}")
        centre = q / 2.0 + (l22 - l11) / 2.0
        root = math.sqrt(delta) / 2.0
        return DoublyRoots(centre - root, centre + root, delta)

    def omega_doubly(self, a1: float, a2: float, m: int) -> DoublyRoots:
        self._check_annulus(a1, a2)
        l11, l22, l12 = self._pair_lambdas(a1, a2, m)
        return self._roots(self.q(a1, a2), l11, l22, l12, m)

    def det_coefficients(self, a1: float, a2: float, n: int) -> tuple[float, float]:
        """(β_n, γ_n) with det M_n(Ω) = Ω² + β_n Ω + γ_n."""
        self._check_annulus(a1, a2)
        q = self.q(a1, a2)
        l11, l22, l12 = self._pair_lambdas(a1, a2, n)
        return -q + l11 - l22, -l22 * (l11 - q) + l12 * l12

    def matrix_Mn(self, omega: float, a1: float, a2: float, n: int) -> MatrixMn:
        self._check_annulus(a1, a2)
        q = self.q(a1, a2)
        l11, l22, l12 = self._pair_lambdas(a1, a2, n)
        b1, b2 = self.b(a1), self.b(a2)
        matrix = (
            (omega - q + l11, -(b2 / b1) * l12),
            ((b1 / b2) * l12, omega - l22),
        )
        det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]
        return MatrixMn(n, omega, matrix, det)

    def kernel_generator(self, a1: float, a2: float, m: int, branch: str) -> np.ndarray:
        omega = self.omega_doubly(a1, a2, m).select(branch)
        _, l22, l12 = self._pair_lambdas(a1, a2, m)
        return np.array([omega - l22, -(self.b(a1) / self.b(a2)) * l12])

    def left_kernel_generator(self, a1: float, a2: float, m: int, branch: str) -> np.ndarray:
        omega = self.omega_doubly(a1, a2, m).select(branch)
        _, l22, l12 = self._pair_lambdas(a1, a2, m)
        return np.array([omega - l22, (self.b(a2) / self.b(a1)) * l12])

    def transversality(self, a1: float, a2: float, m: int, branch: str) -> float:
        """Left kernel paired with the right kernel, (Ω - Λ22)(2Ω - Q + Λ11 - Λ22)."""
        omega = self.omega_doubly(a1, a2, m).select(branch)
        l11, l22, _ = self._pair_lambdas(a1, a2, m)
        return (omega - l22) * (2.0 * omega - self.q(a1, a2) + l11 - l22)

    def find_threshold_N(
        self,
        a1: float,
        a2: float,
        window: int = DEFAULT_WINDOW,
        n_limit: int = DEFAULT_N_LIMIT,
    ) -> ThresholdReport:
        """Smallest n0 such that every n in [n0, n0 + window] passes the spectral predicates."""
        self._check_annulus(a1, a2)
        q = self.q(a1, a2)
        failures = {"delta_positive": 0, "q_dominates": 0, "plus_increasing": 0, "minus_decreasing": 0}

        def evaluate(n: int) -> tuple[bool, float, float]:
            l11, l22, l12 = self._pair_lambdas(a1, a2, n)
            dominates = q - l11 - l22 > DEGENERACY_TOL * q
            if not dominates:
                failures["q_dominates"] += 1
            try:
                roots = self._roots(q, l11, l22, l12, n)
            except DegenerateSpectrumError:
                failures["delta_positive"] += 1
                return False, math.nan, math.nan
            return dominates, roots.omega_minus, roots.omega_plus

        run = 0
        previous = evaluate(1)
        for n in range(1, n_limit + window + 1):
            current = evaluate(n + 1)
            good = previous[0] and current[0]
            if good and not current[2] > previous[2]:
                failures["plus_increasing"] += 1
                good = False
            if good and not current[1] < previous[1]:
                failures["minus_decreasing"] += 1
                good = False
            run = run + 1 if good else 0
            if run == window:
                n0 = n - window + 1
                logger.info("threshold N(a1=%g, a2=%g) = %d over window %d", a1, a2, n0, window)
                return ThresholdReport(
                    n_threshold=n0,
                    window=window,
                    threshold_m=self.threshold_M(a1, a2),
                    checked={key: True for key in failures},
                )
            if n - run + 1 > n_limit:
                break
            previous = current
        raise ThresholdSearchError(
            f"no threshold N <= {n_limit} with a clean window of {window} for a1={a1}, a2={a2}",
            diagnostics={"failures": dict(failures), "n_limit": n_limit, "window": window},
        )

    def table(
        self,
        radii: Sequence[float],
        n_values: Sequence[int],
        crosscheck_tol: float | None = None,
        jobs: int = 1,
    ) -> SpectralTable:
        radii = tuple(float(r) for r in radii)
        if len(radii) == 1:
            pairs = {"aa": (radii[0], radii[0])}
        elif len(radii) == 2:
            a1, a2 = radii
            self._check_annulus(a1, a2)
            pairs = {"a1a1": (a1, a1), "a2a2": (a2, a2), "a1a2": (a1, a2)}
        else:
            raise ValueError("a spectral table takes one radius or an annulus (a1, a2)")

        def build(n: int) -> SpectralRow:
            return self._row(n, radii, pairs, crosscheck_tol)

        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                rows = tuple(pool.map(build, n_values))
        else:
            rows = tuple(build(n) for n in n_values)
        return SpectralTable(
            profile_spec=self.profile.to_spec(),
            radii=radii,
            rows=rows,
            threshold_m=self.threshold_M(radii[0], radii[-1]),
        )

    def _row(
        self,
        n: int,
        radii: tuple[float, ...],
        pairs: dict[str, tuple[float, float]],
        crosscheck_tol: float | None,
    ) -> SpectralRow:
        lambdas = {key: self.lambda_n(n, a, b) for key, (a, b) in pairs.items()}
        f_values = {key: lambdas[key] - self.leading_term(n, a, b) for key, (a, b) in pairs.items()}

        worst: float | None = None
        if crosscheck_tol is not None and not self.profile.is_constant:
            for a, b in pairs.values():
                if n >= self.contraction_start(a, b):
                    check = self.cross_check(n, a, b, crosscheck_tol)
                    worst = max(worst or 0.0, check.relative_error)
        elif crosscheck_tol is not None:
            worst = 0.0

        if len(radii) == 1:
            a = radii[0]
            q = self.q(a, 0.0)
            return SpectralRow(n, lambdas, f_values, q, omega=q - lambdas["aa"], crosscheck_error=worst)

        q = self.q(*radii)
        try:
            roots = self._roots(q, lambdas["a1a1"], lambdas["a2a2"], lambdas["a1a2"], n)
        except DegenerateSpectrumError as exc:
            logger.warning("%s", exc)
            delta = (q - lambdas["a1a1"] - lambdas["a2a2"]) ** 2 - 4.0 * lambdas["a1a2"] ** 2
            return SpectralRow(n, lambdas, f_values, q, delta=delta, crosscheck_error=worst, flag="degenerate")
        return SpectralRow(
            n,
            lambdas,
            f_values,
            q,
            omega_minus=roots.omega_minus,
            omega_plus=roots.omega_plus,
            delta=roots.delta,
            crosscheck_error=worst,
        )


@lru_cache(maxsize=8)
def _calculator(profile: DepthProfile) -> SpectralCalculator:
    return SpectralCalculator(profile, ModeGreenBank.for_profile(profile, r_out=8.0 * profile.r_inf))


def lambda_n(p: DepthProfile, n: int, alpha: float, beta: float, route: str = "green") -> float:
    return _calculator(p).lambda_n(n, alpha, beta, route)


def threshold_M(p: DepthProfile, alpha: float, beta: float) -> float:
    return _calculator(p).threshold_M(alpha, beta)


def omega_simply(p: DepthProfile, a: float, m: int) -> float:
    return _calculator(p).omega_simply(a, m)


def omega_doubly(p: DepthProfile, a1: float, a2: float, m: int) -> DoublyRoots:
    return _calculator(p).omega_doubly(a1, a2, m)


def find_threshold_N(p: DepthProfile, a1: float, a2: float, window: int = DEFAULT_WINDOW) -> ThresholdReport:
    return _calculator(p).find_threshold_N(a1, a2, window=window)


def matrix_Mn(p: DepthProfile, omega: float, a1: float, a2: float, n: int) -> MatrixMn:
    return _calculator(p).matrix_Mn(omega, a1, a2, n)


def kernel_generator(p: DepthProfile, a1: float, a2: float, m: int, branch: str) -> np.ndarray:
    return _calculator(p).kernel_generator(a1, a2, m, branch)
