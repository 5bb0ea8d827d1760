﻿from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any

import numpy as np
from scipy.interpolate import CubicSpline

from ..errors import ProfileError
from ..logging_config import get_logger

logger = get_logger(__name__)

_ASSUMPTION_SAMPLES = 4001


class DepthFamily(str, Enum):
    CONSTANT = "constant"
    BUMP = "bump"
    TABLE = "table"


@dataclass(frozen=True, eq=False)
class DepthProfile:
    """Radial depth b(r), positive, equal to ``b_inf`` for r >= ``r_inf``."""

    family: DepthFamily
    b_inf: float
    r_inf: float
    amp: float = 0.0
    table: tuple[tuple[float, float], ...] = field(default=())

    @property
    def is_constant(self) -> bool:
        return self.family is DepthFamily.CONSTANT

    @cached_property
    def key(self) -> tuple[Any, ...]:
        return (self.family.value, self.b_inf, self.r_inf, self.amp, self.table)

    @cached_property
    def _table_spline(self) -> CubicSpline:
        knots = np.array(self.table, dtype=float)
        return CubicSpline(knots[:, 0], knots[:, 1], bc_type=((1, 0.0), (1, 0.0)))

    def b(self, r: np.ndarray | float) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.family is DepthFamily.CONSTANT:
            return np.full_like(r, self.b_inf)
        inside = r < self.r_inf
        if self.family is DepthFamily.BUMP:
            x = np.where(inside, r / self.r_inf, 1.0)
            return self.b_inf + self.amp * (1.0 - x * x) ** 3
        return np.where(inside, self._table_spline(np.where(inside, r, 0.0)), self.b_inf)

    def db(self, r: np.ndarray | float) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.family is DepthFamily.CONSTANT:
            return np.zeros_like(r)
        inside = r < self.r_inf
        if self.family is DepthFamily.BUMP:
            x = np.where(inside, r / self.r_inf, 1.0)
            return -6.0 * self.amp * x * (1.0 - x * x) ** 2 / self.r_inf
        return np.where(inside, self._table_spline(np.where(inside, r, 0.0), 1), 0.0)

    def d2b(self, r: np.ndarray | float) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.family is DepthFamily.CONSTANT:
            return np.zeros_like(r)
        inside = r < self.r_inf
        if self.family is DepthFamily.BUMP:
            x = np.where(inside, r / self.r_inf, 1.0)
            return -6.0 * self.amp * (1.0 - x * x) * (1.0 - 5.0 * x * x) / self.r_inf**2
        return np.where(inside, self._table_spline(np.where(inside, r, 0.0), 2), 0.0)

    def b_scalar(self, r: float) -> float:
        return float(self.b(r))

    def to_spec(self) -> dict[str, Any]:
        spec: dict[str, Any] = {"family": self.family.value, "b_inf": self.b_inf, "r_inf": self.r_inf}
        if self.family is DepthFamily.BUMP:
            spec["amp"] = self.amp
        if self.family is DepthFamily.TABLE:
            spec["table"] = [list(row) for row in self.table]
        return spec

    def check_assumptions(self, samples: int = _ASSUMPTION_SAMPLES) -> dict[str, float | bool]:
        r = np.linspace(0.0, 2.0 * self.r_inf, samples)
        b = self.b(r)
        plateau = r >= self.r_inf
        plateau_dev = float(
            np.max(np.abs(b[plateau] - self.b_inf))
            + np.max(np.abs(self.db(r[plateau])))
            + np.max(np.abs(self.d2b(r[plateau])))
        )
        eps = 1e-9 * self.r_inf
        left, right = self.r_inf - eps, self.r_inf + eps
        jumps = {
            "jump_b": float(abs(self.b(left) - self.b(right))),
            "jump_db": float(abs(self.db(left) - self.db(right))),
            "jump_d2b": float(abs(self.d2b(left) - self.d2b(right))),
        }
        return {
            "min_b": float(np.min(b)),
            "positive": bool(np.min(b) > 0.0),
            "plateau_deviation": plateau_dev,
            "plateau_ok": plateau_dev == 0.0,
            **jumps,
        }


def make_constant_profile(b_inf: float, r_inf: float = 1.0) -> DepthProfile:
    if not b_inf > 0.0:
        raise ProfileError(f"b_inf must be positive, got {b_inf}")
    if not r_inf > 0.0:
        raise ProfileError(f"r_inf must be positive, got {r_inf}")
    return DepthProfile(DepthFamily.CONSTANT, float(b_inf), float(r_inf))


def make_bump_profile(b_inf: float, amp: float, r_inf: float) -> DepthProfile:
    if not b_inf > 0.0:
        raise ProfileError(f"b_inf must be positive, got {b_inf}")
    if not r_inf > 0.0:
        raise ProfileError(f"r_inf must be positive, got {r_inf}")
    if not amp > -b_inf:
        raise ProfileError(f"amp={amp} makes b(0) = b_inf + amp <= 0")
    if amp == 0.0:
        return make_constant_profile(b_inf, r_inf)
    return DepthProfile(DepthFamily.BUMP, float(b_inf), float(r_inf), amp=float(amp))


def make_table_profile(
    table: list[list[float]] | tuple[tuple[float, float], ...],
    b_inf: float | None = None,
    r_inf: float | None = None,
) -> DepthProfile:
    """Tabulated depth; the last knot is the plateau, so b_inf and r_inf, when given, must match it."""
    knots = np.asarray(table, dtype=float)
    if knots.ndim != 2 or knots.shape[1] != 2 or knots.shape[0] < 3:
        raise ProfileError("table must be a list of at least three [r, b] pairs")
    r, b = knots[:, 0], knots[:, 1]
    if r[0] != 0.0:
        raise ProfileError("table must start at r = 0")
    if np.any(np.diff(r) <= 0.0):
        raise ProfileError("table radii must be strictly increasing")
    if np.any(b <= 0.0):
        raise ProfileError("table depths must be positive")
    for name, given, knot in (("b_inf", b_inf, b[-1]), ("r_inf", r_inf, r[-1])):
        if given is not None and not math.isclose(float(given), float(knot), rel_tol=1e-12, abs_tol=1e-12):
            raise ProfileError(f"{name}={given} disagrees with the last table knot ({knot:.12g})")

    profile = DepthProfile(
        DepthFamily.TABLE,
        b_inf=float(b[-1]),
        r_inf=float(r[-1]),
        table=tuple((float(x), float(y)) for x, y in knots),
    )
    diagnostics = profile.check_assumptions()
    if not diagnostics["positive"]:
        raise ProfileError(f"interpolated table depth is not positive (min b = {diagnostics['min_b']:.6g})")
    if diagnostics["jump_d2b"] > 1e-8:
        logger.warning("tabulated depth has a b'' jump of %.3e at r_inf=%.6g", diagnostics["jump_d2b"], profile.r_inf)
    return profile


def profile_from_spec(spec: dict[str, Any] | str) -> DepthProfile:
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise ProfileError(f"profile JSON is malformed: {exc}") from exc
    if not isinstance(spec, dict):
        raise ProfileError("profile spec must be a JSON object")

    family = str(spec.get("family", "")).strip().lower()
    try:
        if family == DepthFamily.CONSTANT.value:
            return make_constant_profile(float(spec.get("b_inf", 1.0)), float(spec.get("r_inf", 1.0)))
        if family == DepthFamily.BUMP.value:
            return make_bump_profile(float(spec["b_inf"]), float(spec["amp"]), float(spec["r_inf"]))
        if family == DepthFamily.TABLE.value:
            return make_table_profile(spec["table"], spec.get("b_inf"), spec.get("r_inf"))
    except KeyError as exc:
        raise ProfileError(f"profile family {family!r} is missing key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ProfileError(f"profile spec has a non-numeric value: {exc}") from exc
    raise ProfileError(f"unknown profile family {family!r}; expected constant, bump or table")
