﻿from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Any

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from .errors import RadialRangeError

if TYPE_CHECKING:
    from .contour.fourier import FourierContour

_RANGE_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Strictly increasing radii in [r_min, r_out], r_min > 0."""

    nodes: np.ndarray

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 4:
            raise RadialRangeError("a radial grid needs at least 4 nodes")
        if nodes[0] <= 0.0:
            raise RadialRangeError(f"radial grid must start at r_min > 0, got {nodes[0]}")
        if np.any(np.diff(nodes) <= 0.0):
            raise RadialRangeError("radial grid nodes must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def geometric(cls, r_min: float, r_out: float, size: int) -> "RadialGrid":
        return cls(np.geomspace(r_min, r_out, size))

    @classmethod
    def uniform(cls, r_min: float, r_out: float, size: int) -> "RadialGrid":
        return cls(np.linspace(r_min, r_out, size))

    @property
    def r_min(self) -> float:
        return float(self.nodes[0])

    @property
    def r_out(self) -> float:
        return float(self.nodes[-1])

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    @cached_property
    def log_nodes(self) -> np.ndarray:
        return np.log(self.nodes)

    def contains(self, radii: np.ndarray | float) -> bool:
        r = np.asarray(radii, dtype=float)
        lo = self.r_min * (1.0 - _RANGE_SLACK)
        hi = self.r_out * (1.0 + _RANGE_SLACK)
        return bool(np.all((r >= lo) & (r <= hi)))

    def require(self, radii: np.ndarray | float, label: str = "radius") -> np.ndarray:
        r = np.asarray(radii, dtype=float)
        if not self.contains(r):
            raise RadialRangeError(
                f"{label} outside grid range [{self.r_min:.3e}, {self.r_out:.3e}]: "
                f"min={np.min(r):.6g}, max={np.max(r):.6g}"
            )
        return np.clip(r, self.r_min, self.r_out)

    def to_dict(self) -> dict[str, Any]:
        return {"r_min": self.r_min, "r_out": self.r_out, "size": self.size, "nodes": self.nodes.tolist()}


@dataclass(frozen=True, eq=False)
class RadialFunction:
    """Values of a radial function on a grid.

    With a derivative table the interpolant is a cubic Hermite spline in log r,
    otherwise a not-a-knot cubic spline in log r. ``decay_exponent`` records the
    power law r**(-k) continuing the function beyond the outer radius, when known.
    """

    grid: RadialGrid
    values: np.ndarray
    derivatives: np.ndarray | None = None
    decay_exponent: int | None = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.nodes.shape:
            raise ValueError(f"values shape {values.shape} does not match grid size {self.grid.size}")
        if not np.all(np.isfinite(values)):
            raise ValueError("radial function values must be finite")
        object.__setattr__(self, "values", values)
        if self.derivatives is not None:
            derivatives = np.asarray(self.derivatives, dtype=float)
            if derivatives.shape != values.shape:
                raise ValueError("derivative table must match the values table")
            object.__setattr__(self, "derivatives", derivatives)

    @cached_property
    def _spline(self) -> CubicHermiteSpline | CubicSpline:
        s = self.grid.log_nodes
        if self.derivatives is not None:
            return CubicHermiteSpline(s, self.values, self.derivatives * self.grid.nodes)
        return CubicSpline(s, self.values)

    def __call__(self, radii: np.ndarray | float) -> np.ndarray:
        r = self.grid.require(radii)
        return self._spline(np.log(r))

    def derivative(self, radii: np.ndarray | float) -> np.ndarray:
        r = self.grid.require(radii)
        return self._spline(np.log(r), 1) / r

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def scaled(self, factor: float) -> "RadialFunction":
        derivatives = None if self.derivatives is None else factor * self.derivatives
        return RadialFunction(self.grid, factor * self.values, derivatives, self.decay_exponent)


@dataclass(frozen=True)
class DoublyRoots:
    omega_minus: float
    omega_plus: float
    delta: float

    def select(self, branch: str) -> float:
        if branch == "plus":
            return self.omega_plus
        if branch == "minus":
            return self.omega_minus
        raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}")


@dataclass(frozen=True)
class MatrixMn:
    n: int
    omega: float
    matrix: tuple[tuple[float, float], tuple[float, float]]
    det: float

    def as_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=float)


@dataclass(frozen=True)
class LambdaCrossCheck:
    n: int
    alpha: float
    beta: float
    green: float
    fixed_point: float
    relative_error: float


@dataclass(frozen=True)
class ThresholdReport:
    n_threshold: int
    window: int
    threshold_m: float
    checked: dict[str, bool]


@dataclass(frozen=True)
class SpectralRow:
    n: int
    lambdas: dict[str, float]
    f_values: dict[str, float]
    q_value: float
    omega: float | None = None
    omega_minus: float | None = None
    omega_plus: float | None = None
    delta: float | None = None
    crosscheck_error: float | None = None
    flag: str | None = None

    def to_record(self) -> dict[str, Any]:
        record: dict[str, Any] = {"n": self.n}
        for key, value in self.lambdas.items():
            record[f"Lambda_{key}"] = value
        for key, value in self.f_values.items():
            record[f"f_n_{key}"] = value
        record["Q"] = self.q_value
        if self.omega is not None:
            record["Omega"] = self.omega
        if self.delta is not None or self.flag is not None:
            record["Omega_minus"] = self.omega_minus
            record["Omega_plus"] = self.omega_plus
            record["Delta"] = self.delta
        if self.crosscheck_error is not None:
            record["crosscheck_rel_error"] = self.crosscheck_error
        if self.flag is not None:
            record["flag"] = self.flag
        return record


@dataclass(frozen=True)
class SpectralTable:
    profile_spec: dict[str, Any]
    radii: tuple[float, ...]
    rows: tuple[SpectralRow, ...]
    threshold_m: float

    def records(self) -> list[dict[str, Any]]:
        return [row.to_record() for row in self.rows]


@dataclass(frozen=True, eq=False)
class StreamSample:
    psi: np.ndarray
    dpsi_dr: np.ndarray
    dpsi_dtheta: np.ndarray


@dataclass(frozen=True, eq=False)
class BoundaryStream:
    theta: np.ndarray
    psi: np.ndarray
    dpsi_dtheta: np.ndarray


@dataclass(frozen=True, eq=False)
class FunctionalValue:
    """Pointwise values of F (or G_k) and their sin/cos(kmθ) projections.

    ``sine[c][k-1]`` and ``cosine[c][k-1]`` hold the coefficients of component c
    for k = 1..K; ``mean[c]`` is the θ-average.
    """

    theta: np.ndarray
    values: tuple[np.ndarray, ...]
    sine: tuple[np.ndarray, ...]
    cosine: tuple[np.ndarray, ...]
    mean: tuple[float, ...]

    def residual_vector(self) -> np.ndarray:
        return np.concatenate(self.sine)

    def projection_inf(self) -> float:
        return float(max(np.max(np.abs(s)) for s in self.sine))

    def pointwise_inf(self) -> float:
        return float(max(np.max(np.abs(v)) for v in self.values))


@dataclass(frozen=True)
class MultiplierRow:
    n: int
    component: str
    analytic: float
    finite_difference: float
    absolute_error: float
    relative_error: float


@dataclass(frozen=True)
class BranchStep:
    amplitude: float
    omega: float
    contours: tuple["FourierContour", ...]
    residual_inf: float
    iterations: int
    tail_ratio: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "amplitude": self.amplitude,
            "omega": self.omega,
            "residual_inf": self.residual_inf,
            "iterations": self.iterations,
            "tail_ratio": self.tail_ratio,
            "contours": [contour.to_dict() for contour in self.contours],
        }


@dataclass(frozen=True)
class VStateBranch:
    m: int
    label: str
    bifurcation_omega: float
    steps: tuple[BranchStep, ...]
    truncated: bool = False
    diagnostic: str | None = None
    k_flagged: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "m": self.m,
            "label": self.label,
            "bifurcation_omega": self.bifurcation_omega,
            "truncated": self.truncated,
            "diagnostic": self.diagnostic,
            "k_flagged": self.k_flagged,
            "steps": [step.to_dict() for step in self.steps],
        }


@dataclass(frozen=True)
class CheckResult:
    check: str
    params: dict[str, Any]
    value: float
    tolerance: float
    passed: bool
    details: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "check": self.check,
            "params": self.params,
            "value": self.value,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "details": self.details,
        }
