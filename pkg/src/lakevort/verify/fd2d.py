﻿from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from ..depth.profiles import DepthProfile
from ..errors import SolverError
from ..logging_config import get_logger

logger = get_logger(__name__)

RESIDUAL_TOLERANCE = 1e-10

BoundaryData = Callable[[np.ndarray, np.ndarray], np.ndarray] | np.ndarray


@dataclass(frozen=True, eq=False)
class Grid2D:
    """Square node grid [-L, L]^2 with an odd node count so the origin is a node."""

    half_width: float
    n: int

    def __post_init__(self) -> None:
        if self.half_width <= 0.0:
            raise ValueError("half_width must be positive")
        if self.n < 5 or self.n % 2 == 0:
            raise ValueError(f"node count must be odd and >= 5, got {self.n}")

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / (self.n - 1)

    @cached_property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.n)

    @cached_property
    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.axis, self.axis, indexing="ij")

    def sample(self, func: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> np.ndarray:
        x, y = self.mesh
        return np.asarray(func(x, y), dtype=float)

    def integrate(self, table: np.ndarray) -> float:
        return float(np.sum(table) * self.h * self.h)

    def node_index(self, x: float, y: float) -> tuple[int, int]:
        i = int(round((x + self.half_width) / self.h))
        j = int(round((y + self.half_width) / self.h))
        return i, j


def _inverse_depth(profile: DepthProfile, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return 1.0 / profile.b(np.hypot(x, y))


def fd_solve_2d(profile: DepthProfile, grid: Grid2D, source: np.ndarray, boundary: BoundaryData) -> np.ndarray:
    """Solve -div(∇ψ/b) = source with Dirichlet data, 5-point flux form with 1/b at cell faces."""
    n, h = grid.n, grid.h
    source = np.asarray(source, dtype=float)
    if source.shape != (n, n):
        raise ValueError(f"source shape {source.shape} does not match the {n}x{n} grid")
    x, y = grid.mesh
    values = np.zeros((n, n))
    edge = np.zeros((n, n), dtype=bool)
    edge[0, :] = edge[-1, :] = edge[:, 0] = edge[:, -1] = True
    if callable(boundary):
        values[edge] = np.asarray(boundary(x[edge], y[edge]), dtype=float)
    else:
        values[edge] = np.asarray(boundary, dtype=float)[edge]

    inner = n - 2
    index = np.arange(inner * inner).reshape(inner, inner)
    xi, yi = x[1:-1, 1:-1], y[1:-1, 1:-1]
    faces = {
        (1, 0): _inverse_depth(profile, xi + h / 2, yi),
        (-1, 0): _inverse_depth(profile, xi - h / 2, yi),
        (0, 1): _inverse_depth(profile, xi, yi + h / 2),
        (0, -1): _inverse_depth(profile, xi, yi - h / 2),
    }
    diagonal = sum(faces.values()) / (h * h)
    rows = [index.ravel()]
    cols = [index.ravel()]
    entries = [diagonal.ravel()]
    rhs = source[1:-1, 1:-1].copy()

    for (di, dj), k in faces.items():
        ii = np.arange(inner)[:, None] + di
        jj = np.arange(inner)[None, :] + dj
        ii, jj = np.broadcast_arrays(ii, jj)
        interior = (ii >= 0) & (ii < inner) & (jj >= 0) & (jj < inner)
        coupling = k / (h * h)
        rows.append(index[interior])
        cols.append(index[ii[interior], jj[interior]])
        entries.append(-coupling[interior])
        rhs[~interior] += coupling[~interior] * values[ii[~interior] + 1, jj[~interior] + 1]

    matrix = sparse.csr_matrix(
        (np.concatenate(entries), (np.concatenate(rows), np.concatenate(cols))), shape=(inner * inner,) * 2
    )
    solution = spsolve(matrix.tocsc(), rhs.ravel())
    residual = matrix @ solution - rhs.ravel()
    scale = abs(matrix).max() * np.max(np.abs(solution)) + np.max(np.abs(rhs))
    if not np.all(np.isfinite(solution)) or np.max(np.abs(residual)) > RESIDUAL_TOLERANCE * max(scale, 1.0):
        raise SolverError(f"sparse solve residual {np.max(np.abs(residual)):.3e} exceeds tolerance")
    values[1:-1, 1:-1] = solution.reshape(inner, inner)
    logger.debug("fd solve n=%d h=%.4g residual %.2e", n, h, np.max(np.abs(residual)))
    return values


def observed_order(errors: list[float], spacings: list[float]) -> list[float]:
    """log(e_i / e_{i+1}) / log(h_i / h_{i+1}) for successive refinements."""
    return [
        float(np.log(errors[i] / errors[i + 1]) / np.log(spacings[i] / spacings[i + 1]))
        for i in range(len(errors) - 1)
    ]
