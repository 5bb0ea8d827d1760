﻿from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import linalg, sparse
from scipy.linalg import lapack

from ..depth import DepthProfile, theta_sup, theta_values
from ..errors import NystromSingularError
from ..logging_config import get_logger
from ..models import RadialFunction, RadialGrid
from .kernels import log_distance

logger = get_logger(__name__)

NODES_PER_WIDTH = 5
MAX_SPACING = 0.05
GAUSS_ORDER = 8
DECAY_LENGTH = 36.0
CONDITION_LIMIT = 1e12
_BREAK_GAP = 1e-12


@dataclass(frozen=True, eq=False)
class _ProductRule:
    """Quadratic product integration in x = log r.

    Panels are consecutive pairs of intervals; every interval carries its own
    Gauss-Legendre points, so a kernel kink at any node is integrated exactly.
    """

    x: np.ndarray
    t: np.ndarray
    w: np.ndarray
    basis: sparse.csr_matrix

    @classmethod
    def build(cls, x: np.ndarray, order: int = GAUSS_ORDER) -> "_ProductRule":
        gx, gw = leggauss(order)
        left, right = x[:-1], x[1:]
        mid = 0.5 * (left + right)
        half = 0.5 * (right - left)
        t = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
        w = (half[:, None] * gw[None, :]).ravel()

        interval = np.repeat(np.arange(x.size - 1), order)
        first = 2 * (interval // 2)
        x0, x1, x2 = x[first], x[first + 1], x[first + 2]
        lagrange = np.stack(
            [
                (t - x1) * (t - x2) / ((x0 - x1) * (x0 - x2)),
                (t - x0) * (t - x2) / ((x1 - x0) * (x1 - x2)),
                (t - x0) * (t - x1) / ((x2 - x0) * (x2 - x1)),
            ],
            axis=1,
        )
        rows = np.repeat(np.arange(t.size), 3)
        cols = (first[:, None] + np.arange(3)[None, :]).ravel()
        basis = sparse.csr_matrix((lagrange.ravel(), (rows, cols)), shape=(t.size, x.size))
        return cls(x, t, w, basis)

    def kernel(self, n: int, targets: np.ndarray) -> np.ndarray:
        """exp(-n |t - y|) for every target y (rows) and quadrature point t (columns)."""
        return np.exp(-n * np.abs(self.t[None, :] - targets[:, None]))

    def operator(self, kernel: np.ndarray, weight: np.ndarray) -> np.ndarray:
        """Rows y: ∫ exp(-n|x - y|) weight(x) g(x) dx as a linear map on nodal g."""
        return np.asarray((self.basis.T @ (kernel * (self.w * weight)[None, :]).T).T)


def _log_nodes(breaks: np.ndarray, spacing: float) -> np.ndarray:
    pieces = [breaks[:1]]
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        panels = max(1, math.ceil((hi - lo) / (2.0 * spacing)))
        pieces.append(np.linspace(lo, hi, 2 * panels + 1)[1:])
    return np.concatenate(pieces)


def _breaks(r_lo: float, r_hi: float, radii: np.ndarray) -> np.ndarray:
    inside = np.log(radii[(radii > r_lo) & (radii < r_hi)])
    points = np.unique(np.concatenate([[math.log(r_lo), math.log(r_hi)], inside]))
    keep = np.concatenate([[True], np.diff(points) > _BREAK_GAP])
    return points[keep]


def fn_fixed_point(
    p: DepthProfile,
    n: int,
    alpha: float,
    betas: Sequence[float],
    nodes_per_width: int = NODES_PER_WIDTH,
) -> RadialFunction:
    """Solve the second-kind identity for f_n(α, ·).

        f_n(α, β) = -√(b(α) b(β))/(4n²) ∫ Θ(r) √b(r) 𝚖^n(r, α) 𝚖^n(r, β) dr
                    - √b(β)/(2n) ∫ Θ(r) 𝚖^n(r, β) f_n(α, r) dr

    Θ vanishes beyond R∞, so the unknowns live on [r_lo, R∞] with
    r_lo = min(α, β, R∞)·exp(-36/n); β > R∞ is recovered from the identity
    itself. The grid is uniform in log r with spacing at most 1/(5n), and α,
    R∞ and every β inside the range are panel edges.
    """
    betas = np.unique(np.atleast_1d(np.asarray(betas, dtype=float)))
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if np.any(betas <= 0.0) or alpha <= 0.0:
        raise ValueError("radii must be positive")

    if p.is_constant:
        radii = np.union1d(np.geomspace(0.5 * betas[0], 2.0 * betas[-1], 8), betas)
        return RadialFunction(RadialGrid(radii), np.zeros_like(radii))

    r_hi = p.r_inf
    r_lo = min(alpha, float(betas[0]), r_hi) * math.exp(-DECAY_LENGTH / n)
    spacing = min(MAX_SPACING, 1.0 / (nodes_per_width * n))
    x = _log_nodes(_breaks(r_lo, r_hi, np.append(betas, alpha)), spacing)
    rule = _ProductRule.build(x)

    extra = betas[betas > r_hi]
    targets = np.concatenate([x, np.log(extra)])
    kernel = rule.kernel(n, targets)

    r_t = np.exp(rule.t)
    theta_t = theta_values(p, r_t) * r_t
    sqrt_b_alpha = math.sqrt(p.b_scalar(alpha))
    sqrt_b = np.sqrt(p.b(np.exp(targets)))

    lead_weight = theta_t * np.sqrt(p.b(r_t)) * np.exp(-n * np.abs(rule.t - math.log(alpha)))
    source = -sqrt_b_alpha * sqrt_b / (4.0 * n * n) * (kernel @ (rule.w * lead_weight))
    coupling = (sqrt_b / (2.0 * n))[:, None] * rule.operator(kernel, theta_t)

    size = x.size
    system = np.eye(size) + coupling[:size]
    lu, pivots = linalg.lu_factor(system)
    rcond, _ = lapack.dgecon(lu, np.max(np.sum(np.abs(system), axis=0)), norm="1")
    condition = 1.0 / rcond if rcond > 0.0 else math.inf
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        threshold = max(alpha, float(betas[-1]), r_hi) * theta_sup(p) / 2.0
        raise NystromSingularError(
            f"Nyström matrix for n={n} is singular (cond={condition:.3e}); "
            f"solvability is guaranteed only for n >= {threshold:.3f}"
        )
    values = linalg.lu_solve((lu, pivots), source[:size])
    if extra.size:
        values = np.concatenate([values, source[size:] - coupling[size:] @ values])

    radii = np.exp(targets)
    for beta in betas:
        radii[np.argmin(np.abs(targets - math.log(beta)))] = beta

    logger.debug("f_n Nyström n=%d alpha=%.6g nodes=%d cond=%.3e", n, alpha, size, condition)
    return RadialFunction(RadialGrid(radii), values)


def fn_bound(p: DepthProfile, n: int, alpha: float, beta: float) -> float:
    """2A √b(β) 𝚖^n/n² (δ_{αβ}(1/n - 1) + 1) ‖Θ‖∞."""
    upper = max(alpha, beta, p.r_inf)
    delta = 1.0 if alpha == beta else 0.0
    decay = np.exp(-n * float(log_distance(alpha, beta)))
    return float(2.0 * upper * np.sqrt(p.b(beta)) * decay / n**2 * (delta * (1.0 / n - 1.0) + 1.0) * theta_sup(p))
