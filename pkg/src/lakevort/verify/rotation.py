﻿from __future__ import annotations

import math

import numpy as np

from ..contour import PatchPotential
from ..contour.potential import Patch
from ..logging_config import get_logger
from ..models import BranchStep

logger = get_logger(__name__)


def step_patches(step: BranchStep) -> tuple[Patch, ...]:
    if len(step.contours) == 1:
        return ((step.contours[0], 1.0),)
    return ((step.contours[0], 1.0), (step.contours[1], -1.0))


def rigid_rotation_check(
    potential: PatchPotential, step: BranchStep, duration: float, dt: float, markers: int = 64
) -> float:
    """Advect boundary markers with RK4 and compare with the boundary rotated by Ω·duration.

    Returns the largest radial gap between each marker and its own contour at the
    marker's final angle, so tangential sliding along the boundary is not counted.
    """
    patches = step_patches(step)
    theta = 2.0 * math.pi * np.arange(markers) / markers
    owners = np.repeat(np.arange(len(step.contours)), markers)
    x = np.concatenate([contour.boundary_points(theta)[0] for contour in step.contours])
    y = np.concatenate([contour.boundary_points(theta)[1] for contour in step.contours])

    count = max(1, math.ceil(duration / dt))
    h = duration / count

    def velocity(px: np.ndarray, py: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return potential.velocity(patches, px, py)

    for _ in range(count):
        k1 = velocity(x, y)
        k2 = velocity(x + 0.5 * h * k1[0], y + 0.5 * h * k1[1])
        k3 = velocity(x + 0.5 * h * k2[0], y + 0.5 * h * k2[1])
        k4 = velocity(x + h * k3[0], y + h * k3[1])
        x = x + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        y = y + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])

    radius = np.hypot(x, y)
    angle = np.arctan2(y, x) - step.omega * duration
    deviation = 0.0
    for index, contour in enumerate(step.contours):
        mine = owners == index
        gap = np.abs(radius[mine] - contour.radius(angle[mine]))
        deviation = max(deviation, float(np.max(gap)))
    logger.info("rigid rotation over T=%.4g with %d RK4 steps: max deviation %.3e", duration, count, deviation)
    return deviation
