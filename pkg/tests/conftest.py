﻿from __future__ import annotations

import numpy as np
import pytest

from lakevort.depth import DepthProfile, make_bump_profile, make_constant_profile
from lakevort.models import RadialFunction, RadialGrid
from lakevort.radialgreen import ModeGreenBank
from lakevort.spectral import SpectralCalculator


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch: pytest.MonkeyPatch) -> None:
    for name in (
        "LAKEVORT_R_OUT",
        "LAKEVORT_N_R",
        "LAKEVORT_THETA_N",
        "LAKEVORT_L_MAX_FACTOR",
        "LAKEVORT_NEWTON_TOL",
        "LAKEVORT_QUAD_TOL",
        "LAKEVORT_CROSSCHECK_TOL",
        "LAKEVORT_JOBS",
        "LAKEVORT_FORCE",
        "LAKEVORT_OUTPUT_DIR",
        "LAKEVORT_LOG",
    ):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture(scope="session")
def flat() -> DepthProfile:
    return make_constant_profile(1.0)


@pytest.fixture(scope="session")
def bump() -> DepthProfile:
    return make_bump_profile(1.0, 0.5, 2.0)


@pytest.fixture(scope="session")
def flat_bank(flat: DepthProfile) -> ModeGreenBank:
    return ModeGreenBank.for_profile(flat, r_out=4.0)


@pytest.fixture(scope="session")
def bump_bank(bump: DepthProfile) -> ModeGreenBank:
    return ModeGreenBank.for_profile(bump, r_out=8.0)


@pytest.fixture(scope="session")
def flat_calculator(flat: DepthProfile, flat_bank: ModeGreenBank) -> SpectralCalculator:
    return SpectralCalculator(flat, flat_bank)


@pytest.fixture(scope="session")
def bump_calculator(bump: DepthProfile, bump_bank: ModeGreenBank) -> SpectralCalculator:
    return SpectralCalculator(bump, bump_bank)


def smooth_disc_source(grid: RadialGrid) -> RadialFunction:
    """(1 - r^2)^3 on r < 1, zero outside; ∫ f r dr = 1/8."""
    r = grid.nodes
    return RadialFunction(grid, np.where(r < 1.0, (1.0 - r * r) ** 3, 0.0))
