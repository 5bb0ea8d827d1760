﻿from __future__ import annotations

import math

import numpy as np
import pytest

from lakevort.config import RunConfig
from lakevort.contour import FourierContour, PatchPotential
from lakevort.depth import DepthProfile
from lakevort.errors import ConfigError
from lakevort.models import BranchStep
from lakevort.radialgreen import ModeGreenBank
from lakevort.verify import (
    Grid2D,
    ModeSumSolution,
    VerificationSuite,
    bump_source,
    decomposition_check,
    fd_solve_2d,
    log_identity_check,
    observed_order,
    rigid_rotation_check,
    self_adjointness_check,
)


def _disc_source(r: float) -> float:
    return (1.0 - r * r) ** 3


@pytest.mark.parametrize(
    ("n", "x", "y", "theta"),
    [(2, 0.5, 1.0, math.pi / 4), (3, 0.4, 1.0, 0.0), (8, 0.9, 1.0, 1.0), (1, 1.0, 0.1, 0.3)],
)
def test_log_identity_off_diagonal(n: int, x: float, y: float, theta: float) -> None:
    assert log_identity_check(n, x, y, theta) <= 1e-12


def test_log_identity_on_diagonal_converges_slowly() -> None:
    assert log_identity_check(1, 1.0, 1.0, 0.0) <= 1e-3
    assert log_identity_check(1, 1.0, 1.0, 0.0, nodes=16384) < log_identity_check(1, 1.0, 1.0, 0.0, nodes=1024)


def test_log_identity_rejects_mode_zero() -> None:
    with pytest.raises(ValueError):
        log_identity_check(0, 0.5, 1.0, 0.0)


def test_bump_source_has_unit_mass() -> None:
    grid = Grid2D(1.0, 201)
    assert grid.integrate(grid.sample(bump_source((0.1, -0.2), 0.5))) == pytest.approx(1.0, abs=1e-4)


def test_grid_requires_odd_node_count() -> None:
    with pytest.raises(ValueError):
        Grid2D(1.0, 64)
    grid = Grid2D(2.0, 9)
    assert grid.h == pytest.approx(0.5)
    assert grid.node_index(0.0, 0.0) == (4, 4)


def test_fd_solver_is_exact_on_quadratics(flat: DepthProfile) -> None:
    grid = Grid2D(1.0, 21)
    exact = grid.sample(lambda x, y: x * x + 2.0 * y * y)
    solution = fd_solve_2d(flat, grid, np.full((grid.n, grid.n), -6.0), lambda x, y: x * x + 2.0 * y * y)
    np.testing.assert_allclose(solution, exact, atol=1e-10)


def test_fd_solver_rejects_shape_mismatch(flat: DepthProfile) -> None:
    grid = Grid2D(1.0, 11)
    with pytest.raises(ValueError):
        fd_solve_2d(flat, grid, np.zeros((9, 9)), np.zeros((11, 11)))


def test_observed_order_of_second_order_errors() -> None:
    assert observed_order([4e-2, 1e-2, 2.5e-3], [0.2, 0.1, 0.05]) == pytest.approx([2.0, 2.0])


def test_self_adjointness_identical_sources(bump: DepthProfile) -> None:
    grid = Grid2D(2.0, 41)
    table = grid.sample(bump_source((0.3, 0.0), 0.8))
    table = table / grid.integrate(table)
    boundary = np.zeros((grid.n, grid.n))
    assert self_adjointness_check(bump, grid, table, table, boundary, boundary) == 0.0


def test_self_adjointness_homogeneous_boundary(bump: DepthProfile) -> None:
    grid = Grid2D(2.0, 41)
    tables = []
    for center in ((0.4, 0.0), (-0.3, 0.35)):
        table = grid.sample(bump_source(center, 0.8))
        tables.append(table / grid.integrate(table))
    boundary = np.zeros((grid.n, grid.n))
    assert self_adjointness_check(bump, grid, tables[0], tables[1], boundary, boundary) <= 1e-12


def test_self_adjointness_requires_unit_mass(flat: DepthProfile) -> None:
    grid = Grid2D(1.0, 21)
    table = grid.sample(bump_source((0.0, 0.0), 0.5))
    with pytest.raises(ValueError):
        self_adjointness_check(flat, grid, 2.0 * table / grid.integrate(table), table, np.zeros_like(table), np.zeros_like(table))


def test_decomposition_is_trivial_for_constant_depth(flat: DepthProfile) -> None:
    assert decomposition_check(flat, _disc_source, 1.0, rtol=1e-12) <= 1e-9
    assert decomposition_check(flat, _disc_source, 1.0, rtol=1e-12, route="reference") <= 1e-10


def test_decomposition_holds_for_bump(bump: DepthProfile) -> None:
    assert decomposition_check(bump, _disc_source, 1.0, rtol=1e-12) <= 1e-8
    assert decomposition_check(bump, lambda r: 1.0, 1.0, rtol=1e-12, route="reference") <= 1e-8


@pytest.mark.parametrize("n", [1, 2, 5])
def test_decomposition_of_angular_modes(bump: DepthProfile, n: int) -> None:
    assert decomposition_check(bump, _disc_source, 1.0, n=n) <= 1e-8


def test_decomposition_gap_scales_with_source(bump: DepthProfile) -> None:
    single = decomposition_check(bump, lambda r: 1.0, 1.0, rtol=1e-12, route="reference")
    double = decomposition_check(bump, lambda r: 2.0, 1.0, rtol=1e-12, route="reference")
    assert double <= 2.0 * single + 1e-10


def test_decomposition_rejects_unknown_routes(bump: DepthProfile) -> None:
    with pytest.raises(ValueError):
        decomposition_check(bump, _disc_source, 1.0, route="guess")
    with pytest.raises(ValueError):
        decomposition_check(bump, _disc_source, 1.0, route="reference", n=2)


def test_mode_sum_of_radial_source(flat_bank: ModeGreenBank) -> None:
    def source(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        r2 = x * x + y * y
        return np.where(r2 < 1.0, (1.0 - r2) ** 3, 0.0)

    solution = ModeSumSolution(flat_bank, source, l_max=8, n_theta=64)
    assert solution.mode_count == 0
    assert float(solution(np.array(2.0), np.array(0.0))) == pytest.approx(-math.log(2.0) / 8.0, rel=1e-6)
    with pytest.raises(ValueError):
        ModeSumSolution(flat_bank, source, l_max=40, n_theta=64)


def test_mode_sum_keeps_offset_source_modes(flat_bank: ModeGreenBank) -> None:
    solution = ModeSumSolution(flat_bank, bump_source((0.3, 0.2), 0.6), l_max=16)
    assert solution.mode_count > 0
    sample = solution.polar(np.array([3.0]), np.array([0.5]))
    # A radial bump of unit mass acts as a point mass at its centre outside the support.
    distance = math.hypot(3.0 * math.cos(0.5) - 0.3, 3.0 * math.sin(0.5) - 0.2)
    assert float(sample.psi[0]) == pytest.approx(-math.log(distance) / (2.0 * math.pi), abs=1e-5)


def test_rigid_rotation_of_trivial_disc(flat_bank: ModeGreenBank) -> None:
    potential = PatchPotential(flat_bank, l_max=12)
    step = BranchStep(0.0, 0.3, (FourierContour.trivial(1.0, 3, 2),), 0.0, 0)
    assert rigid_rotation_check(potential, step, duration=1.0, dt=0.01, markers=32) <= 1e-9


def test_rigid_rotation_detects_wrong_velocity(flat_bank: ModeGreenBank) -> None:
    potential = PatchPotential(flat_bank, l_max=12)
    step = BranchStep(0.02, 0.0, (FourierContour(1.0, 3, (0.02,)),), 0.0, 0)
    assert rigid_rotation_check(potential, step, duration=1.0, dt=0.1, markers=32) > 1e-3


def test_suite_selection() -> None:
    suite = VerificationSuite(RunConfig())
    assert suite.select("all") == list(suite.checks)
    assert suite.select("log-identity, multiplier") == ["log-identity", "multiplier"]
    with pytest.raises(ConfigError):
        suite.select("log-identity,telepathy")


def test_suite_log_identity_passes() -> None:
    results = VerificationSuite(RunConfig()).run("log-identity")
    assert [result.check for result in results] == ["log-identity", "log-identity-diagonal"]
    assert all(result.passed for result in results)
    assert results[0].to_dict()["pass"] is True


def test_suite_decomposition_on_bump() -> None:
    config = RunConfig(profile={"family": "bump", "b_inf": 1.0, "amp": 0.5, "r_inf": 2.0})
    results = VerificationSuite(config).run("decomposition")
    assert [result.check for result in results] == ["decomposition", "decomposition", "decomposition-reference"]
    assert [result.params["mode"] for result in results] == [0, 2, 0]
    assert all(result.passed for result in results)


@pytest.mark.slow
def test_full_suite_on_constant_depth() -> None:
    results = VerificationSuite(RunConfig()).run("all", jobs=2)
    failed = [result.to_dict() for result in results if not result.passed]
    assert not failed


@pytest.mark.slow
def test_suite_multiplier_covers_doubly_rows_up_to_mode_eight() -> None:
    results = VerificationSuite(RunConfig()).run("multiplier")
    assert [result.check for result in results] == ["multiplier", "multiplier-doubly"]
    assert len(results[0].details["rows"]) == 8
    assert len(results[1].details["rows"]) == 32
    assert {row["n"] for row in results[1].details["rows"]} == set(range(1, 9))
    assert all(result.passed for result in results)
