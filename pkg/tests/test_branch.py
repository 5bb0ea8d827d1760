﻿from __future__ import annotations

import math

import numpy as np
import pytest

from lakevort.branch import BranchContinuation, NewtonSettings, damped_newton, fd_jacobian
from lakevort.contour import ContourFunctional
from lakevort.depth import DepthProfile
from lakevort.errors import NewtonConvergenceError
from lakevort.models import BranchStep
from lakevort.radialgreen import ModeGreenBank
from lakevort.spectral import SpectralCalculator


@pytest.fixture(scope="module")
def flat_continuation(
    flat: DepthProfile, flat_bank: ModeGreenBank, flat_calculator: SpectralCalculator
) -> BranchContinuation:
    functional = ContourFunctional(flat, flat_bank, theta_n=128)
    return BranchContinuation(functional, flat_calculator, NewtonSettings(tol=1e-10))


@pytest.fixture(scope="module")
def bump_continuation(
    bump: DepthProfile, bump_bank: ModeGreenBank, bump_calculator: SpectralCalculator
) -> BranchContinuation:
    functional = ContourFunctional(bump, bump_bank, theta_n=128)
    return BranchContinuation(functional, bump_calculator, NewtonSettings(tol=1e-10))


def test_damped_newton_solves_scalar_equation() -> None:
    result = damped_newton(lambda x: x**2 - 2.0, np.array([1.0]), 1e-7, NewtonSettings(tol=1e-12))
    assert result.x[0] == pytest.approx(math.sqrt(2.0), rel=1e-10)
    assert result.residual_inf <= 1e-12
    assert result.iterations >= 1


def test_damped_newton_reports_failure() -> None:
    with pytest.raises(NewtonConvergenceError) as info:
        damped_newton(lambda x: x**2 + 1.0, np.array([1.0]), 1e-7, NewtonSettings())
    assert info.value.residual >= 1.0


def test_fd_jacobian_of_linear_map() -> None:
    matrix = np.array([[2.0, -1.0], [0.5, 3.0]])
    x = np.array([0.3, -0.2])
    jac = fd_jacobian(lambda v: matrix @ v, x, matrix @ x, 1e-6)
    np.testing.assert_allclose(jac, matrix, atol=1e-8)


def test_threaded_fd_jacobian_matches_serial() -> None:
    def residual(v: np.ndarray) -> np.ndarray:
        return np.array([v[0] ** 2 - v[1], np.sin(v[1]) + v[2], v[0] * v[2]])

    x = np.array([0.4, -0.3, 0.7])
    fx = residual(x)
    serial = fd_jacobian(residual, x, fx, 1e-7)
    threaded = fd_jacobian(residual, x, fx, 1e-7, jobs=3)
    np.testing.assert_array_equal(threaded, serial)


def test_damped_newton_with_worker_threads() -> None:
    result = damped_newton(
        lambda v: np.array([v[0] ** 2 - 2.0, v[0] * v[1] - 1.0]),
        np.array([1.0, 1.0]),
        1e-7,
        NewtonSettings(tol=1e-12, jobs=2),
    )
    assert result.x == pytest.approx([math.sqrt(2.0), 1.0 / math.sqrt(2.0)], rel=1e-10)


def test_zero_amplitude_branch_is_the_bifurcation_point(flat_continuation: BranchContinuation) -> None:
    branch = flat_continuation.continue_simply(1.0, 3, s_max=0.0, ds=0.01, k_modes=4)
    assert len(branch.steps) == 1
    assert branch.label == "simply"
    assert not branch.truncated
    assert branch.steps[0].amplitude == 0.0
    assert branch.steps[0].omega == pytest.approx(1.0 / 3.0, abs=1e-8)
    assert branch.steps[0].residual_inf <= 1e-12


def test_continuation_rejects_bad_arguments(flat_continuation: BranchContinuation) -> None:
    with pytest.raises(ValueError):
        flat_continuation.continue_simply(1.0, 3, s_max=0.1, ds=0.0)
    with pytest.raises(ValueError):
        flat_continuation.continue_doubly(1.0, 0.4, 3, "sideways", s_max=0.1, ds=0.01)


@pytest.mark.slow
def test_constant_depth_ellipse_matches_kirchhoff(flat_continuation: BranchContinuation) -> None:
    branch = flat_continuation.continue_simply(1.0, 2, s_max=0.05, ds=0.05, k_modes=8)
    assert not branch.truncated
    step = branch.steps[-1]
    contour = step.contours[0]
    ratio = float(contour.radius(math.pi / 2.0) / contour.radius(0.0))
    kirchhoff = ratio / (1.0 + ratio) ** 2
    assert step.omega == pytest.approx(kirchhoff, rel=1e-3)


@pytest.mark.slow
def test_bump_branch_residuals(bump_continuation: BranchContinuation) -> None:
    branch = bump_continuation.continue_simply(1.0, 4, s_max=0.04, ds=0.02, k_modes=6)
    assert not branch.truncated
    assert len(branch.steps) == 3
    omega0 = branch.bifurcation_omega
    assert omega0 == pytest.approx(bump_continuation.spectral.omega_simply(1.0, 4))
    for step in branch.steps[1:]:
        assert step.residual_inf <= 1e-10
        assert bump_continuation.residual_report(step) <= 1e-8
    assert abs(branch.steps[1].omega - omega0) <= 1e-3


@pytest.mark.slow
def test_corrupted_state_has_large_residual(bump_continuation: BranchContinuation) -> None:
    branch = bump_continuation.continue_simply(1.0, 4, s_max=0.02, ds=0.02, k_modes=6)
    step = branch.steps[-1]
    corrupted = BranchStep(step.amplitude, step.omega, (step.contours[0].perturbed(2, 1e-3),), 0.0, 0)
    assert bump_continuation.residual_report(corrupted) > 1e3 * 1e-10
    assert bump_continuation.pointwise_residual(corrupted) > 1e3 * 1e-10


@pytest.mark.slow
def test_doubly_branch_starts_at_bifurcation_velocity(flat_continuation: BranchContinuation) -> None:
    branch = flat_continuation.continue_doubly(1.0, 0.4, 3, "plus", s_max=0.01, ds=0.01, k_modes=3)
    assert branch.label == "doubly-plus"
    assert branch.bifurcation_omega == pytest.approx(0.252, abs=1e-6)
    assert not branch.truncated
    assert len(branch.steps) == 2
    assert len(branch.steps[-1].contours) == 2
    assert branch.steps[-1].omega == pytest.approx(0.252, abs=1e-3)


@pytest.mark.slow
def test_invalid_contour_truncates_branch(flat_continuation: BranchContinuation) -> None:
    branch = flat_continuation.continue_simply(1.0, 2, s_max=0.6, ds=0.3, k_modes=4)
    assert branch.truncated
    assert branch.diagnostic
    assert len(branch.steps) < 3


@pytest.mark.slow
def test_bump_branch_ten_steps_returns_to_bifurcation_velocity(bump_continuation: BranchContinuation) -> None:
    branch = bump_continuation.continue_simply(1.0, 4, s_max=0.2, ds=0.02, k_modes=6)
    assert not branch.truncated
    assert len(branch.steps) == 11
    for step in branch.steps[1:]:
        assert step.residual_inf <= 1e-9
        assert bump_continuation.residual_report(step) <= 1e-8
    amplitudes = np.array([step.amplitude for step in branch.steps[1:5]])
    omegas = np.array([step.omega for step in branch.steps[1:5]])
    intercept = np.polyfit(amplitudes**2, omegas, 2)[-1]
    assert intercept == pytest.approx(branch.bifurcation_omega, abs=1e-6)
    assert branch.bifurcation_omega == pytest.approx(bump_continuation.spectral.omega_simply(1.0, 4), abs=1e-12)
