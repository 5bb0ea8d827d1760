﻿from __future__ import annotations

import math

import numpy as np
import pytest

from lakevort.contour import (
    ContourFunctional,
    FourierContour,
    PatchPotential,
    arc_moments,
    check_nesting,
    kernel_alignment,
    multiplier_check,
    project,
    theta_grid,
)
from lakevort.contour.potential import _band_rule
from lakevort.depth import DepthProfile
from lakevort.errors import ContourError, NestingError
from lakevort.radialgreen import ModeGreenBank
from lakevort.spectral import SpectralCalculator


@pytest.fixture(scope="module")
def flat_functional(flat: DepthProfile, flat_bank: ModeGreenBank) -> ContourFunctional:
    return ContourFunctional(flat, flat_bank, theta_n=128)


@pytest.fixture(scope="module")
def bump_functional(bump: DepthProfile, bump_bank: ModeGreenBank) -> ContourFunctional:
    return ContourFunctional(bump, bump_bank, theta_n=128)


def _energy(value) -> float:
    return float(sum(np.sum(s**2) + np.sum(c**2) for s, c in zip(value.sine, value.cosine)))


def test_trivial_contour_is_a_disc() -> None:
    disc = FourierContour.trivial(0.8, 3, 4)
    theta = np.linspace(0.0, 2.0 * math.pi, 17)
    np.testing.assert_allclose(disc.radius(theta), 0.8)
    assert disc.k_modes == 4
    assert disc.is_even
    assert disc.band == (pytest.approx(0.8), pytest.approx(0.8))


def test_contour_band_and_validity() -> None:
    contour = FourierContour(1.0, 3, (0.05,))
    lo, hi = contour.band
    assert lo == pytest.approx(math.sqrt(0.9), rel=1e-12)
    assert hi == pytest.approx(math.sqrt(1.1), rel=1e-12)
    assert contour.is_valid()

    broken = FourierContour(1.0, 3, (0.6,))
    assert not broken.is_valid()
    with pytest.raises(ContourError):
        broken.validate()
    with pytest.raises(ContourError):
        broken.radius(math.pi / 3.0)


def test_contour_rejects_bad_parameters() -> None:
    with pytest.raises(ContourError):
        FourierContour(0.0, 2, (0.0,))
    with pytest.raises(ContourError):
        FourierContour(1.0, 0, (0.0,))


def test_rotation_moves_the_angle_origin() -> None:
    contour = FourierContour(1.0, 3, (0.03, -0.01))
    shift = 0.37
    rotated = contour.rotated(shift)
    theta = np.linspace(0.0, 2.0 * math.pi, 25)
    np.testing.assert_allclose(rotated.r(theta), contour.r(theta + shift), atol=1e-15)
    back = rotated.rotated(-shift)
    np.testing.assert_allclose(back.coeffs, contour.coeffs, atol=1e-15)
    np.testing.assert_allclose(back.sine_coeffs, [0.0, 0.0], atol=1e-15)


def test_perturbed_extends_coefficients() -> None:
    contour = FourierContour.trivial(1.0, 2, 1).perturbed(3, 1e-3)
    assert contour.coeffs == (0.0, 0.0, 1e-3)


def test_nesting_check() -> None:
    outer = FourierContour(1.0, 3, (0.02,))
    check_nesting(outer, FourierContour(0.5, 3, (0.01,)))
    with pytest.raises(NestingError):
        check_nesting(outer, FourierContour(1.0, 3, (-0.02,)))
    with pytest.raises(NestingError):
        check_nesting(outer, FourierContour(0.5, 2, (0.0,)))


def test_arc_moments_of_a_disc() -> None:
    moments = arc_moments(FourierContour.trivial(1.0, 3, 2), np.array([0.5, 1.5]), (0, 3, 6))
    np.testing.assert_allclose(moments.length, [2.0 * math.pi, 0.0], atol=1e-14)
    np.testing.assert_allclose(moments.cosine[1:], 0.0, atol=1e-14)
    np.testing.assert_allclose(moments.sine, 0.0, atol=1e-14)


def test_arc_moments_of_an_elliptic_perturbation() -> None:
    # r = 0.1 cos 2η crosses the level 0 at ±π/4 and π ± π/4.
    contour = FourierContour(1.0, 2, (0.1,))
    moments = arc_moments(contour, np.array([1.0]), (0, 2, 4))
    assert moments.length[0] == pytest.approx(math.pi, abs=1e-12)
    assert moments.cosine[1, 0] == pytest.approx(2.0, abs=1e-12)
    assert moments.cosine[2, 0] == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(moments.sine[:, 0], 0.0, atol=1e-12)


def test_project_recovers_coefficients() -> None:
    theta = theta_grid(96)
    values = 0.3 * np.sin(6.0 * theta) + 0.1 * np.cos(3.0 * theta) + 0.2
    sine, cosine, mean = project(values, 3, 2)
    np.testing.assert_allclose(sine, [0.0, 0.3], atol=1e-14)
    np.testing.assert_allclose(cosine, [0.1, 0.0], atol=1e-14)
    assert mean == pytest.approx(0.2)
    with pytest.raises(ValueError):
        project(values, 3, 16)


@pytest.mark.parametrize(("alpha", "psi", "dpsi"), [(0.5, 0.1875, -0.25), (2.0, -math.log(2.0) / 2.0, -0.25)])
def test_disc_patch_potential(flat_bank: ModeGreenBank, alpha: float, psi: float, dpsi: float) -> None:
    potential = PatchPotential(flat_bank, l_max=16)
    disc = FourierContour.trivial(1.0, 2, 2)
    sample = potential.evaluate(disc, np.array([alpha, alpha]), np.array([0.0, 1.3]))
    np.testing.assert_allclose(sample.psi, psi, atol=1e-10)
    np.testing.assert_allclose(sample.dpsi_dr, dpsi, atol=1e-10)
    np.testing.assert_allclose(sample.dpsi_dtheta, 0.0, atol=1e-14)


def test_disc_velocity_is_azimuthal(flat_bank: ModeGreenBank) -> None:
    potential = PatchPotential(flat_bank, l_max=8)
    disc = FourierContour.trivial(1.0, 2, 2)
    vx, vy = potential.velocity(((disc, 1.0),), np.array([2.0, 0.0]), np.array([0.0, 0.5]))
    np.testing.assert_allclose(vx, [0.0, -0.25], atol=1e-10)
    np.testing.assert_allclose(vy, [0.25, 0.0], atol=1e-10)


def test_functional_vanishes_on_trivial_disc(bump_functional: ContourFunctional) -> None:
    value = bump_functional.functional_F(0.3, FourierContour.trivial(1.0, 4, 4))
    assert value.pointwise_inf() <= 1e-12
    assert value.projection_inf() <= 1e-12


def test_functional_G_vanishes_on_trivial_annulus(bump_functional: ContourFunctional) -> None:
    outer = FourierContour.trivial(1.0, 3, 3)
    inner = FourierContour.trivial(0.4, 3, 3)
    value = bump_functional.functional_G(0.2, outer, inner)
    assert len(value.values) == 2
    assert value.pointwise_inf() <= 1e-12


def test_functional_G_requires_nesting(flat_functional: ContourFunctional) -> None:
    with pytest.raises(NestingError):
        flat_functional.functional_G(0.2, FourierContour.trivial(0.4, 3, 2), FourierContour.trivial(1.0, 3, 2))


def test_even_contour_gives_odd_functional(bump_functional: ContourFunctional) -> None:
    contour = FourierContour(1.0, 3, (0.02, 0.004))
    value = bump_functional.functional_F(0.25, contour)
    np.testing.assert_allclose(value.cosine[0], 0.0, atol=1e-12)
    assert abs(value.mean[0]) <= 1e-12
    assert value.projection_inf() > 1e-6


def test_functional_energy_is_rotation_invariant(bump_functional: ContourFunctional) -> None:
    contour = FourierContour(1.0, 3, (0.02, 0.004))
    base = bump_functional.functional_F(0.25, contour)
    turned = bump_functional.functional_F(0.25, contour.rotated(0.3))
    assert _energy(turned) == pytest.approx(_energy(base), rel=1e-10)


@pytest.mark.parametrize("shift", [0.05, 0.3, 1.0])
def test_skewed_contour_energy_is_rotation_invariant(bump_functional: ContourFunctional, shift: float) -> None:
    contour = FourierContour(1.0, 3, (0.02, 0.004), (0.003,))
    base = bump_functional.functional_F(0.25, contour)
    turned = bump_functional.functional_F(0.25, contour.rotated(shift))
    assert _energy(turned) == pytest.approx(_energy(base), rel=1e-10)


@pytest.mark.parametrize("alpha", [0.5, 0.97, 1.0199999, 1.5])
def test_band_rule_weights_cover_each_segment(alpha: float) -> None:
    levels = np.array([0.97, 1.0, 1.02])
    rho, weight = _band_rule(levels, np.array([alpha]), 12)
    assert float(np.sum(weight)) == pytest.approx(0.05, rel=1e-13)
    assert float(np.sum(weight * rho)) == pytest.approx(0.5 * (1.02**2 - 0.97**2), rel=1e-13)
    below = rho[0] < alpha
    assert float(np.sum(weight[0][below])) == pytest.approx(min(max(alpha, 0.97), 1.02) - 0.97, abs=1e-13)


def test_constant_depth_multiplier_value(flat_functional: ContourFunctional, flat_calculator: SpectralCalculator) -> None:
    rows = multiplier_check(flat_functional, flat_calculator, 1.0, 0.1, 2, [1])
    assert len(rows) == 1
    assert rows[0].component == "F"
    assert rows[0].analytic == pytest.approx(0.3, abs=1e-8)
    assert rows[0].finite_difference == pytest.approx(0.3, rel=1e-4)


def test_bump_multipliers_match_finite_differences(
    bump_functional: ContourFunctional, bump_calculator: SpectralCalculator
) -> None:
    omega = 0.5 * bump_calculator.omega_simply(0.8, 2)
    rows = multiplier_check(bump_functional, bump_calculator, 0.8, omega, 2, [1, 2, 3])
    assert max(row.relative_error for row in rows) <= 1e-4


@pytest.mark.slow
def test_bump_multipliers_up_to_mode_eight(bump_functional: ContourFunctional, bump_calculator: SpectralCalculator) -> None:
    omega = 0.5 * bump_calculator.omega_simply(1.0, 2)
    rows = multiplier_check(bump_functional, bump_calculator, 1.0, omega, 2, range(1, 9))
    assert [row.n for row in rows] == list(range(1, 9))
    assert max(row.relative_error for row in rows) <= 1e-4


@pytest.mark.slow
def test_bump_doubly_multipliers_up_to_mode_eight(
    bump_functional: ContourFunctional, bump_calculator: SpectralCalculator
) -> None:
    rows = multiplier_check(bump_functional, bump_calculator, (1.0, 0.6), 0.2, 2, range(1, 9))
    assert len(rows) == 32
    assert max(row.relative_error for row in rows) <= 1e-4


@pytest.mark.slow
def test_doubly_multipliers_match_finite_differences(
    flat_functional: ContourFunctional, flat_calculator: SpectralCalculator
) -> None:
    rows = multiplier_check(flat_functional, flat_calculator, (1.0, 0.4), 0.1, 3, [1])
    assert {row.component for row in rows} == {"G1/r1", "G1/r2", "G2/r1", "G2/r2"}
    assert max(row.relative_error for row in rows) <= 1e-4


@pytest.mark.slow
@pytest.mark.parametrize("branch", ["plus", "minus"])
def test_fd_kernel_aligns_with_generator(
    flat_functional: ContourFunctional, flat_calculator: SpectralCalculator, branch: str
) -> None:
    angle = kernel_alignment(flat_functional, flat_calculator, 1.0, 0.4, 3, branch)
    assert angle < 1e-3
