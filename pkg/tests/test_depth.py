﻿from __future__ import annotations

import numpy as np
import pytest

from lakevort.depth import (
    DepthFamily,
    DepthProfile,
    make_bump_profile,
    make_constant_profile,
    make_table_profile,
    profile_from_spec,
    q_factor,
    theta_sup,
    theta_values,
)
from lakevort.errors import ConfigError, ProfileError


def _fd_theta(p: DepthProfile, r: np.ndarray, h: float = 1e-4) -> np.ndarray:
    def w(x: np.ndarray) -> np.ndarray:
        return 1.0 / np.sqrt(p.b(x))

    first = (w(r + h) - w(r - h)) / (2.0 * h)
    second = (w(r + h) - 2.0 * w(r) + w(r - h)) / (h * h)
    return first + r * second


def test_constant_profile_is_flat(flat: DepthProfile) -> None:
    r = np.linspace(0.0, 5.0, 11)
    assert np.all(flat.b(r) == 1.0)
    assert np.all(flat.db(r) == 0.0)
    assert theta_sup(flat) == 0.0
    assert np.all(theta_values(flat, r) == 0.0)


def test_bump_profile_values_and_plateau(bump: DepthProfile) -> None:
    assert bump.b_scalar(0.0) == pytest.approx(1.5)
    assert bump.b_scalar(1.0) == pytest.approx(1.0 + 0.5 * 0.75**3)
    assert bump.b_scalar(2.0) == 1.0
    assert bump.b_scalar(3.5) == 1.0

    diagnostics = bump.check_assumptions()
    assert diagnostics["positive"] is True
    assert diagnostics["plateau_ok"] is True
    assert diagnostics["jump_b"] < 1e-12
    assert diagnostics["jump_db"] < 1e-8
    assert diagnostics["jump_d2b"] < 1e-6


def test_zero_amplitude_bump_degenerates_to_constant() -> None:
    profile = make_bump_profile(1.0, 0.0, 2.0)
    assert profile.family is DepthFamily.CONSTANT
    assert profile.is_constant


@pytest.mark.parametrize(
    ("builder", "args"),
    [
        (make_bump_profile, (1.0, -1.0, 2.0)),
        (make_bump_profile, (0.0, 0.5, 2.0)),
        (make_constant_profile, (-1.0,)),
        (make_constant_profile, (1.0, 0.0)),
    ],
)
def test_invalid_profiles_raise(builder, args) -> None:
    with pytest.raises(ProfileError):
        builder(*args)


def test_profile_error_is_a_config_error() -> None:
    with pytest.raises(ConfigError):
        profile_from_spec('{"family": "bump", "b_inf": 1')


def test_profile_from_spec_round_trips_bump(bump: DepthProfile) -> None:
    rebuilt = profile_from_spec(bump.to_spec())
    assert rebuilt.key == bump.key


@pytest.mark.parametrize(
    "spec",
    [
        '{"family": "lagoon"}',
        '{"family": "bump", "b_inf": 1, "r_inf": 2}',
        '{"family": "bump", "b_inf": "deep", "amp": 0.5, "r_inf": 2}',
        "[1, 2, 3]",
    ],
)
def test_profile_from_spec_rejects_bad_documents(spec: str) -> None:
    with pytest.raises(ProfileError):
        profile_from_spec(spec)


def test_table_profile_interpolates_knots() -> None:
    profile = make_table_profile([[0.0, 2.0], [1.0, 1.5], [2.0, 1.0]])
    assert profile.family is DepthFamily.TABLE
    assert profile.b_inf == 1.0
    assert profile.r_inf == 2.0
    assert profile.b_scalar(0.0) == pytest.approx(2.0)
    assert profile.b_scalar(1.0) == pytest.approx(1.5)
    assert profile.b_scalar(3.0) == 1.0


@pytest.mark.parametrize(
    "table",
    [
        [[0.0, 1.0], [1.0, 1.0]],
        [[0.5, 1.0], [1.0, 1.0], [2.0, 1.0]],
        [[0.0, 1.0], [1.0, -0.5], [2.0, 1.0]],
        [[0.0, 1.0], [2.0, 1.0], [1.0, 1.0]],
    ],
)
def test_table_profile_rejects_bad_tables(table: list[list[float]]) -> None:
    with pytest.raises(ProfileError):
        make_table_profile(table)


def test_table_spec_plateau_keys_must_match_last_knot() -> None:
    table = [[0.0, 2.0], [1.0, 1.5], [2.0, 1.0]]
    profile = profile_from_spec({"family": "table", "table": table, "b_inf": 1.0, "r_inf": 2.0})
    assert profile.b_inf == 1.0
    assert profile.r_inf == 2.0
    with pytest.raises(ProfileError, match="r_inf"):
        profile_from_spec({"family": "table", "table": table, "r_inf": 3.0})
    with pytest.raises(ProfileError, match="b_inf"):
        profile_from_spec({"family": "table", "table": table, "b_inf": 0.5})


def test_theta_matches_finite_differences(bump: DepthProfile) -> None:
    r = np.linspace(0.05, 1.95, 39)
    assert np.max(np.abs(theta_values(bump, r) - _fd_theta(bump, r))) < 1e-6


def test_theta_vanishes_on_plateau(bump: DepthProfile) -> None:
    r = np.linspace(2.0, 6.0, 9)
    assert np.all(theta_values(bump, r) == 0.0)
    assert theta_sup(bump) > 0.0


def test_q_factor_constant_depth(flat: DepthProfile) -> None:
    assert q_factor(flat, 1.0, 0.4) == pytest.approx(0.42, abs=1e-12)
    assert q_factor(flat, 1.0, 0.0) == pytest.approx(0.5, abs=1e-12)
    assert q_factor(flat, 0.7, 0.7) == 0.0


def test_q_factor_bump_uses_profile_weight(bump: DepthProfile) -> None:
    # ∫_0^a t (1 + 0.5 (1 - t²/4)^3) dt at a = 1, divided by a².
    expected = 0.5 + 0.5 * (4.0 / 8.0) * (1.0 - 0.75**4)
    assert q_factor(bump, 1.0, 0.0) == pytest.approx(expected, rel=1e-10)


def test_q_factor_rejects_bad_radii(flat: DepthProfile) -> None:
    with pytest.raises(ValueError):
        q_factor(flat, 0.0, 0.5)
    with pytest.raises(ValueError):
        q_factor(flat, 1.0, -0.1)
