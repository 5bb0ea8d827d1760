﻿from __future__ import annotations

import json
from pathlib import Path

import pytest

from lakevort.config import RunConfig
from lakevort.depth import DepthFamily
from lakevort.errors import ConfigError

BUMP = {"family": "bump", "b_inf": 1.0, "amp": 0.5, "r_inf": 2.0}


def _write_config(tmp_path: Path, document: object) -> Path:
    path = tmp_path / "run.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


def test_defaults() -> None:
    config = RunConfig.from_sources()
    assert config.profile["family"] == "constant"
    assert config.grid.n_r == 2048
    assert config.tolerances.crosscheck_tol == 1e-5
    assert config.workflow.m_range == (2, 8)
    assert not config.workflow.doubly


def test_environment_overrides_defaults(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    monkeypatch.setenv("LAKEVORT_N_R", "1024")
    monkeypatch.setenv("LAKEVORT_JOBS", "3")
    monkeypatch.setenv("LAKEVORT_FORCE", "yes")
    monkeypatch.setenv("LAKEVORT_OUTPUT_DIR", str(tmp_path))
    config = RunConfig.from_sources()
    assert config.grid.n_r == 1024
    assert config.workflow.jobs == 3
    assert config.workflow.force is True
    assert config.output_dir == tmp_path


def test_environment_rejects_non_numeric(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("LAKEVORT_NEWTON_TOL", "tight")
    with pytest.raises(ConfigError):
        RunConfig.from_sources()


def test_json_file_and_overrides(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    monkeypatch.setenv("LAKEVORT_N_R", "1024")
    path = _write_config(
        tmp_path,
        {"profile": BUMP, "grid": {"n_r": 768}, "workflow": {"a1": 1.0, "a2": 0.4, "m_range": [3, 5]}},
    )
    config = RunConfig.from_sources(path, overrides={"n_r": 512, "m": 4, "s_max": None})
    assert config.build_profile().family is DepthFamily.BUMP
    assert config.grid.n_r == 512
    assert config.workflow.doubly
    assert config.workflow.m_range == (3, 5)
    assert config.workflow.m == 4
    assert config.workflow.s_max == 0.1


def test_inline_profile_beats_file(tmp_path: Path) -> None:
    path = _write_config(tmp_path, {"profile": BUMP})
    config = RunConfig.from_sources(path, profile_json='{"family": "constant", "b_inf": 2.0}')
    assert config.build_profile().b_inf == 2.0


@pytest.mark.parametrize(
    "document",
    [
        {"colour": "blue"},
        {"grid": {"n_r": 512, "mesh": "fine"}},
        {"profile": "bump"},
        {"workflow": {"m_range": [3]}},
        [1, 2],
    ],
)
def test_bad_documents_raise(tmp_path: Path, document: object) -> None:
    with pytest.raises(ConfigError):
        RunConfig.from_sources(_write_config(tmp_path, document))


def test_json_values_are_coerced_to_field_types(tmp_path: Path) -> None:
    path = _write_config(
        tmp_path,
        {
            "grid": {"n_r": "1024", "theta_n": 128.0, "r_out": 6},
            "tolerances": {"newton_tol": "1e-9"},
            "workflow": {"force": "yes", "m": "4", "m_range": ["2", 6.0]},
        },
    )
    config = RunConfig.from_sources(path)
    assert config.grid.n_r == 1024 and isinstance(config.grid.n_r, int)
    assert config.grid.theta_n == 128 and isinstance(config.grid.theta_n, int)
    assert config.grid.r_out == 6.0 and isinstance(config.grid.r_out, float)
    assert config.tolerances.newton_tol == pytest.approx(1e-9)
    assert config.workflow.force is True
    assert config.workflow.m == 4
    assert config.workflow.m_range == (2, 6)


@pytest.mark.parametrize(
    "section",
    [
        {"grid": {"n_r": "many"}},
        {"grid": {"n_r": 1024.5}},
        {"grid": {"theta_n": True}},
        {"grid": {"n_r": None}},
        {"tolerances": {"quad_tol": [1e-12]}},
        {"workflow": {"force": 1}},
        {"workflow": {"sign": 3}},
    ],
)
def test_json_values_with_wrong_types_raise(tmp_path: Path, section: dict[str, object]) -> None:
    with pytest.raises(ConfigError):
        RunConfig.from_sources(_write_config(tmp_path, section))


def test_missing_and_malformed_files(tmp_path: Path) -> None:
    with pytest.raises(ConfigError):
        RunConfig.from_sources(tmp_path / "absent.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        RunConfig.from_sources(broken)
    with pytest.raises(ConfigError):
        RunConfig.from_sources(profile_json="{not json")


@pytest.mark.parametrize(
    "overrides",
    [
        {"r_out": 1.5},
        {"n_r": 64},
        {"a1": 1.0},
        {"a1": 0.4, "a2": 1.0},
        {"sign": "sideways"},
        {"quad_tol": 0.0},
        {"k_modes": 1},
        {"m_range": (5, 3)},
        {"ds": 0.0},
        {"lake": "erie"},
    ],
)
def test_validation_errors(overrides: dict[str, object]) -> None:
    with pytest.raises(ConfigError):
        RunConfig.from_sources(overrides=overrides)


def test_profile_errors_surface_as_config_errors() -> None:
    with pytest.raises(ConfigError):
        RunConfig.from_sources(profile_json='{"family": "bump", "b_inf": 1, "amp": -2, "r_inf": 1}')


def test_config_hash_tracks_numerics_only(tmp_path: Path) -> None:
    base = RunConfig.from_sources()
    moved = RunConfig.from_sources(overrides={"output_dir": tmp_path})
    finer = RunConfig.from_sources(overrides={"n_r": 4096})
    assert base.config_hash() == moved.config_hash()
    assert base.config_hash() != finer.config_hash()
    assert len(base.config_hash()) == 64


def test_effective_outer_radius() -> None:
    config = RunConfig.from_sources(profile_json=json.dumps(BUMP))
    assert config.effective_r_out() == 4.0
    assert config.effective_r_out(3.0) == 6.0
    assert RunConfig.from_sources(overrides={"r_out": 10.0}).effective_r_out(1.0) == 10.0
