﻿from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping

from dotenv import load_dotenv

from .depth import DepthProfile, profile_from_spec
from .errors import ConfigError

DEFAULT_PROFILE: dict[str, Any] = {"family": "constant", "b_inf": 1.0, "r_inf": 1.0}


def _to_bool(value: str | None, default: bool) -> bool:
    if value is None:
        return default
    return value.strip().lower() in {"1", "true", "yes", "y", "on"}


def _to_int(value: str | None, default: int) -> int:
    if value is None or value.strip() == "":
        return default
    try:
        return int(value)
    except ValueError as exc:
        raise ConfigError(f"expected an integer, got {value!r}") from exc


def _to_float(value: str | None, default: float | None) -> float | None:
    if value is None or value.strip() == "":
        return default
    try:
        return float(value)
    except ValueError as exc:
        raise ConfigError(f"expected a number, got {value!r}") from exc


@dataclass(frozen=True)
class GridSettings:
    r_out: float | None = None
    n_r: int = 2048
    theta_n: int = 256
    l_max_factor: int = 8
    band_nodes: int = 0


@dataclass(frozen=True)
class Tolerances:
    newton_tol: float = 1e-10
    quad_tol: float = 1e-12
    crosscheck_tol: float = 1e-5


@dataclass(frozen=True)
class WorkflowSettings:
    a: float = 1.0
    a1: float | None = None
    a2: float | None = None
    m: int = 3
    m_range: tuple[int, int] = (2, 8)
    n_max: int = 16
    s_max: float = 0.1
    ds: float = 0.02
    sign: str = "plus"
    k_modes: int = 8
    window: int = 64
    jobs: int = 1
    force: bool = False
    allow_truncation: bool = False
    suite: str = "all"

    @property
    def doubly(self) -> bool:
        return self.a1 is not None and self.a2 is not None


_SECTIONS = {"grid": GridSettings, "tolerances": Tolerances, "workflow": WorkflowSettings}


def _section_fields(section: type) -> set[str]:
    return {f.name for f in fields(section)}


@dataclass(frozen=True)
class RunConfig:
    profile: dict[str, Any] = field(default_factory=lambda: dict(DEFAULT_PROFILE))
    grid: GridSettings = field(default_factory=GridSettings)
    tolerances: Tolerances = field(default_factory=Tolerances)
    workflow: WorkflowSettings = field(default_factory=WorkflowSettings)
    output_dir: Path = Path("output")

    @classmethod
    def from_env(cls) -> "RunConfig":
        load_dotenv(override=False)
        grid = GridSettings(
            r_out=_to_float(os.getenv("LAKEVORT_R_OUT"), None),
            n_r=_to_int(os.getenv("LAKEVORT_N_R"), 2048),
            theta_n=_to_int(os.getenv("LAKEVORT_THETA_N"), 256),
            l_max_factor=_to_int(os.getenv("LAKEVORT_L_MAX_FACTOR"), 8),
        )
        tolerances = Tolerances(
            newton_tol=_to_float(os.getenv("LAKEVORT_NEWTON_TOL"), 1e-10),
            quad_tol=_to_float(os.getenv("LAKEVORT_QUAD_TOL"), 1e-12),
            crosscheck_tol=_to_float(os.getenv("LAKEVORT_CROSSCHECK_TOL"), 1e-5),
        )
        workflow = WorkflowSettings(
            jobs=_to_int(os.getenv("LAKEVORT_JOBS"), 1),
            force=_to_bool(os.getenv("LAKEVORT_FORCE"), False),
        )
        return cls(
            grid=grid,
            tolerances=tolerances,
            workflow=workflow,
            output_dir=Path(os.getenv("LAKEVORT_OUTPUT_DIR", "output")),
        )

    @classmethod
    def from_sources(
        cls,
        config_path: str | Path | None = None,
        profile_json: str | None = None,
        overrides: Mapping[str, Any] | None = None,
    ) -> "RunConfig":
        """Defaults < .env < LAKEVORT_* < JSON file < inline profile < explicit overrides."""
        config = cls.from_env()
        if config_path is not None:
            config = config.merged(_read_json(Path(config_path)))
        if profile_json is not None:
            try:
                profile = json.loads(profile_json)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"--profile is not valid JSON: {exc}") from exc
            config = config.merged({"profile": profile})
        if overrides:
            config = config.with_overrides(overrides)
        return config.validate()

    def merged(self, document: Mapping[str, Any]) -> "RunConfig":
        if not isinstance(document, Mapping):
            raise ConfigError("configuration document must be a JSON object")
        updates: dict[str, Any] = {}
        for key, value in document.items():
            if key == "profile":
                if not isinstance(value, Mapping):
                    raise ConfigError("'profile' must be a JSON object")
                updates["profile"] = dict(value)
            elif key == "output_dir":
                updates["output_dir"] = Path(value)
            elif key in _SECTIONS:
                updates[key] = _update_section(getattr(self, key), key, value)
            else:
                raise ConfigError(f"unknown configuration key {key!r}")
        return replace(self, **updates)

    def with_overrides(self, overrides: Mapping[str, Any]) -> "RunConfig":
        """Apply flat overrides such as {"n_r": 1024, "a": 0.8}; None values are ignored."""
        grouped: dict[str, dict[str, Any]] = {}
        config = self
        for key, value in overrides.items():
            if value is None:
                continue
            if key == "output_dir":
                config = replace(config, output_dir=Path(value))
                continue
            for name, section in _SECTIONS.items():
                if key in _section_fields(section):
                    grouped.setdefault(name, {})[key] = value
                    break
            else:
                raise ConfigError(f"unknown override {key!r}")
        return config.merged(grouped) if grouped else config

    def build_profile(self) -> DepthProfile:
        return profile_from_spec(self.profile)

    def validate(self) -> "RunConfig":
        profile = self.build_profile()
        grid, tol, flow = self.grid, self.tolerances, self.workflow
        if grid.r_out is not None and grid.r_out < 2.0 * profile.r_inf:
            raise ConfigError(f"r_out={grid.r_out} must be at least 2*R_inf = {2.0 * profile.r_inf}")
        if grid.n_r < 256:
            raise ConfigError(f"n_r must be >= 256, got {grid.n_r}")
        if grid.theta_n < 16 or grid.l_max_factor < 1 or grid.band_nodes < 0:
            raise ConfigError("theta_n >= 16, l_max_factor >= 1 and band_nodes >= 0 are required")
        for name in ("newton_tol", "quad_tol", "crosscheck_tol"):
            if not getattr(tol, name) > 0.0:
                raise ConfigError(f"{name} must be positive")
        if not flow.a > 0.0:
            raise ConfigError(f"a must be positive, got {flow.a}")
        if (flow.a1 is None) != (flow.a2 is None):
            raise ConfigError("a1 and a2 must be given together")
        if flow.doubly and not 0.0 < flow.a2 < flow.a1:
            raise ConfigError(f"need 0 < a2 < a1, got a1={flow.a1}, a2={flow.a2}")
        if flow.m < 1 or flow.m_range[0] < 1 or flow.m_range[1] < flow.m_range[0]:
            raise ConfigError(f"invalid fold symmetry settings m={flow.m}, m_range={flow.m_range}")
        if not flow.ds > 0.0 or flow.s_max < 0.0:
            raise ConfigError("ds must be positive and s_max non-negative")
        if flow.k_modes < 2:
            raise ConfigError("K (k_modes) must be at least 2")
        if flow.jobs < 1 or flow.n_max < 1 or flow.window < 1:
            raise ConfigError("jobs, n_max and window must be positive")
        if flow.sign not in {"plus", "minus"}:
            raise ConfigError(f"sign must be plus or minus, got {flow.sign!r}")
        return self

    def effective_r_out(self, max_radius: float = 0.0) -> float:
        r_inf = profile_from_spec(self.profile).r_inf
        return max(self.grid.r_out or 0.0, 2.0 * r_inf, 2.0 * max_radius)

    def to_dict(self) -> dict[str, Any]:
        workflow = asdict(self.workflow)
        workflow["m_range"] = list(self.workflow.m_range)
        return {
            "profile": self.profile,
            "grid": asdict(self.grid),
            "tolerances": asdict(self.tolerances),
            "workflow": workflow,
        }

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _read_json(path: Path) -> dict[str, Any]:
    try:
        document = json.loads(path.read_text(encoding="utf-8-sig"))
    except FileNotFoundError as exc:
        raise ConfigError(f"configuration file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"configuration file {path} is malformed: {exc}") from exc
    if not isinstance(document, dict):
        raise ConfigError(f"configuration file {path} must hold a JSON object")
    return document


def _coerce(key: str, kind: str, value: Any) -> Any:
    """Bring a JSON or override value to the declared field type."""
    if value is None:
        if "None" in kind:
            return None
        raise ConfigError(f"{key} may not be null")
    if kind.startswith("tuple"):
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            raise ConfigError(f"{key} must be a pair [m_min, m_max]")
        return tuple(_coerce(key, "int", item) for item in value)
    if kind == "bool":
        if isinstance(value, bool):
            return value
        if isinstance(value, str):
            return _to_bool(value, False)
        raise ConfigError(f"{key} must be a boolean, got {value!r}")
    if kind == "str":
        if not isinstance(value, str):
            raise ConfigError(f"{key} must be a string, got {value!r}")
        return value
    if isinstance(value, bool):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if kind == "int":
        if isinstance(value, str):
            return _to_int(value, 0)
        if isinstance(value, float) and value.is_integer():
            return int(value)
        if isinstance(value, int):
            return value
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    if isinstance(value, str):
        return _to_float(value, None)
    if isinstance(value, (int, float)):
        return float(value)
    raise ConfigError(f"{key} must be a number, got {value!r}")


def _update_section(current: Any, name: str, values: Any) -> Any:
    if not isinstance(values, Mapping):
        raise ConfigError(f"'{name}' must be a JSON object")
    kinds = {f.name: str(f.type) for f in fields(type(current))}
    unknown = set(values) - set(kinds)
    if unknown:
        raise ConfigError(f"unknown {name} keys: {sorted(unknown)}")
    updates = {key: _coerce(key, kinds[key], value) for key, value in values.items()}
    return replace(current, **updates)
