﻿from __future__ import annotations


class LakeVortError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(LakeVortError):
    pass


class ProfileError(ConfigError):
    pass


class RadialRangeError(LakeVortError, ValueError):
    pass


class AbelIdentityError(LakeVortError):
    pass


class NystromSingularError(LakeVortError):
    pass


class CrossCheckError(LakeVortError):
    pass


class DegenerateSpectrumError(LakeVortError):
    pass


class ThresholdSearchError(LakeVortError):
    def __init__(self, message: str, diagnostics: dict[str, object] | None = None) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ContourError(LakeVortError):
    pass


class NestingError(ContourError):
    pass


class NewtonConvergenceError(LakeVortError):
    def __init__(self, message: str, iterations: int, residual: float) -> None:
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class SolverError(LakeVortError):
    pass


class VerificationError(LakeVortError):
    pass
