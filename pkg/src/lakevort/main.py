﻿from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any, Callable, Sequence

from .branch import BranchContinuation, NewtonSettings
from .config import RunConfig
from .contour import ContourFunctional
from .errors import (
    ConfigError,
    CrossCheckError,
    DegenerateSpectrumError,
    LakeVortError,
    ThresholdSearchError,
)
from .helpers import write_boundary_csv, write_csv_table, write_json_report, write_markdown_report
from .logging_config import configure_logging
from .radialgreen import ModeGreenBank
from .spectral import SpectralCalculator
from .verify import VerificationSuite

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_CROSSCHECK = 3
EXIT_TRUNCATED = 4
EXIT_VERIFY = 5

_OVERRIDES = (
    "r_out",
    "n_r",
    "theta_n",
    "l_max_factor",
    "band_nodes",
    "newton_tol",
    "quad_tol",
    "crosscheck_tol",
    "a",
    "a1",
    "a2",
    "m",
    "m_range",
    "n_max",
    "s_max",
    "ds",
    "sign",
    "k_modes",
    "window",
    "jobs",
    "force",
    "allow_truncation",
    "suite",
    "output_dir",
)


def _m_range(text: str) -> tuple[int, int]:
    for separator in (":", "-", ","):
        if separator in text:
            lo, hi = text.split(separator, 1)
            try:
                return int(lo), int(hi)
            except ValueError:
                break
    raise argparse.ArgumentTypeError(f"expected M_MIN:M_MAX, got {text!r}")


def _add_geometry(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--a", type=float, help="Disc radius (simply connected case).")
    parser.add_argument("--a1", type=float, help="Outer annulus radius (doubly connected case).")
    parser.add_argument("--a2", type=float, help="Inner annulus radius (doubly connected case).")


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON configuration file.")
    common.add_argument("--out", dest="output_dir", type=Path, help="Output directory.")
    common.add_argument("--profile", help='Inline depth profile JSON, e.g. \'{"family":"bump","b_inf":1,"amp":0.5,"r_inf":2}\'.')
    common.add_argument(
        "--jobs", type=int, help="Worker threads: spectrum rows, verification checks and Newton Jacobian columns."
    )
    common.add_argument("--n-r", dest="n_r", type=int, help="Radial grid size.")
    common.add_argument("--r-out", dest="r_out", type=float, help="Outer radius of the radial grid.")
    common.add_argument("--theta-n", dest="theta_n", type=int, help="Angle samples for contour functionals.")
    common.add_argument("--l-max-factor", dest="l_max_factor", type=int, help="Angular truncation L_max / m.")
    common.add_argument("--newton-tol", dest="newton_tol", type=float)
    common.add_argument("--quad-tol", dest="quad_tol", type=float)
    common.add_argument("--crosscheck-tol", dest="crosscheck_tol", type=float)
    common.add_argument("--log-level", help="Overrides LAKEVORT_LOG for this run.")

    parser = argparse.ArgumentParser(
        description="Spectra, bifurcation points and V-state branches for vortex patches of the lake equation."
    )
    commands = parser.add_subparsers(dest="command", required=True)

    spectrum = commands.add_parser("spectrum", parents=[common], help="Tabulate Λ_n, f_n and Q to CSV.")
    _add_geometry(spectrum)
    spectrum.add_argument("--n-max", dest="n_max", type=int, help="Largest mode index.")

    bifpoints = commands.add_parser("bifpoints", parents=[common], help="Bifurcation velocities per m.")
    _add_geometry(bifpoints)
    bifpoints.add_argument("--m-range", dest="m_range", type=_m_range, help="Inclusive range M_MIN:M_MAX.")
    bifpoints.add_argument("--window", type=int, help="Window length for the threshold search.")

    branch = commands.add_parser("branch", parents=[common], help="Continue a V-state branch.")
    _add_geometry(branch)
    branch.add_argument("--m", type=int, help="Fold symmetry.")
    branch.add_argument("--sign", choices=["plus", "minus"], help="Doubly connected branch.")
    branch.add_argument("--s-max", dest="s_max", type=float)
    branch.add_argument("--ds", type=float)
    branch.add_argument("--k", dest="k_modes", type=int, help="Fourier modes per contour.")
    branch.add_argument("--force", action="store_true", default=None, help="Skip the threshold pre-check.")
    branch.add_argument(
        "--allow-truncation", dest="allow_truncation", action="store_true", default=None,
        help="Exit 0 even when the branch stops before s_max.",
    )
    branch.add_argument("--boundaries", action="store_true", help="Write one boundary CSV per accepted step.")

    verify = commands.add_parser("verify", parents=[common], help="Run the verification suite.")
    verify.add_argument("--suite", help="'all' or a comma-separated list of check names.")

    return parser.parse_args(argv)


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    return {name: getattr(args, name, None) for name in _OVERRIDES}


def _bank(config: RunConfig, max_radius: float) -> ModeGreenBank:
    profile = config.build_profile()
    return ModeGreenBank.for_profile(profile, r_out=config.effective_r_out(max_radius), n_r=config.grid.n_r)


def _radii(config: RunConfig) -> tuple[float, ...]:
    flow = config.workflow
    return (flow.a1, flow.a2) if flow.doubly else (flow.a,)


def cmd_spectrum(config: RunConfig, args: argparse.Namespace) -> int:
    profile = config.build_profile()
    radii = _radii(config)
    calculator = SpectralCalculator(profile, _bank(config, max(radii)), config.tolerances.quad_tol)
    table = calculator.table(
        radii,
        range(1, config.workflow.n_max + 1),
        crosscheck_tol=config.tolerances.crosscheck_tol,
        jobs=config.workflow.jobs,
    )
    output = config.output_dir / "spectrum.csv"
    write_csv_table(table.records(), output, config.config_hash())
    print(f"[INFO] Spectral table with {len(table.rows)} rows written: {output}")
    print(f"[INFO] Threshold M(b) = {table.threshold_m:.6g}")
    return EXIT_OK


def cmd_bifpoints(config: RunConfig, args: argparse.Namespace) -> int:
    profile = config.build_profile()
    flow = config.workflow
    radii = _radii(config)
    calculator = SpectralCalculator(profile, _bank(config, max(radii)), config.tolerances.quad_tol)
    m_min, m_max = flow.m_range
    records: list[dict[str, Any]] = []

    if flow.doubly:
        threshold_m = calculator.threshold_M(flow.a1, flow.a2)
        try:
            report = calculator.find_threshold_N(flow.a1, flow.a2, window=flow.window)
            n_threshold: int | None = report.n_threshold
        except ThresholdSearchError as exc:
            print(f"[WARN] Threshold search failed: {exc} {exc.diagnostics}")
            n_threshold = None
        for m in range(m_min, m_max + 1):
            record: dict[str, Any] = {"m": m}
            try:
                roots = calculator.omega_doubly(flow.a1, flow.a2, m)
                record.update(Omega_minus=roots.omega_minus, Omega_plus=roots.omega_plus, Delta=roots.delta, flag="")
            except DegenerateSpectrumError as exc:
                print(f"[WARN] m={m}: {exc}")
                record.update(Omega_minus=None, Omega_plus=None, Delta=None, flag="degenerate")
            record.update(M_b=threshold_m, N_threshold=n_threshold)
            records.append(record)
    else:
        threshold_m = calculator.threshold_M(flow.a, flow.a)
        for m in range(m_min, m_max + 1):
            records.append({"m": m, "Omega": calculator.omega_simply(flow.a, m), "M_b": threshold_m})

    output = config.output_dir / "bifpoints.csv"
    write_csv_table(records, output, config.config_hash())
    flagged = sum(1 for record in records if record.get("flag"))
    print(f"[INFO] Bifurcation points for m={m_min}..{m_max} written: {output}")
    if flagged:
        print(f"[WARN] {flagged} degenerate rows flagged.")
    return EXIT_OK


def _threshold_ok(calculator: SpectralCalculator, config: RunConfig) -> bool:
    flow = config.workflow
    if flow.doubly:
        report = calculator.find_threshold_N(flow.a1, flow.a2, window=flow.window)
        if flow.m < report.n_threshold:
            print(f"[ERROR] m={flow.m} is below the threshold N={report.n_threshold}; use --force to continue anyway.")
            return False
        return True
    bound = calculator.threshold_M(flow.a, flow.a)
    if flow.m <= bound:
        print(f"[ERROR] m={flow.m} does not exceed M(b)={bound:.6g}; use --force to continue anyway.")
        return False
    return True


def cmd_branch(config: RunConfig, args: argparse.Namespace) -> int:
    profile = config.build_profile()
    flow = config.workflow
    radii = _radii(config)
    bank = _bank(config, max(radii))
    calculator = SpectralCalculator(profile, bank, config.tolerances.quad_tol)
    if not flow.force and not _threshold_ok(calculator, config):
        return EXIT_CONFIG

    functional = ContourFunctional(
        profile,
        bank,
        theta_n=config.grid.theta_n,
        l_max_factor=config.grid.l_max_factor,
        band_nodes=config.grid.band_nodes,
    )
    settings = NewtonSettings(tol=config.tolerances.newton_tol, jobs=flow.jobs)
    continuation = BranchContinuation(functional, calculator, settings)
    if flow.doubly:
        branch = continuation.continue_doubly(flow.a1, flow.a2, flow.m, flow.sign, flow.s_max, flow.ds, flow.k_modes)
    else:
        branch = continuation.continue_simply(flow.a, flow.m, flow.s_max, flow.ds, flow.k_modes)

    digest = config.config_hash()
    report = {
        "metadata": {
            "profile": config.profile,
            "radii": list(radii),
            "m": flow.m,
            "s_max": flow.s_max,
            "ds": flow.ds,
            "k_modes": flow.k_modes,
            "newton_tol": config.tolerances.newton_tol,
            "config_hash": digest,
        },
        "branch": branch.to_dict(),
        "residual_report": [continuation.residual_report(step) for step in branch.steps],
    }
    output = config.output_dir / f"branch_{branch.label}_m{flow.m}.json"
    write_json_report(report, output)
    print(f"[INFO] Branch with {len(branch.steps)} records written: {output}")

    if getattr(args, "boundaries", False):
        for index, step in enumerate(branch.steps):
            write_boundary_csv(step.contours, config.output_dir / "boundaries" / f"step_{index:03d}.csv", digest)
        print(f"[INFO] Boundary CSVs written under: {config.output_dir / 'boundaries'}")

    if branch.k_flagged:
        print("[WARN] Spectral tail above tolerance; consider a larger --k.")
    if branch.truncated:
        print(f"[WARN] Branch truncated: {branch.diagnostic}")
        if not flow.allow_truncation:
            return EXIT_TRUNCATED
    return EXIT_OK


def cmd_verify(config: RunConfig, args: argparse.Namespace) -> int:
    suite = VerificationSuite(config)
    results = suite.run(config.workflow.suite, jobs=config.workflow.jobs)
    failed = [result for result in results if not result.passed]
    report = {
        "metadata": {"profile": config.profile, "suite": config.workflow.suite, "config_hash": config.config_hash()},
        "summary": {"total": len(results), "passed": len(results) - len(failed), "failed": len(failed)},
        "checks": [result.to_dict() for result in results],
    }
    json_path = config.output_dir / "verify.json"
    md_path = config.output_dir / "verify.md"
    write_json_report(report, json_path)
    write_markdown_report(report, md_path)
    print(f"[INFO] JSON report written: {json_path}")
    print(f"[INFO] Markdown report written: {md_path}")
    if failed:
        print(f"[ERROR] Failing checks: {', '.join(result.check for result in failed)}")
        return EXIT_VERIFY
    return EXIT_OK


COMMANDS: dict[str, Callable[[RunConfig, argparse.Namespace], int]] = {
    "spectrum": cmd_spectrum,
    "bifpoints": cmd_bifpoints,
    "branch": cmd_branch,
    "verify": cmd_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = parse_args(argv)
    configure_logging(args.log_level)

    try:
        config = RunConfig.from_sources(args.config, args.profile, _overrides(args))
    except ConfigError as exc:
        print(f"[ERROR] Configuration failed: {exc}")
        return EXIT_CONFIG

    try:
        return COMMANDS[args.command](config, args)
    except ConfigError as exc:
        print(f"[ERROR] Configuration failed: {exc}")
        return EXIT_CONFIG
    except CrossCheckError as exc:
        print(f"[ERROR] Numerical cross-check failed: {exc}")
        return EXIT_CROSSCHECK
    except LakeVortError as exc:
        print(f"[ERROR] {type(exc).__name__}: {exc}")
        return EXIT_ERROR
    except Exception as exc:  # noqa: BLE001
        print(f"[ERROR] Unexpected failure: {exc}")
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
