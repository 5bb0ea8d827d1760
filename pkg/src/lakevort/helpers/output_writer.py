﻿from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import pandas as pd

from ..contour import FourierContour


def _atomic_write(output_file: Path, text: str) -> None:
    output_file.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(
        "w", encoding="utf-8", newline="", dir=output_file.parent, prefix=f".{output_file.name}.", delete=False
    )
    try:
        with handle:
            handle.write(text)
        os.replace(handle.name, output_file)
    except BaseException:
        Path(handle.name).unlink(missing_ok=True)
        raise


def _json_safe(value: Any) -> Any:
    """Plain JSON values; NaN and infinities become null."""
    if isinstance(value, dict):
        return {key: _json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(item) for item in value]
    if isinstance(value, np.ndarray):
        return _json_safe(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_json_report(report: dict[str, Any], output_file: Path) -> None:
    text = json.dumps(_json_safe(report), indent=2, sort_keys=False, allow_nan=False)
    _atomic_write(output_file, text + "\n")


def write_csv_table(records: Sequence[dict[str, Any]], output_file: Path, config_hash: str) -> None:
    """CSV with a leading '# config_hash: <hex>' comment line, then the header row."""
    frame = pd.DataFrame.from_records(list(records))
    body = frame.to_csv(index=False, lineterminator="\n")
    _atomic_write(output_file, f"# config_hash: {config_hash}\n{body}")


def boundary_records(contours: Iterable[FourierContour], samples: int = 512) -> list[dict[str, Any]]:
    theta = 2.0 * np.pi * np.arange(samples) / samples
    records: list[dict[str, Any]] = []
    for index, contour in enumerate(contours, start=1):
        x, y = contour.boundary_points(theta)
        records.extend(
            {"contour": index, "theta": float(t), "x": float(px), "y": float(py)} for t, px, py in zip(theta, x, y)
        )
    return records


def write_boundary_csv(
    contours: Iterable[FourierContour], output_file: Path, config_hash: str, samples: int = 512
) -> None:
    write_csv_table(boundary_records(contours, samples), output_file, config_hash)


def write_markdown_report(report: dict[str, Any], output_file: Path) -> None:
    _atomic_write(output_file, _build_markdown(report))


def _format_value(value: float) -> str:
    return f"{value:.3e}" if isinstance(value, float) else str(value)


def _build_markdown(report: dict[str, Any]) -> str:
    metadata = report["metadata"]
    summary = report["summary"]

    lines: list[str] = []
    lines.append("# Lake-Equation V-State Verification Report")
    lines.append("")
    lines.append(f"- Profile: `{json.dumps(metadata['profile'], sort_keys=True)}`")
    lines.append(f"- Suite: `{metadata['suite']}`")
    lines.append(f"- Config hash: `{metadata['config_hash']}`")
    lines.append("")

    lines.append("## Summary")
    lines.append("")
    lines.append("| Metric | Value |")
    lines.append("|---|---:|")
    lines.append(f"| Checks | {summary['total']} |")
    lines.append(f"| Passed | {summary['passed']} |")
    lines.append(f"| Failed | {summary['failed']} |")
    lines.append("")

    lines.append("## Checks")
    lines.append("")
    lines.append("| Check | Value | Tolerance | Result |")
    lines.append("|---|---:|---:|---|")
    for item in report["checks"]:
        result = "PASS" if item["pass"] else "FAIL"
        lines.append(
            f"| {item['check']} | {_format_value(item['value'])} | {_format_value(item['tolerance'])} | {result} |"
        )
    if not report["checks"]:
        lines.append("| - | - | - | No checks selected |")

    if summary["failed"]:
        lines.append("")
        lines.append("## Failing Checks")
        lines.append("")
        for item in report["checks"]:
            if not item["pass"]:
                lines.append(f"- `{item['check']}` with params `{json.dumps(item['params'], sort_keys=True)}`")

    lines.append("")
    lines.append("- Full machine-readable results are available in the JSON artifact.")
    return "\n".join(lines) + "\n"
