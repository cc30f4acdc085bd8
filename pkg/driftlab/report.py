"""
Run reports: report.json, CSV tables, plots and a separate metadata file.

report.json is a pure function of the configuration; the wall-clock time
of a run only ever goes to metadata.json.
"""

import csv
import json
import logging
import math
import platform
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import NoDataError
from .plotting import PlotKind, Series, positive, write_plot

logger = logging.getLogger(__name__)

REPORT_FILE = "report.json"
METADATA_FILE = "metadata.json"
PROBES_FILE = "probes.csv"
FAMILY_FILE = "family.csv"
SOLUTION_FILE = "solution.csv"


def package_versions() -> Dict[str, str]:
    out = {"python": platform.python_version()}
    for name in ("drift-lab", "numpy", "scipy", "pydantic"):
        try:
            out[name] = version(name)
        except PackageNotFoundError:
            out[name] = "unknown"
    return out


def to_jsonable(value: Any) -> Any:
    """Plain JSON types; non-finite floats become the strings 'inf', '-inf' and 'nan'."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else str(v)
    return value


def _fmt(v: float) -> str:
    return f"{v:.17g}"


@dataclass
class RunReport:
    command: str
    config_hash: str
    sections: Dict[str, Any]
    failures: List[str] = field(default_factory=list)
    probes: Optional[List[Tuple[float, Optional[float]]]] = None
    family: Optional[Tuple[np.ndarray, List[Tuple[float, np.ndarray]]]] = None
    solution: Optional[Tuple[np.ndarray, np.ndarray]] = None

    @property
    def passed(self) -> bool:
        return not self.failures

    def document(self) -> Dict[str, Any]:
        return to_jsonable(
            {
                "command": self.command,
                "config_hash": self.config_hash,
                "passed": self.passed,
                "failures": self.failures,
                "versions": package_versions(),
                **self.sections,
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.document(), indent=2, sort_keys=True) + "\n"


def write_probes(path: Path, probes: Sequence[Tuple[float, Optional[float]]]) -> Path:
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["R", "u_at_rstar"])
        for radius, value in probes:
            writer.writerow([_fmt(radius), "" if value is None else _fmt(value)])
    return path


def write_family(path: Path, r: np.ndarray, members: Sequence[Tuple[float, np.ndarray]]) -> Path:
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["r"] + [f"u_gamma_{gamma:g}" for gamma, _ in members])
        for i, radius in enumerate(r):
            writer.writerow([_fmt(radius)] + [_fmt(values[i]) for _, values in members])
    return path


def write_solution(path: Path, r: np.ndarray, u: np.ndarray) -> Path:
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["r", "u"])
        for radius, value in zip(r, u):
            writer.writerow([_fmt(radius), _fmt(value)])
    return path


def emit_plot(report: RunReport, kind: PlotKind, out_dir: Path) -> Path:
    """Write plot_<kind>.svg from the matching table of the report."""
    path = out_dir / f"plot_{kind.value}.svg"
    if kind is PlotKind.SOLUTION_PROFILE:
        if report.solution is None or len(report.solution[0]) == 0:
            raise NoDataError("report has no solution table")
        r, u = report.solution
        return write_plot(path, [Series("u", r, u)], "Solution profile", "r", "u")
    if kind is PlotKind.PROBE_VS_R:
        rows = [(radius, value) for radius, value in (report.probes or []) if value is not None]
        if not rows:
            raise NoDataError("report has no probe table")
        radii = [a for a, _ in rows]
        values = [b for _, b in rows]
        log_y = positive(values)
        return write_plot(path, [Series("u(r*)", radii, values)], "Probe value against R", "R", "u", log_y=log_y)
    if report.family is None or not report.family[1]:
        raise NoDataError("report has no family table")
    r, members = report.family
    series = [Series(f"gamma = {gamma:g}", r, values) for gamma, values in members]
    return write_plot(path, series, "Solution family", "r", "u")


def write_run(report: RunReport, out_dir: Path, started: datetime) -> List[Path]:
    """Write every artifact the report carries; returns the paths written."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [out_dir / REPORT_FILE]
    written[0].write_text(report.to_json(), encoding="utf-8")
    if report.probes:
        written.append(write_probes(out_dir / PROBES_FILE, report.probes))
        try:
            written.append(emit_plot(report, PlotKind.PROBE_VS_R, out_dir))
        except NoDataError as e:
            logger.warning("probe plot skipped: %s", e)
    if report.family is not None and report.family[1]:
        written.append(write_family(out_dir / FAMILY_FILE, *report.family))
        written.append(emit_plot(report, PlotKind.FAMILY_OVERLAY, out_dir))
    if report.solution is not None:
        written.append(write_solution(out_dir / SOLUTION_FILE, *report.solution))
        written.append(emit_plot(report, PlotKind.SOLUTION_PROFILE, out_dir))
    metadata = {
        "started": started.isoformat(),
        "finished": datetime.now(timezone.utc).isoformat(),
        "command": report.command,
        "config_hash": report.config_hash,
        "files": [p.name for p in written],
    }
    (out_dir / METADATA_FILE).write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    for p in written:
        logger.info("wrote %s", p)
    return written
