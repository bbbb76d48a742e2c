"""Structured results shared by the experiment runners, the CLI and the acceptance suite."""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def _library_version() -> str:
    from . import __version__

    return __version__


def _clean(value):
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, "item"):
        return _clean(value.item())
    return value


@dataclass
class CheckRecord:
    name: str
    value: float
    tolerance: float
    passed: bool
    detail: str = ""
    skipped: bool = False


@dataclass
class ExperimentReport:
    name: str
    config: dict
    records: list[CheckRecord] = field(default_factory=list)
    rows: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, name: str, value: float, tolerance: float, passed: bool, detail: str = "", skipped: bool = False):
        self.records.append(CheckRecord(name, float(value), float(tolerance), bool(passed), detail, skipped))

    def add_max(self, name: str, value: float, tolerance: float, detail: str = "") -> None:
        """Record a defect that must stay at or below ``tolerance``."""
        self.add(name, value, tolerance, value <= tolerance, detail)

    def add_min(self, name: str, value: float, floor: float, detail: str = "") -> None:
        """Record a slack that must stay at or above ``floor``."""
        self.add(name, value, floor, value >= floor, detail)

    @property
    def passed(self) -> bool:
        return all(r.passed or r.skipped for r in self.records)

    @property
    def is_sweep(self) -> bool:
        return bool(self.rows)

    def to_dict(self) -> dict:
        return _clean(asdict(self) | {
            "passed": self.passed,
            "schema_version": SCHEMA_VERSION,
            "library_version": _library_version(),
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def summary(self) -> str:
        lines = [f"{self.name}: {'PASS' if self.passed else 'FAIL'}"]
        for r in self.records:
            status = "skip" if r.skipped else ("ok" if r.passed else "FAIL")
            extra = f"  ({r.detail})" if r.detail else ""
            lines.append(f"  [{status:>4}] {r.name}: {r.value:.3e} vs {r.tolerance:.1e}{extra}")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)


def emit_plot_data(report: ExperimentReport, path: str | Path) -> bool:
    """Write the sweep table of ``report`` as CSV; returns ``False`` (and logs) for non-sweep reports."""
    if not report.is_sweep:
        log.warning("report %s has no sweep table; nothing written", report.name)
        return False
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = list(report.rows[0].keys())
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        for row in report.rows:
            writer.writerow({k: _clean(v) for k, v in row.items()})
    return True


def write_report(report: ExperimentReport, out_dir: str | Path) -> dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "json": out_dir / f"{report.name}.json",
        "text": out_dir / f"{report.name}.txt",
    }
    paths["json"].write_text(report.to_json() + "\n")
    paths["text"].write_text(report.summary() + "\n")
    csv_path = out_dir / f"{report.name}.csv"
    if emit_plot_data(report, csv_path):
        paths["csv"] = csv_path
    return paths
