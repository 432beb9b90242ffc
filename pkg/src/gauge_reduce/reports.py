"""Check outcomes and report files.

A report is a list of named checks, each with a residual, the tolerance it
was held to, and the pass flag (``pass`` iff ``residual <= tolerance``);
the report passes iff all checks do.  Reports serialize to JSON (full
record, including wall time per check) and to CSV with exactly four
columns: check name, residual, tolerance, pass.  The CSV contains no
timing, so identical configurations reproduce it byte for byte.  Files are
written to a temporary name and renamed into place.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["CheckOutcome", "Report", "write_report_files"]


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    residual: float
    tolerance: float
    dx_scaled: bool = False  # residual expected to shrink like dx^2
    seconds: float = 0.0
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)


@dataclass
class Report:
    scenario: str
    group: str
    config: dict
    checks: list[CheckOutcome] = field(default_factory=list)

    @property
    def overall_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> str:
        payload = {
            "scenario": self.scenario,
            "group": self.group,
            "config": self.config,
            "overall_pass": self.overall_pass,
            "checks": [
                {
                    "name": c.name,
                    "residual": c.residual,
                    "tolerance": c.tolerance,
                    "pass": c.passed,
                    "dx_scaled": c.dx_scaled,
                    "seconds": c.seconds,
                    "detail": c.detail,
                }
                for c in self.checks
            ],
        }
        return json.dumps(payload, indent=1, sort_keys=True)

    def to_csv(self) -> str:
        lines = ["check,residual,tolerance,pass"]
        for c in self.checks:
            lines.append(f"{c.name},{c.residual:.16e},{c.tolerance:.16e},{str(c.passed).lower()}")
        return "\n".join(lines) + "\n"

    def summary_lines(self) -> list[str]:
        out = []
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            out.append(f"[{status}] {c.name}: residual {c.residual:.3e} (tol {c.tolerance:.3e})")
        out.append(f"overall: {'pass' if self.overall_pass else 'FAIL'}")
        return out


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def write_report_files(report: Report, out_dir: str | os.PathLike, stem: str) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{stem}.csv"
    json_path = out / f"{stem}.json"
    _atomic_write(csv_path, report.to_csv())
    _atomic_write(json_path, report.to_json())
    return csv_path, json_path
