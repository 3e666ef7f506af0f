"""
Report model and CSV/JSON writers for mpspec
"""

import csv
import json
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from config.settings import MESSAGES
from utils.helpers import format_float

logger = logging.getLogger(__name__)


@dataclass
class Check:
    name: str
    value: Any
    bound: Any
    passed: bool

    def __post_init__(self):
        self.passed = bool(self.passed)


@dataclass
class Table:
    """Plot-ready experiment data written next to the report."""

    name: str
    header: Sequence[str]
    rows: List[Sequence[Any]] = field(default_factory=list)


@dataclass
class Suite:
    name: str
    checks: List[Check] = field(default_factory=list)

    def add(self, name, value, bound, passed):
        check = Check(name=name, value=value, bound=bound, passed=passed)
        self.checks.append(check)
        return check

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def first_failure(self):
        return next((c for c in self.checks if not c.passed), None)


@dataclass
class Report:
    config: Dict[str, Any]
    suites: List[Suite] = field(default_factory=list)
    tables: List[Table] = field(default_factory=list)

    @property
    def passed(self):
        return all(s.passed for s in self.suites)

    @property
    def first_failure(self):
        """(suite name, check) of the first failing check, or None."""
        for suite in self.suites:
            check = suite.first_failure
            if check is not None:
                return suite.name, check
        return None

    def summary(self):
        total = sum(len(s.checks) for s in self.suites)
        failed = sum(1 for s in self.suites for c in s.checks if not c.passed)
        return total, failed


# =============================================================================
# WRITERS
# =============================================================================

def write_csv(path, header, rows):
    """Write a header row and data rows; LF line endings, 17-digit floats."""
    rows = list(rows)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(v) for v in row])
    logger.debug("wrote %d rows to %s", len(rows), path)
    return path


def _jsonable(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in value]
    return value


def report_to_dict(report):
    return {
        "config": _jsonable(report.config),
        "suites": [
            {
                "name": s.name,
                "checks": [
                    {"name": c.name, "value": _jsonable(c.value), "bound": _jsonable(c.bound), "pass": c.passed}
                    for c in s.checks
                ],
            }
            for s in report.suites
        ],
        "tables": [
            {"name": t.name, "header": list(t.header), "rows": _jsonable([list(r) for r in t.rows])}
            for t in report.tables
        ],
    }


def table_path(path, table):
    stem, _ = os.path.splitext(path)
    return f"{stem}.{table.name}.csv"


def write_report(report, path, fmt="csv"):
    """
    Write the check report and return every file written.

    Args:
        report: Report to write
        path: Output path for the check report
        fmt: "csv" (one row per check, tables as sibling CSV files) or
             "json" (tables embedded)

    Returns:
        list: Paths written, report first
    """
    if fmt == "json":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(report_to_dict(report), fh, indent=2, sort_keys=False)
            fh.write("\n")
        return [path]

    rows = [(s.name, c.name, c.value, c.bound, c.passed) for s in report.suites for c in s.checks]
    written = [write_csv(path, ("suite", "check", "value", "bound", "pass"), rows)]
    for table in report.tables:
        written.append(write_csv(table_path(path, table), table.header, table.rows))
    return written


def print_summary(report, command, out_path: Optional[str] = None):
    """Console pass/fail block in the controller's banner style."""
    total, failed = report.summary()
    print("=" * 50)
    print(f"mpspec {command}: {total - failed}/{total} checks passed")
    print("=" * 50)
    for suite in report.suites:
        status = "OK" if suite.passed else "FAILED"
        print(f"  {suite.name:<28} {status}")
    first = report.first_failure
    if first is not None:
        suite_name, check = first
        print("-" * 50)
        print(f"First failing check: {suite_name}/{check.name} "
              f"(value={format_float(check.value)}, bound={format_float(check.bound)})")
    if out_path:
        print("-" * 50)
        print(MESSAGES["written"].format(path=out_path))
