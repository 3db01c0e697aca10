"""Deterministic experiment reports.

JSON output is ``json.dumps(..., sort_keys=True, indent=2)`` plus a trailing
newline. Floats use Python's shortest round-trip repr, so equal doubles give
equal bytes on every platform. Non-finite floats become the strings
``"inf"``, ``"-inf"`` and ``"nan"``.

CSV output has a header row, ``'\\n'`` line endings and no locale handling.
List-valued cells (partitions) are space-joined.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

import numpy as np

from . import __version__


def to_plain(value: Any) -> Any:
    """Recursively convert to JSON-native types."""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if hasattr(value, "to_json"):
        return to_plain(value.to_json())
    return value


@dataclass
class ExperimentReport:
    name: str
    seed: int
    parameters: dict
    rows: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    version: str = __version__

    def to_dict(self) -> dict:
        return to_plain(
            {
                "name": self.name,
                "seed": self.seed,
                "parameters": self.parameters,
                "rows": self.rows,
                "summary": self.summary,
                "version": self.version,
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def to_csv(self) -> str:
        rows = to_plain(self.rows)
        columns: list[str] = []
        for row in rows:
            for key in row:
                if key not in columns:
                    columns.append(key)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c, "")) for c in columns])
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        return self.to_csv() if fmt == "csv" else self.to_json()


def _cell(value: Any) -> str:
    if isinstance(value, list):
        return " ".join(_cell(v) for v in value)
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True, separators=(",", ":"))
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def load_schema() -> dict:
    return json.loads(resources.files("schurdistill").joinpath("report.schema.json").read_text())
