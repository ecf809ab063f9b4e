"""Tables, deterministic CSV/JSON rendering and plain-text series files."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

__all__ = ["Table", "fmt_value", "json_value", "render_text", "render_csv", "render_json",
           "write_series", "write_matrix"]


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    title: str = ""

    def add(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"{self.name}: expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(list(values))

    def records(self) -> list[dict]:
        return [dict(zip(self.columns, row)) for row in self.rows]


def fmt_value(v: Any) -> str:
    """Text form used everywhere: 12 significant digits for floats."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        x = float(v)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if x == 0.0:
            return "0"
        return f"{x:.12g}"
    if v is None:
        return ""
    return str(v)


def json_value(v: Any) -> Any:
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        x = float(v)
        if not math.isfinite(x):
            return fmt_value(x)
        return float(f"{x:.12g}")
    return v


def render_text(tables: Sequence[Table]) -> str:
    out = []
    for t in tables:
        cells = [[fmt_value(v) for v in row] for row in t.rows]
        widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(t.columns)]
        if t.title:
            out.append(t.title)
        out.append("  ".join(c.ljust(w) for c, w in zip(t.columns, widths)).rstrip())
        out.append("  ".join("-" * w for w in widths))
        for r in cells:
            out.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        out.append("")
    return "\n".join(out)


def render_csv(table: Table) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(table.columns)
    for row in table.rows:
        wr.writerow([fmt_value(v) for v in row])
    return buf.getvalue()


def render_json(command: str, tables: Sequence[Table], meta: dict | None = None) -> str:
    doc = {
        "command": command,
        "meta": {k: json_value(v) for k, v in (meta or {}).items()},
        "tables": {
            t.name: [{c: json_value(v) for c, v in zip(t.columns, row)} for row in t.rows]
            for t in tables
        },
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_series(path: Path, header: Sequence[str], columns: Iterable[Sequence[float]]) -> None:
    """Whitespace-separated columns with a '#' header line."""
    cols = [list(c) for c in columns]
    lines = ["# " + " ".join(header)]
    for row in zip(*cols):
        lines.append(" ".join(fmt_value(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_matrix(path: Path, r_grid, theta_grid, values) -> None:
    """Field values, one row per radius, with both grids in header lines."""
    lines = ["# r: " + " ".join(fmt_value(v) for v in r_grid),
             "# theta: " + " ".join(fmt_value(v) for v in theta_grid)]
    for row in np.asarray(values):
        lines.append(" ".join(fmt_value(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")
