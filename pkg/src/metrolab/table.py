"""Tabular results and CSV/JSON emission with a fixed numeric rendering."""
from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ContractViolationError

_KINDS = ("int", "real", "text")


def render_real(x: float) -> str:
    """12-significant-digit rendering used by every emitted number."""
    return f"{float(x):.11e}"


@dataclass(eq=False)
class ResultTable:
    """Rectangular, typed scenario output plus provenance metadata."""

    columns: list  # of (name, kind) with kind in {"int", "real", "text"}
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for name, kind in self.columns:
            if kind not in _KINDS:
                raise ContractViolationError(f"unknown column kind {kind!r}")
            if name in seen:
                raise ContractViolationError(f"duplicate column {name!r}")
            seen.add(name)
        for row in self.rows:
            self._check_row(row)

    def _check_row(self, row):
        if len(row) != len(self.columns):
            raise ContractViolationError(
                f"row width {len(row)} != {len(self.columns)} columns")
        for value, (name, kind) in zip(row, self.columns):
            if kind == "real" and not math.isfinite(float(value)):
                raise ContractViolationError(f"non-finite value in column {name!r}")
            if kind == "int" and int(value) != value:
                raise ContractViolationError(f"non-integer value in column {name!r}")

    def add_row(self, *values):
        self._check_row(values)
        self.rows.append(tuple(values))

    def column(self, name):
        idx = [c[0] for c in self.columns].index(name)
        return [row[idx] for row in self.rows]

    def formatted_rows(self):
        out = []
        for row in self.rows:
            cells = []
            for value, (_, kind) in zip(row, self.columns):
                if kind == "real":
                    cells.append(render_real(value))
                elif kind == "int":
                    cells.append(str(int(value)))
                else:
                    cells.append(str(value))
            out.append(cells)
        return out


def emit(table: ResultTable, formats=("csv", "json"), output_dir=".", stamp=None):
    """Write the table as CSV and/or a JSON manifest; returns the written paths.

    CSV: header row of column names, then rows with reals at 12 significant
    digits, newline-terminated UTF-8. JSON: {metadata, columns, rows} with
    reals rounded to the same 12 significant digits. File names are
    ``<scenario>_<stamp>.<ext>`` with a UTC timestamp unless ``stamp`` is given.
    """
    out_dir = Path(output_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ContractViolationError(f"cannot create output dir {out_dir}: {exc}") from exc
    scenario = table.metadata.get("scenario", "table")
    if stamp is None:
        stamp = time.strftime("%Y%m%dT%H%M%SZ", time.gmtime())
    paths = []
    for fmt in formats:
        path = out_dir / f"{scenario}_{stamp}.{fmt}"
        try:
            if fmt == "csv":
                with open(path, "w", newline="", encoding="utf-8") as fh:
                    writer = csv.writer(fh, lineterminator="\n")
                    writer.writerow([c[0] for c in table.columns])
                    writer.writerows(table.formatted_rows())
            elif fmt == "json":
                payload = {
                    "metadata": table.metadata,
                    "columns": [{"name": n, "kind": k} for n, k in table.columns],
                    "rows": [
                        [float(render_real(v)) if k == "real" else
                         (int(v) if k == "int" else str(v))
                         for v, (_, k) in zip(row, table.columns)]
                        for row in table.rows
                    ],
                }
                with open(path, "w", encoding="utf-8") as fh:
                    json.dump(payload, fh, indent=1, sort_keys=True)
                    fh.write("\n")
            else:
                raise ContractViolationError(f"unknown emit format {fmt!r}")
        except OSError as exc:
            raise ContractViolationError(f"failed writing {path}: {exc}") from exc
        paths.append(path)
    return paths


def parse_csv(path):
    """Read back an emitted CSV as (header, list of string rows)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    return rows[0], rows[1:]
