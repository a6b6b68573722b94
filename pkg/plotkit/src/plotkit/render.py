"""Deterministic figure rendering from CSV tables.

Rendering is read-only over its inputs: the only numeric work is evaluating
the declared reference-curve expressions on the x samples.
"""
from __future__ import annotations

import csv
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .expr import ExpressionError, compile_expression
from .spec import FigureSpec, SpecError

_STYLE = Path(__file__).parent / "styles" / "plotkit.mplstyle"


def read_table(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SpecError(f"{path} is empty")
    header, data = rows[0], rows[1:]
    return header, data


def _column(header, data, name, path):
    if name not in header:
        raise SpecError(f"column {name!r} not found in {path} (has {header})")
    idx = header.index(name)
    return [row[idx] for row in data]


def _as_float(values, name):
    try:
        return np.array([float(v) for v in values])
    except ValueError as exc:
        raise SpecError(f"column {name!r} is not numeric: {exc}") from exc


def render(spec: FigureSpec) -> Path:
    """Render one figure and return the written path."""
    src = spec.resolve_input()
    header, data = read_table(src)
    if not data:
        raise SpecError(f"{src} has no data rows")
    for col, value in spec.where.items():
        keep = []
        raw = _column(header, data, col, src)
        for row, cell in zip(data, raw):
            try:
                match = float(cell) == float(value)
            except (TypeError, ValueError):
                match = cell == str(value)
            if match:
                keep.append(row)
        data = keep
    if not data:
        raise SpecError(f"'where' filter {spec.where} left no rows of {src}")
    x = _as_float(_column(header, data, spec.x, src), spec.x)
    y = _as_float(_column(header, data, spec.y, src), spec.y)
    curves = [(c.label, compile_expression(c.expression, spec.x))
              for c in spec.reference_curves]

    plt.style.use(_STYLE)
    fig, ax = plt.subplots()
    plot = {"linear": ax.plot, "loglog": ax.loglog, "semilogx": ax.semilogx}[spec.scale]
    if spec.series_by:
        series = _column(header, data, spec.series_by, src)
        for key in sorted(set(series), key=lambda s: (len(s), s)):
            mask = np.array([s == key for s in series])
            order = np.argsort(x[mask], kind="stable")
            plot(x[mask][order], y[mask][order], marker="o",
                 label=f"{spec.series_by}={key}")
    else:
        order = np.argsort(x, kind="stable")
        plot(x[order], y[order], marker="o", label=spec.y)
    xs = np.unique(x)
    for label, fn in curves:
        plot(xs, fn(xs), linestyle="--", marker="", label=label)
    ax.set_xlabel(spec.x)
    ax.set_ylabel(spec.y)
    if spec.title:
        ax.set_title(spec.title)
    ax.legend(loc="best")
    out = Path(spec.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    metadata = {"Date": None} if spec.output_format in ("svg", "png") else None
    fig.savefig(out, format=spec.output_format, metadata=metadata)
    plt.close(fig)
    return out


def guide_deviation(spec: FigureSpec, guide_column: str, expression: str) -> float:
    """Max |expression(x) - tabulated guide column| over the (filtered) rows.

    The automated check that a rendered reference curve reproduces the
    matching table column.
    """
    src = spec.resolve_input()
    header, data = read_table(src)
    for col, value in spec.where.items():
        raw = _column(header, data, col, src)
        data = [row for row, cell in zip(data, raw)
                if (cell == str(value) or _safe_eq(cell, value))]
    x = _as_float(_column(header, data, spec.x, src), spec.x)
    g = _as_float(_column(header, data, guide_column, src), guide_column)
    fn = compile_expression(expression, spec.x)
    return float(np.max(np.abs(fn(x) - g))) if len(x) else 0.0


def _safe_eq(cell, value):
    try:
        return float(cell) == float(value)
    except (TypeError, ValueError):
        return False
