"""Figure specifications: a strict YAML schema mirroring the metrolab config
style (unknown keys are errors)."""
from __future__ import annotations

import glob
from dataclasses import dataclass, field
from pathlib import Path

import yaml


class SpecError(ValueError):
    pass


_TOP_KEYS = {"input_csv", "x", "y", "series_by", "where", "scale",
             "reference_curves", "output", "title"}
_OUTPUT_KEYS = {"path", "format"}
_SCALES = ("linear", "loglog", "semilogx")
_FORMATS = ("svg", "pdf", "png")


@dataclass(frozen=True)
class ReferenceCurve:
    label: str
    expression: str


@dataclass(frozen=True)
class FigureSpec:
    input_csv: str
    x: str
    y: str
    output_path: str
    output_format: str = "svg"
    series_by: str | None = None
    where: dict = field(default_factory=dict)
    scale: str = "linear"
    reference_curves: tuple = ()
    title: str = ""

    def resolve_input(self) -> Path:
        """Resolve the CSV path; a glob pattern picks the newest-stamped match."""
        if any(ch in self.input_csv for ch in "*?["):
            matches = sorted(glob.glob(self.input_csv))
            if not matches:
                raise SpecError(f"no CSV matches {self.input_csv!r}")
            return Path(matches[-1])
        return Path(self.input_csv)


def spec_from_dict(raw: dict) -> FigureSpec:
    if not isinstance(raw, dict):
        raise SpecError("figure spec must be a mapping")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise SpecError(f"unknown figure-spec keys: {sorted(unknown)}")
    for key in ("input_csv", "x", "y", "output"):
        if key not in raw:
            raise SpecError(f"figure spec is missing {key!r}")
    output = raw["output"]
    if not isinstance(output, dict) or set(output) - _OUTPUT_KEYS or "path" not in output:
        raise SpecError("'output' must be a mapping with 'path' (and optional 'format')")
    fmt = output.get("format", "svg")
    if fmt not in _FORMATS:
        raise SpecError(f"unknown output format {fmt!r} (use one of {_FORMATS})")
    scale = raw.get("scale", "linear")
    if scale not in _SCALES:
        raise SpecError(f"unknown scale {scale!r} (use one of {_SCALES})")
    where = raw.get("where", {}) or {}
    if not isinstance(where, dict):
        raise SpecError("'where' must be a mapping of column: value")
    curves = []
    for item in raw.get("reference_curves", []) or []:
        if not isinstance(item, dict) or set(item) - {"label", "expression"}:
            raise SpecError("reference curves need exactly 'label' and 'expression'")
        curves.append(ReferenceCurve(str(item.get("label", "")), str(item["expression"])))
    return FigureSpec(
        input_csv=str(raw["input_csv"]), x=str(raw["x"]), y=str(raw["y"]),
        output_path=str(output["path"]), output_format=fmt,
        series_by=str(raw["series_by"]) if raw.get("series_by") else None,
        where=dict(where), scale=scale, reference_curves=tuple(curves),
        title=str(raw.get("title", "")))


def load_spec(path) -> FigureSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise SpecError(f"cannot read figure spec {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise SpecError(f"figure spec {path} is not valid YAML: {exc}") from exc
    return spec_from_dict(raw)
