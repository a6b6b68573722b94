"""Declarative batch renderer for metrolab CSV tables."""
from .expr import ExpressionError, compile_expression
from .render import guide_deviation, render
from .spec import FigureSpec, ReferenceCurve, SpecError, load_spec, spec_from_dict

__version__ = "0.1.0"
