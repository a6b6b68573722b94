"""Tiny safe evaluator for reference-curve expressions over one free variable.

Accepts arithmetic, ``^`` or ``**`` powers, the constants pi and e, and the
functions sqrt, exp, log, log10, sin, cos, abs. Anything else is rejected.
"""
from __future__ import annotations

import ast
import math

import numpy as np

_FUNCS = {
    "sqrt": np.sqrt,
    "exp": np.exp,
    "log": np.log,
    "log10": np.log10,
    "sin": np.sin,
    "cos": np.cos,
    "abs": np.abs,
}
_CONSTS = {"pi": math.pi, "e": math.e}

_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_ALLOWED_UNARY = (ast.UAdd, ast.USub)


class ExpressionError(ValueError):
    pass


def compile_expression(text: str, variable: str):
    """Return a vectorized callable f(x) for ``text`` over ``variable``."""
    source = text.replace("^", "**")
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse expression {text!r}: {exc}") from exc

    def check(node):
        if isinstance(node, ast.Expression):
            check(node.body)
        elif isinstance(node, ast.BinOp):
            if not isinstance(node.op, _ALLOWED_BINOPS):
                raise ExpressionError(f"operator not allowed in {text!r}")
            check(node.left)
            check(node.right)
        elif isinstance(node, ast.UnaryOp):
            if not isinstance(node.op, _ALLOWED_UNARY):
                raise ExpressionError(f"operator not allowed in {text!r}")
            check(node.operand)
        elif isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS:
                raise ExpressionError(f"function not allowed in {text!r}")
            if node.keywords or len(node.args) != 1:
                raise ExpressionError(f"bad call signature in {text!r}")
            check(node.args[0])
        elif isinstance(node, ast.Name):
            if node.id != variable and node.id not in _CONSTS:
                raise ExpressionError(
                    f"unknown name {node.id!r} in {text!r} (variable is {variable!r})")
        elif isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float)):
                raise ExpressionError(f"non-numeric constant in {text!r}")
        else:
            raise ExpressionError(f"syntax not allowed in {text!r}")

    check(tree)
    code = compile(tree, "<reference-curve>", "eval")

    def evaluate(x):
        env = {variable: np.asarray(x, dtype=float), **_CONSTS, **_FUNCS}
        return np.asarray(eval(code, {"__builtins__": {}}, env), dtype=float)

    return evaluate
