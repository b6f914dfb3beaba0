"""A small arithmetic-expression evaluator over (x, t).

Grammar: numbers, the names ``x``, ``t``, ``pi``, ``i`` (imaginary unit), the binary
operators ``+ - * / **`` (``^`` is accepted as a power), unary ``+ -`` and the
functions ``exp``, ``sin``, ``cos``.  Expressions are parsed once with :mod:`ast`
and evaluated with numpy, so they broadcast over arrays.
"""
from __future__ import annotations

import ast
import operator

import numpy as np

__all__ = ["Expression", "ExpressionError"]


class ExpressionError(ValueError):
    pass


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNOPS = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_FUNCS = {"exp": np.exp, "sin": np.sin, "cos": np.cos}
_CONSTS = {"pi": np.pi, "i": 1j}
_VARS = ("x", "t")


class Expression:
    """Compiled expression; call as ``expr(x, t)``."""

    def __init__(self, text: str):
        self.text = str(text).strip()
        if not self.text:
            raise ExpressionError("empty expression")
        try:
            # '^' is rewritten before parsing so that -x^2 means -(x**2)
            tree = ast.parse(self.text.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise ExpressionError(f"cannot parse {self.text!r}: {exc.msg}") from None
        self._body = tree.body
        self._check(self._body)

    def _check(self, node):
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, (int, float, complex)):
                raise ExpressionError(f"unsupported constant {node.value!r} in {self.text!r}")
        elif isinstance(node, ast.Name):
            if node.id not in _VARS and node.id not in _CONSTS:
                raise ExpressionError(f"unknown name {node.id!r} in {self.text!r}")
        elif isinstance(node, ast.BinOp):
            if type(node.op) not in _BINOPS:
                raise ExpressionError(f"unsupported operator in {self.text!r}")
            self._check(node.left)
            self._check(node.right)
        elif isinstance(node, ast.UnaryOp):
            if type(node.op) not in _UNOPS:
                raise ExpressionError(f"unsupported operator in {self.text!r}")
            self._check(node.operand)
        elif isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS:
                raise ExpressionError(f"unsupported function in {self.text!r}")
            if len(node.args) != 1 or node.keywords:
                raise ExpressionError(f"{node.func.id} takes exactly one argument")
            self._check(node.args[0])
        else:
            raise ExpressionError(f"unsupported syntax {type(node).__name__} in {self.text!r}")

    @property
    def is_complex(self):
        return any(isinstance(n, ast.Name) and n.id == "i" or
                   isinstance(n, ast.Constant) and isinstance(n.value, complex)
                   for n in ast.walk(self._body))

    def _eval(self, node, env):
        if isinstance(node, ast.Constant):
            return node.value
        if isinstance(node, ast.Name):
            return env[node.id] if node.id in env else _CONSTS[node.id]
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](self._eval(node.left, env), self._eval(node.right, env))
        if isinstance(node, ast.UnaryOp):
            return _UNOPS[type(node.op)](self._eval(node.operand, env))
        return _FUNCS[node.func.id](self._eval(node.args[0], env))

    def __call__(self, x=0.0, t=0.0):
        x, t = np.broadcast_arrays(np.asarray(x), np.asarray(t))
        with np.errstate(all="ignore"):
            out = self._eval(self._body, {"x": x, "t": t})
        return np.broadcast_to(np.asarray(out), x.shape) + 0 * x

    def __repr__(self):
        return f"Expression({self.text!r})"
