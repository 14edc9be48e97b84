"""Tiny integer arithmetic for parameters that scale with ``n`` (``100*n**4``, ``2*n+6``)."""

from __future__ import annotations

import ast
import operator

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.FloorDiv: operator.floordiv,
    ast.Pow: operator.pow,
    ast.Mod: operator.mod,
}


def _eval(node, names):
    if isinstance(node, ast.Expression):
        return _eval(node.body, names)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return node.value
    if isinstance(node, ast.Name) and node.id in names:
        return names[node.id]
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval(node.left, names), _eval(node.right, names))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand, names)
        return -v if isinstance(node.op, ast.USub) else v
    raise ValueError(f"unsupported expression element: {ast.dump(node)}")


def eval_number(text: str, **names):
    text = str(text).strip().replace("^", "**")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError:
        raise ValueError(f"cannot parse expression {text!r}") from None
    return _eval(tree, names)


def eval_int(text: str, **names) -> int:
    """Evaluate ``text`` and require an integral result (``1e7`` is accepted)."""
    v = eval_number(text, **names)
    if isinstance(v, float):
        if not v.is_integer():
            raise ValueError(f"{text!r} does not evaluate to an integer (got {v})")
        v = int(v)
    return v
