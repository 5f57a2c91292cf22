"""AST node types for the twin query language.

Expression-only language: literals, identifiers, calls, comparison and
arithmetic operators, boolean combinators, and list comprehensions that
iterate object or frame lists.  No assignment, no general loops, no I/O
nodes exist, so evaluation is sandboxed by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

Expr = Union["Literal", "Name", "Call", "BinOp", "UnaryOp", "Comprehension"]

MAX_DEPTH = 32


@dataclass(frozen=True)
class Literal:
    value: Union[int, float, str, bool]


@dataclass(frozen=True)
class Name:
    ident: str


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple[Expr, ...]
    kwargs: tuple[tuple[str, Expr], ...] = ()


@dataclass(frozen=True)
class BinOp:
    op: str  # + - * / == != < <= > >= and or
    left: Expr
    right: Expr


@dataclass(frozen=True)
class UnaryOp:
    op: str  # - not
    operand: Expr


@dataclass(frozen=True)
class Comprehension:
    expr: Expr
    var: str
    iterable: Expr
    cond: Optional[Expr] = None


def depth(node: Expr) -> int:
    if isinstance(node, (Literal, Name)):
        return 1
    if isinstance(node, Call):
        children = list(node.args) + [e for _, e in node.kwargs]
        return 1 + max((depth(c) for c in children), default=0)
    if isinstance(node, BinOp):
        return 1 + max(depth(node.left), depth(node.right))
    if isinstance(node, UnaryOp):
        return 1 + depth(node.operand)
    if isinstance(node, Comprehension):
        parts = [node.expr, node.iterable] + ([node.cond] if node.cond else [])
        return 1 + max(depth(p) for p in parts)
    raise TypeError(f"not an AST node: {node!r}")
