from .ast import BinOp, Call, Comprehension, Expr, Literal, Name, UnaryOp
from .errors import (
    BudgetExceeded,
    FrameOutOfRange,
    NoSuchObject,
    QlError,
    QlSyntaxError,
    QlTypeError,
    UnknownIdentifier,
)
from .evaluator import EvalLimits, ObjRef, Value, evaluate, render_value, run_program
from .parser import parse_program

__all__ = [
    "BinOp",
    "Call",
    "Comprehension",
    "Expr",
    "Literal",
    "Name",
    "UnaryOp",
    "BudgetExceeded",
    "FrameOutOfRange",
    "NoSuchObject",
    "QlError",
    "QlSyntaxError",
    "QlTypeError",
    "UnknownIdentifier",
    "EvalLimits",
    "ObjRef",
    "Value",
    "evaluate",
    "render_value",
    "run_program",
    "parse_program",
]
