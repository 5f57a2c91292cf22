"""Resource-limited evaluator for the twin query language.

Evaluation walks the AST directly over an immutable VideoTwin.  Every node
visit consumes one step from the budget, lists are capped, and the only
reachable data is the twin itself, so programs always halt and cannot touch
files, network, or process state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Union

from ..twin import VideoTwin
from .ast import BinOp, Call, Comprehension, Expr, Literal, Name, UnaryOp
from .errors import (
    BudgetExceeded,
    FrameOutOfRange,
    NoSuchObject,
    QlTypeError,
    UnknownIdentifier,
)

__all__ = ["ObjRef", "Value", "EvalLimits", "evaluate", "render_value"]


@dataclass(frozen=True)
class ObjRef:
    frame_index: int
    id: int


Value = Union[int, float, str, bool, ObjRef, list]


@dataclass(frozen=True)
class EvalLimits:
    step_budget: int = 100_000
    list_cap: int = 10_000


# Unary object accessors usable as bare key/predicate names,
# e.g. min_by(objects(frame=2), key=x).
_BARE_KEYS = {"x", "y", "depth", "size", "category"}


class _Evaluator:
    def __init__(self, twin: VideoTwin, limits: EvalLimits):
        self.twin = twin
        self.limits = limits
        self.steps = 0

    # -- plumbing ---------------------------------------------------------

    def _tick(self) -> None:
        self.steps += 1
        if self.steps > self.limits.step_budget:
            raise BudgetExceeded(f"step budget {self.limits.step_budget} exhausted")

    def _instance(self, ref: ObjRef):
        inst = self.twin.frames[ref.frame_index].instance(ref.id)
        if inst is None:
            raise NoSuchObject(f"no object id={ref.id} in frame {ref.frame_index}")
        return inst

    def _frame(self, k: Value) -> int:
        if not isinstance(k, int) or isinstance(k, bool):
            raise QlTypeError("frame", "Int", _type_name(k))
        if not 0 <= k < self.twin.frame_count:
            raise FrameOutOfRange(f"frame {k} outside 0..{self.twin.frame_count - 1}")
        return k

    def _objref(self, v: Value, where: str) -> ObjRef:
        if not isinstance(v, ObjRef):
            raise QlTypeError(where, "ObjRef", _type_name(v))
        return v

    def _list(self, v: Value, where: str) -> list:
        if not isinstance(v, list):
            raise QlTypeError(where, "List", _type_name(v))
        if len(v) > self.limits.list_cap:
            raise BudgetExceeded(f"list cap {self.limits.list_cap} exceeded")
        return v

    def _num(self, v: Value, where: str) -> float:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise QlTypeError(where, "number", _type_name(v))
        return v

    def _bool(self, v: Value, where: str) -> bool:
        if not isinstance(v, bool):
            raise QlTypeError(where, "Bool", _type_name(v))
        return v

    # -- evaluation -------------------------------------------------------

    def eval(self, node: Expr, env: dict[str, Value]) -> Value:
        self._tick()
        if isinstance(node, Literal):
            return node.value
        if isinstance(node, Name):
            if node.ident in env:
                return env[node.ident]
            raise UnknownIdentifier(node.ident)
        if isinstance(node, UnaryOp):
            if node.op == "-":
                return -self._num(self.eval(node.operand, env), "unary -")
            return not self._bool(self.eval(node.operand, env), "not")
        if isinstance(node, BinOp):
            return self._binop(node, env)
        if isinstance(node, Comprehension):
            items = self._list(self.eval(node.iterable, env), "comprehension iterable")
            out = []
            for item in items:
                self._tick()
                inner = dict(env)
                inner[node.var] = item
                if node.cond is not None and not self._bool(
                    self.eval(node.cond, inner), "comprehension condition"
                ):
                    continue
                out.append(self.eval(node.expr, inner))
            return out
        if isinstance(node, Call):
            return self._call(node, env)
        raise QlTypeError("eval", "AST node", type(node).__name__)

    def _binop(self, node: BinOp, env: dict[str, Value]) -> Value:
        op = node.op
        if op in ("and", "or"):
            left = self._bool(self.eval(node.left, env), op)
            if op == "and" and not left:
                return False
            if op == "or" and left:
                return True
            return self._bool(self.eval(node.right, env), op)
        left = self.eval(node.left, env)
        right = self.eval(node.right, env)
        if op in ("==", "!="):
            eq = _equal(left, right)
            return eq if op == "==" else not eq
        if op in ("<", "<=", ">", ">="):
            if isinstance(left, str) and isinstance(right, str):
                a, b = left, right
            else:
                a, b = self._num(left, op), self._num(right, op)
            return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]
        a, b = self._num(left, op), self._num(right, op)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if b == 0:
            raise QlTypeError("/", "non-zero divisor", "0")
        return a / b

    def _keyfn(self, expr: Expr, env: dict[str, Value]):
        """Per-element key/predicate: either a bare accessor name (applied
        to the element) or an expression over the variable ``it``."""
        if isinstance(expr, Name) and expr.ident in _BARE_KEYS and expr.ident not in env:
            fn = expr.ident

            def apply(elem: Value) -> Value:
                self._tick()
                return self._accessor(fn, elem)

            return apply

        def apply(elem: Value) -> Value:
            inner = dict(env)
            inner["it"] = elem
            return self.eval(expr, inner)

        return apply

    def _accessor(self, name: str, elem: Value) -> Value:
        inst = self._instance(self._objref(elem, name))
        if name == "category":
            return inst.category
        return getattr(inst.spatial, name)

    def _sort_key(self, raw: Value, where: str):
        if isinstance(raw, str):
            return (0, raw)
        return (1, self._num(raw, where))

    def _extreme(self, items: list, keyfn, pick_max: bool, where: str) -> Value:
        if not items:
            raise QlTypeError(where, "non-empty list", "empty list")
        best = None
        best_key = None
        for elem in items:
            self._tick()
            k = self._num(keyfn(elem), where)
            better = (
                best is None
                or (k > best_key if pick_max else k < best_key)
                or (k == best_key and _tie_before(elem, best))
            )
            if better:
                best, best_key = elem, k
        return best

    def _call(self, node: Call, env: dict[str, Value]) -> Value:
        fn = node.func
        kwargs = dict(node.kwargs)

        def arg(i: int, name: str | None = None) -> Expr:
            if name is not None and name in kwargs:
                return kwargs[name]
            if i < len(node.args):
                return node.args[i]
            raise QlTypeError(fn, f"argument {name or i}", "missing")

        if fn == "objects":
            k = self._frame(self.eval(arg(0, "frame"), env))
            return [ObjRef(k, inst.id) for inst in self.twin.frames[k].instances]
        if fn == "frames":
            return list(range(self.twin.frame_count))
        if fn == "obj":
            k = self._frame(self.eval(arg(0, "frame"), env))
            i = self.eval(arg(1, "id"), env)
            if not isinstance(i, int) or isinstance(i, bool):
                raise QlTypeError("obj", "Int id", _type_name(i))
            ref = ObjRef(k, i)
            self._instance(ref)
            return ref
        if fn == "count":
            return len(self._list(self.eval(arg(0), env), "count"))
        if fn == "attr":
            inst = self._instance(self._objref(self.eval(arg(0), env), "attr"))
            name = self.eval(arg(1, "name"), env)
            if not isinstance(name, str):
                raise QlTypeError("attr", "Str", _type_name(name))
            return name in inst.attributes
        if fn in _BARE_KEYS:
            return self._accessor(fn, self.eval(arg(0), env))
        if fn == "distance":
            a = self._instance(self._objref(self.eval(arg(0), env), "distance"))
            b = self._instance(self._objref(self.eval(arg(1), env), "distance"))
            return math.hypot(a.spatial.x - b.spatial.x, a.spatial.y - b.spatial.y)
        if fn in ("leftmost", "rightmost", "nearest", "farthest"):
            items = self._list(self.eval(arg(0), env), fn)
            accessor = {"leftmost": "x", "rightmost": "x", "nearest": "depth", "farthest": "depth"}[fn]
            pick_max = fn in ("rightmost", "farthest")
            return self._extreme(items, lambda e: self._accessor(accessor, e), pick_max, fn)
        if fn == "frames_present":
            i = self.eval(arg(0, "id"), env)
            if not isinstance(i, int) or isinstance(i, bool):
                raise QlTypeError("frames_present", "Int id", _type_name(i))
            return [f.frame_index for f in self.twin.frames if f.instance(i) is not None]
        if fn == "displacement":
            i = self.eval(arg(0, "id"), env)
            t1 = self._frame(self.eval(arg(1, "t1"), env))
            t2 = self._frame(self.eval(arg(2, "t2"), env))
            a = self._instance(ObjRef(t1, i))
            b = self._instance(ObjRef(t2, i))
            return math.hypot(b.spatial.x - a.spatial.x, b.spatial.y - a.spatial.y)
        if fn == "filter":
            items = self._list(self.eval(arg(0), env), "filter")
            pred = self._keyfn(arg(1, "predicate"), env)
            return [e for e in items if self._bool(pred(e), "filter predicate")]
        if fn in ("min_by", "max_by"):
            items = self._list(self.eval(arg(0), env), fn)
            key = self._keyfn(arg(1, "key"), env)
            return self._extreme(items, key, fn == "max_by", fn)
        if fn == "sort_by":
            items = self._list(self.eval(arg(0), env), "sort_by")
            key = self._keyfn(arg(1, "key"), env)
            decorated = []
            for e in items:
                self._tick()
                decorated.append((self._sort_key(key(e), "sort_by key"), e))
            decorated.sort(key=lambda p: p[0])
            return [e for _, e in decorated]
        if fn in ("abs", "min", "max"):
            vals = [self._num(self.eval(a, env), fn) for a in node.args]
            if fn == "abs":
                return abs(vals[0])
            if not vals:
                raise QlTypeError(fn, "arguments", "none")
            return min(vals) if fn == "min" else max(vals)
        raise UnknownIdentifier(fn)


def _tie_before(a: Value, b: Value) -> bool:
    # Exact key ties resolve to the smaller object id; non-object elements
    # keep the earlier occurrence.
    if isinstance(a, ObjRef) and isinstance(b, ObjRef):
        return (a.frame_index, a.id) < (b.frame_index, b.id)
    return False


def _type_name(v: Value) -> str:
    if isinstance(v, bool):
        return "Bool"
    if isinstance(v, int):
        return "Int"
    if isinstance(v, float):
        return "Float"
    if isinstance(v, str):
        return "Str"
    if isinstance(v, ObjRef):
        return "ObjRef"
    if isinstance(v, list):
        return "List"
    return type(v).__name__


def _equal(a: Value, b: Value) -> bool:
    num = lambda v: isinstance(v, (int, float)) and not isinstance(v, bool)
    if num(a) and num(b):
        return float(a) == float(b)
    if type(a) is not type(b):
        return False
    return a == b


def evaluate(ast: Expr, twin: VideoTwin, limits: EvalLimits | None = None) -> Value:
    """Evaluate a parsed program over a twin; deterministic and always halts."""
    return _Evaluator(twin, limits or EvalLimits()).eval(ast, {})


def _fmt_float(v: float) -> str:
    r = round(v, 6)
    if r == int(r) and abs(r) < 1e15:
        return f"{int(r)}.0"
    return repr(r)


def render_value(v: Value) -> str:
    """Canonical text form injected into results blocks."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return _fmt_float(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, ObjRef):
        return f"object(frame={v.frame_index}, id={v.id})"
    if isinstance(v, list):
        return "[" + ", ".join(render_value(e) for e in v) + "]"
    raise TypeError(f"not a value: {v!r}")


def run_program(source: str, twin: VideoTwin, limits: EvalLimits | None = None) -> str:
    """Parse, evaluate and render in one call (the execute-block path)."""
    from .parser import parse_program

    return render_value(evaluate(parse_program(source), twin, limits))
