"""Small math DSL for metric components.

Expressions are parsed into an immutable AST and compiled into two
closure trees: one evaluating plain floats and one propagating
hyper-dual numbers, which yields exact first and second derivatives.

Grammar (loosest to tightest binding)::

    sum     := product (('+' | '-') product)*
    product := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?          # right-associative
    atom    := number | name | func '(' sum ')' | '(' sum ')'

so ``-x^2`` is ``-(x^2)`` and ``sin(x)^2`` is ``(sin(x))^2``.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .errors import DomainError, ExpressionSyntaxError, InputError, UnknownIdentifier

__all__ = [
    "Num",
    "Var",
    "Param",
    "Neg",
    "BinOp",
    "Call",
    "Expression",
    "Jet2",
    "NonFiniteWarning",
    "FUNCTIONS",
    "parse",
    "to_source",
    "evaluate",
    "eval_jet2",
    "eval_grad",
]

FUNCTIONS = ("sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "log", "sqrt", "abs")

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class NonFiniteWarning(RuntimeWarning):
    """Emitted when an evaluation produces Inf or NaN."""


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str
    index: int


@dataclass(frozen=True)
class Param:
    name: str
    value: float


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Param, Neg, BinOp, Call]


# --------------------------------------------------------------------------
# Tokenizer / parser
# --------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {source[pos]!r}", pos, source)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, coords: Sequence[str], params: Mapping[str, float]):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0
        self.coords = {name: k for k, name in enumerate(coords)}
        self.params = params

    @property
    def tok(self):
        return self.tokens[self.i]

    def error(self, message: str):
        raise ExpressionSyntaxError(message, self.tok[2], self.source)

    def expect(self, text: str):
        if self.tok[1] != text:
            found = self.tok[1] or "end of input"
            self.error(f"expected {text!r}, found {found!r}")
        self.i += 1

    def parse(self) -> Node:
        node = self.sum()
        if self.tok[0] != "end":
            self.error(f"unexpected {self.tok[1]!r}")
        return node

    def sum(self) -> Node:
        node = self.product()
        while self.tok[1] in ("+", "-"):
            op = self.tok[1]
            self.i += 1
            node = BinOp(op, node, self.product())
        return node

    def product(self) -> Node:
        node = self.unary()
        while self.tok[1] in ("*", "/"):
            op = self.tok[1]
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.tok[1] == "-":
            self.i += 1
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.tok[1] == "^":
            self.i += 1
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        kind, text, _ = self.tok
        if kind == "num":
            self.i += 1
            return Num(float(text))
        if kind == "name":
            self.i += 1
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.sum()
                self.expect(")")
                return Call(text, arg)
            if self.tok[1] == "(":
                raise UnknownIdentifier(text)
            if text in self.coords:
                return Var(text, self.coords[text])
            if text in self.params:
                return Param(text, float(self.params[text]))
            raise UnknownIdentifier(text)
        if text == "(":
            self.i += 1
            node = self.sum()
            self.expect(")")
            return node
        self.error(f"unexpected {text!r}" if text else "unexpected end of input")


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return 4 if node.op == "^" else _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Num) and (node.value < 0 or math.copysign(1.0, node.value) < 0):
        return 3
    return 5


def _fmt_num(value: float) -> str:
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value)) if value != 0 or math.copysign(1.0, value) > 0 else "-0.0"
    return repr(value)


def to_source(node: Node) -> str:
    """Serialize an AST to text that parses back to the same tree."""

    def wrap(child: Node, min_prec: int) -> str:
        text = to_source(child)
        return f"({text})" if _prec(child) < min_prec else text

    if isinstance(node, Num):
        return _fmt_num(node.value)
    if isinstance(node, (Var, Param)):
        return node.name
    if isinstance(node, Neg):
        return "-" + wrap(node.operand, 3)
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    if node.op == "^":
        return f"{wrap(node.left, 5)}^{wrap(node.right, 3)}"
    p = _PREC[node.op]
    return f"{wrap(node.left, p)} {node.op} {wrap(node.right, p + 1)}"


# --------------------------------------------------------------------------
# Float evaluation
# --------------------------------------------------------------------------


def _fdiv(a: float, b: float) -> float:
    if b == 0.0:
        if a == 0.0 or math.isnan(a):
            return math.nan
        return math.copysign(math.inf, a) * math.copysign(1.0, b)
    return a / b


def _is_int(p: float) -> bool:
    return math.isfinite(p) and float(p).is_integer()


def _fpow(a: float, p: float) -> float:
    if a < 0.0 and not _is_int(p):
        raise DomainError(f"negative base {a!r} raised to non-integer power {p!r}")
    try:
        return math.pow(a, p)
    except ZeroDivisionError:
        return math.inf
    except OverflowError:
        return math.inf if a > 0 or _is_int(p / 2) else -math.inf
    except ValueError:
        return math.nan


def _flog(a: float) -> float:
    if a < 0.0:
        raise DomainError(f"log of negative argument {a!r}")
    if a == 0.0:
        return -math.inf
    return math.log(a)


def _fsqrt(a: float) -> float:
    if a < 0.0:
        raise DomainError(f"sqrt of negative argument {a!r}")
    return math.sqrt(a)


def _overflow_safe(f: Callable[[float], float]) -> Callable[[float], float]:
    def g(a: float) -> float:
        try:
            return f(a)
        except OverflowError:
            return math.inf if f is not math.sinh or a > 0 else -math.inf

    return g


_FLOAT_FUNCS: dict[str, Callable[[float], float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "sinh": _overflow_safe(math.sinh),
    "cosh": _overflow_safe(math.cosh),
    "tanh": math.tanh,
    "exp": _overflow_safe(math.exp),
    "log": _flog,
    "sqrt": _fsqrt,
    "abs": abs,
}

_FLOAT_BINOPS: dict[str, Callable[[float, float], float]] = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _fdiv,
    "^": _fpow,
}


def _compile_float(node: Node) -> Callable[[Sequence[float]], float]:
    if isinstance(node, (Num, Param)):
        value = node.value
        return lambda env: value
    if isinstance(node, Var):
        k = node.index
        return lambda env: env[k]
    if isinstance(node, Neg):
        f = _compile_float(node.operand)
        return lambda env: -f(env)
    if isinstance(node, Call):
        fn = _FLOAT_FUNCS[node.func]
        f = _compile_float(node.arg)
        return lambda env: fn(f(env))
    op = _FLOAT_BINOPS[node.op]
    fl = _compile_float(node.left)
    fr = _compile_float(node.right)
    return lambda env: op(fl(env), fr(env))


# --------------------------------------------------------------------------
# Hyper-dual evaluation
# --------------------------------------------------------------------------


class _HD:
    """Hyper-dual number a + b e1 + c e2 + d e1e2 with e1^2 = e2^2 = 0.

    ``a`` is a scalar; ``b``, ``c``, ``d`` are arrays holding one
    infinitesimal pair per entry, so a single walk of the AST carries
    every (k, m) coordinate pair at once.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        self.a = a
        self.b = b
        self.c = c
        self.d = d


def _chain(x: _HD, f0, f1, f2) -> _HD:
    return _HD(f0, f1 * x.b, f1 * x.c, f1 * x.d + f2 * (x.b * x.c))


def _hd_add(x, y):
    if isinstance(x, _HD):
        if isinstance(y, _HD):
            return _HD(x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d)
        return _HD(x.a + y, x.b, x.c, x.d)
    if isinstance(y, _HD):
        return _HD(x + y.a, y.b, y.c, y.d)
    return x + y


def _hd_neg(x):
    if isinstance(x, _HD):
        return _HD(-x.a, -x.b, -x.c, -x.d)
    return -x


def _hd_sub(x, y):
    return _hd_add(x, _hd_neg(y))


def _hd_mul(x, y):
    if isinstance(x, _HD):
        if isinstance(y, _HD):
            return _HD(
                x.a * y.a,
                x.a * y.b + x.b * y.a,
                x.a * y.c + x.c * y.a,
                x.a * y.d + x.b * y.c + x.c * y.b + x.d * y.a,
            )
        return _HD(x.a * y, x.b * y, x.c * y, x.d * y)
    if isinstance(y, _HD):
        return _HD(x * y.a, x * y.b, x * y.c, x * y.d)
    return x * y


def _hd_div(x, y):
    if isinstance(y, _HD):
        a = y.a
        inv = 1.0 / a
        return _hd_mul(x, _chain(y, inv, -inv * inv, 2.0 * inv * inv * inv))
    if isinstance(x, _HD):
        return _hd_mul(x, np.float64(1.0) / y)
    return np.float64(x) / y


def _hd_log(x):
    a = x.a if isinstance(x, _HD) else x
    if a < 0:
        raise DomainError(f"log of negative argument {float(a)!r}")
    if not isinstance(x, _HD):
        return np.log(np.float64(x))
    inv = 1.0 / a
    return _chain(x, np.log(a), inv, -inv * inv)


def _hd_sqrt(x):
    a = x.a if isinstance(x, _HD) else x
    if a < 0:
        raise DomainError(f"sqrt of negative argument {float(a)!r}")
    if not isinstance(x, _HD):
        return np.sqrt(np.float64(x))
    s = np.sqrt(a)
    return _chain(x, s, 0.5 / s, -0.25 / (s * a))


def _hd_unary(f0, f1, f2):
    def apply(x):
        if not isinstance(x, _HD):
            return f0(np.float64(x))
        return _chain(x, f0(x.a), f1(x.a), f2(x.a))

    return apply


def _tan2(a):
    t = np.tan(a)
    return 2.0 * t * (1.0 + t * t)


def _tanh2(a):
    t = np.tanh(a)
    return -2.0 * t * (1.0 - t * t)


_HD_FUNCS = {
    "sin": _hd_unary(np.sin, np.cos, lambda a: -np.sin(a)),
    "cos": _hd_unary(np.cos, lambda a: -np.sin(a), lambda a: -np.cos(a)),
    "tan": _hd_unary(np.tan, lambda a: 1.0 + np.tan(a) ** 2, _tan2),
    "sinh": _hd_unary(np.sinh, np.cosh, np.sinh),
    "cosh": _hd_unary(np.cosh, np.sinh, np.cosh),
    "tanh": _hd_unary(np.tanh, lambda a: 1.0 - np.tanh(a) ** 2, _tanh2),
    "exp": _hd_unary(np.exp, np.exp, np.exp),
    "abs": _hd_unary(np.abs, np.sign, lambda a: 0.0 * a),
    "log": _hd_log,
    "sqrt": _hd_sqrt,
}


def _hd_pow(x, y):
    if isinstance(y, _HD):
        base = x.a if isinstance(x, _HD) else x
        if base < 0:
            raise DomainError("negative base raised to a variable power")
        return _HD_FUNCS["exp"](_hd_mul(y, _hd_log(x)))
    p = float(y)
    a = x.a if isinstance(x, _HD) else x
    if a < 0 and not _is_int(p):
        raise DomainError(f"negative base {float(a)!r} raised to non-integer power {p!r}")
    if not isinstance(x, _HD):
        return np.power(np.float64(x), p)
    if p == 0.0:
        return np.float64(1.0)
    if p == 1.0:
        return x
    if p == 2.0:
        return _chain(x, a * a, 2.0 * a, np.float64(2.0))
    f0 = np.power(a, p)
    f1 = p * np.power(a, p - 1.0)
    f2 = p * (p - 1.0) * np.power(a, p - 2.0)
    return _chain(x, f0, f1, f2)


_HD_BINOPS = {"+": _hd_add, "-": _hd_sub, "*": _hd_mul, "/": _hd_div, "^": _hd_pow}


def _compile_hd(node: Node):
    if isinstance(node, (Num, Param)):
        value = np.float64(node.value)
        return lambda env: value
    if isinstance(node, Var):
        k = node.index
        return lambda env: env[k]
    if isinstance(node, Neg):
        f = _compile_hd(node.operand)
        return lambda env: _hd_neg(f(env))
    if isinstance(node, Call):
        fn = _HD_FUNCS[node.func]
        f = _compile_hd(node.arg)
        return lambda env: fn(f(env))
    op = _HD_BINOPS[node.op]
    fl = _compile_hd(node.left)
    fr = _compile_hd(node.right)
    return lambda env: op(fl(env), fr(env))


def _depends_on_coords(node: Node) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, (Num, Param)):
        return False
    if isinstance(node, Neg):
        return _depends_on_coords(node.operand)
    if isinstance(node, Call):
        return _depends_on_coords(node.arg)
    return _depends_on_coords(node.left) or _depends_on_coords(node.right)


# --------------------------------------------------------------------------
# Public types and operations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Jet2:
    """Value, gradient and Hessian of a scalar field at one point."""

    value: float
    grad: np.ndarray
    hess: np.ndarray


@dataclass(frozen=True, eq=False)
class Expression:
    """Parsed expression bound to an ordered coordinate list and parameters."""

    root: Node
    coords: tuple[str, ...]
    params: tuple[tuple[str, float], ...] = ()
    _float: Callable = field(init=False, repr=False, compare=False)
    _hd: Callable = field(init=False, repr=False, compare=False)
    constant: bool = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_float", _compile_float(self.root))
        object.__setattr__(self, "_hd", _compile_hd(self.root))
        object.__setattr__(self, "constant", not _depends_on_coords(self.root))

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def param_map(self) -> dict[str, float]:
        return dict(self.params)

    def __str__(self) -> str:
        return to_source(self.root)

    def __call__(self, point: Sequence[float]) -> float:
        return evaluate(self, point)


def _check_names(coords: Sequence[str], params: Mapping[str, float]) -> None:
    for name in list(coords) + list(params):
        if not _NAME_RE.match(name):
            raise InputError(f"invalid identifier {name!r}")
        if name in FUNCTIONS:
            raise InputError(f"identifier {name!r} collides with a function name")
    if len(set(coords)) != len(coords):
        raise InputError(f"duplicate coordinate names in {list(coords)}")
    clash = set(coords) & set(params)
    if clash:
        raise InputError(f"parameters shadow coordinates: {sorted(clash)}")


def parse(
    source: str, coords: Sequence[str], params: Mapping[str, float] | None = None
) -> Expression:
    """Parse ``source`` into an :class:`Expression`.

    Raises :class:`ExpressionSyntaxError` (with ``.position``) on malformed
    input and :class:`UnknownIdentifier` for undeclared names.
    """
    params = dict(params or {})
    coords = tuple(coords)
    _check_names(coords, params)
    if not source or not source.strip():
        raise ExpressionSyntaxError("empty expression", 0, source)
    root = _Parser(source, coords, params).parse()
    return Expression(root, coords, tuple(sorted((k, float(v)) for k, v in params.items())))


def _check_point(expr: Expression, point: Sequence[float]) -> list[float]:
    point = [float(x) for x in point]
    if len(point) != expr.n:
        raise InputError(f"point has {len(point)} entries, expected {expr.n}")
    return point


def _flag(value: float, expr: Expression) -> None:
    if not math.isfinite(value):
        warnings.warn(f"{expr} evaluated to {value}", NonFiniteWarning, stacklevel=3)


def evaluate(expr: Expression, point: Sequence[float], *, warn: bool = True) -> float:
    """Evaluate ``expr`` in IEEE double precision.

    Inf/NaN propagate and raise a :class:`NonFiniteWarning` (unless
    ``warn`` is false); log and sqrt of negative arguments raise
    :class:`DomainError`.
    """
    value = float(expr._float(_check_point(expr, point)))
    if warn:
        _flag(value, expr)
    return value


_SEEDS: dict[tuple[int, bool], tuple[list[tuple[int, int]], np.ndarray, np.ndarray]] = {}


def _seeds(n: int, second: bool):
    key = (n, second)
    if key not in _SEEDS:
        if second:
            pairs = [(k, m) for k in range(n) for m in range(k, n)]
        else:
            pairs = [(k, k) for k in range(n)]
        eye = np.eye(n)
        b = np.array([[eye[i, k] for k, _ in pairs] for i in range(n)])
        c = np.array([[eye[i, m] for _, m in pairs] for i in range(n)])
        _SEEDS[key] = (pairs, b, c)
    return _SEEDS[key]


def _jet(expr: Expression, point: Sequence[float], second: bool, warn: bool = True):
    point = _check_point(expr, point)
    n = expr.n
    pairs, b, c = _seeds(n, second)
    zero = np.zeros(len(pairs))
    env = [_HD(np.float64(point[i]), b[i], c[i], zero) for i in range(n)]
    with np.errstate(all="ignore"):
        out = expr._hd(env)
    if not isinstance(out, _HD):
        value = float(out)
        if warn:
            _flag(value, expr)
        return value, np.zeros(n), np.zeros((n, n))
    value = float(out.a)
    if warn:
        _flag(value, expr)
    grad = np.empty(n)
    hess = np.empty((n, n))
    for p, (k, m) in enumerate(pairs):
        if k == m:
            grad[k] = out.b[p]
        hess[k, m] = hess[m, k] = out.d[p]
    return value, grad, hess


def eval_jet2(expr: Expression, point: Sequence[float], *, warn: bool = True) -> Jet2:
    """Value, gradient and symmetric Hessian, exact to roundoff.

    Each unordered coordinate pair (k, m) gets its own hyper-dual seed
    (e1 along x^k, e2 along x^m); all pairs ride through one vectorized
    walk of the compiled AST.
    """
    value, grad, hess = _jet(expr, point, second=True, warn=warn)
    return Jet2(value, grad, hess)


def eval_grad(expr: Expression, point: Sequence[float], *, warn: bool = True) -> tuple[float, np.ndarray]:
    value, grad, _ = _jet(expr, point, second=False, warn=warn)
    return value, grad
