"""Scalar expression trees over chart coordinates x1..xn.

Trees are immutable, closed under exact partial differentiation, and
evaluate vectorized over a batch of points.  Construction goes through
small simplifying constructors (constant folding, 0 and 1 elimination) so
repeated differentiation stays compact.
"""
import math
import re

import numpy as np


class ParseError(ValueError):
    def __init__(self, message, line=1, col=1):
        super().__init__(f"line {line}, column {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class EvaluationError(ArithmeticError):
    def __init__(self, message, point=None):
        if point is not None:
            message = f"{message} at point {tuple(float(v) for v in point)}"
        super().__init__(message)
        self.point = None if point is None else tuple(float(v) for v in point)


FUNCTIONS = ("sin", "cos", "exp", "sqrt", "abs")


class Expr:
    __slots__ = ("_d", "_s")
    prec = 100

    def __init__(self):
        self._d = {}
        self._s = None

    def diff(self, mu):
        d = self._d.get(mu)
        if d is None:
            d = self._diff(mu)
            self._d[mu] = d
        return d

    def partial(self, alpha):
        """Mixed partial for a multi-index ``alpha`` (tuple of orders per coordinate)."""
        e = self
        for mu, k in enumerate(alpha):
            for _ in range(k):
                e = e.diff(mu)
        return e

    def evaluate(self, points):
        """Values at an (P, n) array of points, as a length-P array."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        with np.errstate(all="ignore"):
            out = np.broadcast_to(np.asarray(self._eval(pts), dtype=float), (pts.shape[0],)).copy()
        bad = ~np.isfinite(out)
        if bad.any():
            i = int(np.argmax(bad))
            raise EvaluationError(f"expression {self} is undefined", pts[i])
        return out

    def max_var(self):
        return -1

    def is_const(self, value=None):
        return False

    def __str__(self):
        if self._s is None:
            self._s = self._str()
        return self._s

    def __repr__(self):
        return f"Expr({self})"

    def __eq__(self, other):
        return isinstance(other, Expr) and str(self) == str(other)

    def __hash__(self):
        return hash(str(self))

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, k):
        if not isinstance(k, int):
            raise TypeError("only integer powers are supported")
        return power(self, k)


def _wrap(e, prec):
    s = str(e)
    return f"({s})" if e.prec < prec else s


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        super().__init__()
        self.value = float(value)

    @property
    def prec(self):
        return 100 if self.value >= 0 else 3

    def _diff(self, mu):
        return ZERO

    def _eval(self, pts):
        return self.value

    def is_const(self, value=None):
        return value is None or self.value == value

    def _str(self):
        v = self.value
        if v == int(v) and abs(v) < 1e15:
            return str(int(v))
        return repr(v)


class Var(Expr):
    __slots__ = ("index",)

    def __init__(self, index):
        super().__init__()
        self.index = int(index)

    def _diff(self, mu):
        return ONE if mu == self.index else ZERO

    def _eval(self, pts):
        return pts[:, self.index]

    def max_var(self):
        return self.index

    def _str(self):
        return f"x{self.index + 1}"


class Add(Expr):
    __slots__ = ("a", "b")
    prec = 1

    def __init__(self, a, b):
        super().__init__()
        self.a, self.b = a, b

    def _diff(self, mu):
        return add(self.a.diff(mu), self.b.diff(mu))

    def _eval(self, pts):
        return self.a._eval(pts) + self.b._eval(pts)

    def max_var(self):
        return max(self.a.max_var(), self.b.max_var())

    def _str(self):
        if isinstance(self.b, Neg):
            return f"{_wrap(self.a, 1)} - {_wrap(self.b.a, 2)}"
        if isinstance(self.b, Const) and self.b.value < 0:
            return f"{_wrap(self.a, 1)} - {Const(-self.b.value)}"
        return f"{_wrap(self.a, 1)} + {_wrap(self.b, 1)}"


class Mul(Expr):
    __slots__ = ("a", "b")
    prec = 2

    def __init__(self, a, b):
        super().__init__()
        self.a, self.b = a, b

    def _diff(self, mu):
        return add(mul(self.a.diff(mu), self.b), mul(self.a, self.b.diff(mu)))

    def _eval(self, pts):
        return self.a._eval(pts) * self.b._eval(pts)

    def max_var(self):
        return max(self.a.max_var(), self.b.max_var())

    def _str(self):
        return f"{_wrap(self.a, 2)}*{_wrap(self.b, 3)}"


class Div(Expr):
    __slots__ = ("a", "b")
    prec = 2

    def __init__(self, a, b):
        super().__init__()
        self.a, self.b = a, b

    def _diff(self, mu):
        da, db = self.a.diff(mu), self.b.diff(mu)
        return add(div(da, self.b), neg(div(mul(self.a, db), power(self.b, 2))))

    def _eval(self, pts):
        return self.a._eval(pts) / self.b._eval(pts)

    def max_var(self):
        return max(self.a.max_var(), self.b.max_var())

    def _str(self):
        return f"{_wrap(self.a, 2)}/{_wrap(self.b, 3)}"


class Neg(Expr):
    __slots__ = ("a",)
    prec = 3

    def __init__(self, a):
        super().__init__()
        self.a = a

    def _diff(self, mu):
        return neg(self.a.diff(mu))

    def _eval(self, pts):
        return -self.a._eval(pts)

    def max_var(self):
        return self.a.max_var()

    def _str(self):
        return f"-{_wrap(self.a, 4)}"


class Pow(Expr):
    __slots__ = ("a", "k")
    prec = 4

    def __init__(self, a, k):
        super().__init__()
        self.a, self.k = a, int(k)

    def _diff(self, mu):
        return mul(mul(Const(self.k), power(self.a, self.k - 1)), self.a.diff(mu))

    def _eval(self, pts):
        base = self.a._eval(pts)
        if self.k < 0:
            return 1.0 / np.power(base, -self.k)
        return np.power(base, self.k)

    def max_var(self):
        return self.a.max_var()

    def _str(self):
        k = str(self.k) if self.k >= 0 else f"({self.k})"
        return f"{_wrap(self.a, 5)}^{k}"


class Func(Expr):
    __slots__ = ("name", "a")

    def __init__(self, name, a):
        super().__init__()
        self.name, self.a = name, a

    def _diff(self, mu):
        da = self.a.diff(mu)
        if da.is_const(0.0):
            return ZERO
        name, a = self.name, self.a
        if name == "sin":
            outer = func("cos", a)
        elif name == "cos":
            outer = neg(func("sin", a))
        elif name == "exp":
            outer = self
        elif name == "sqrt":
            outer = div(Const(0.5), self)
        elif name == "abs":
            outer = Sign(a)
        elif name == "sign":
            return ZERO
        else:
            raise AssertionError(name)
        return mul(outer, da)

    def _eval(self, pts):
        v = self.a._eval(pts)
        if self.name == "sign":
            return np.where(v == 0, np.nan, np.sign(v))
        return _NUMPY[self.name](v)

    def max_var(self):
        return self.a.max_var()

    def _str(self):
        return f"{self.name}({self.a})"


def Sign(a):
    # internal: derivative of abs; undefined at 0 so abs is only smooth away from it
    return func("sign", a)


_NUMPY = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "sqrt": np.sqrt, "abs": np.abs}
_MATH = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "sqrt": lambda v: math.sqrt(v) if v >= 0 else math.nan,
    "abs": abs,
    "sign": lambda v: math.copysign(1.0, v) if v != 0 else math.nan,
}

ZERO = Const(0.0)
ONE = Const(1.0)


def as_expr(v):
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, float, np.integer, np.floating)):
        return Const(float(v))
    raise TypeError(f"cannot convert {v!r} to an expression")


def const(v):
    return Const(v)


def var(index):
    return Var(index)


def add(a, b):
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if a.is_const(0.0):
        return b
    if b.is_const(0.0):
        return a
    return Add(a, b)


def neg(a):
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.a
    return Neg(a)


def mul(a, b):
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if a.is_const(0.0) or b.is_const(0.0):
        return ZERO
    if a.is_const(1.0):
        return b
    if b.is_const(1.0):
        return a
    if a.is_const(-1.0):
        return neg(b)
    if b.is_const(-1.0):
        return neg(a)
    if isinstance(b, Const):
        a, b = b, a
    if isinstance(a, Const) and isinstance(b, Neg):
        return mul(Const(-a.value), b.a)
    if isinstance(a, Const) and isinstance(b, Mul) and isinstance(b.a, Const):
        return mul(Const(a.value * b.a.value), b.b)
    return Mul(a, b)


def div(a, b):
    if b.is_const(0.0):
        raise ZeroDivisionError("division by the constant 0")
    if a.is_const(0.0):
        return ZERO
    if b.is_const(1.0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value / b.value)
    return Div(a, b)


def power(a, k):
    if k == 0:
        return ONE
    if k == 1:
        return a
    if isinstance(a, Const):
        if a.value == 0 and k < 0:
            raise ZeroDivisionError("negative power of the constant 0")
        return Const(a.value ** k)
    if isinstance(a, Pow):
        return power(a.a, a.k * k)
    return Pow(a, k)


def func(name, a):
    if isinstance(a, Const):
        v = _MATH[name](a.value)
        if not math.isnan(v):
            return Const(v)
    return Func(name, a)


def sin(a):
    return func("sin", as_expr(a))


def cos(a):
    return func("cos", as_expr(a))


def exp(a):
    return func("exp", as_expr(a))


def sqrt(a):
    return func("sqrt", as_expr(a))


def absolute(a):
    return func("abs", as_expr(a))


# ----------------------------------------------------------------------------
# parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<id>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(text, line, col0):
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            ws = len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos + ws]!r}", line, col0 + pos + ws)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), col0 + start))
        pos = m.end()
    toks.append(("end", "", col0 + len(text)))
    return toks


class _Parser:
    def __init__(self, text, dim, line, col0):
        self.toks = _tokenize(text, line, col0)
        self.i = 0
        self.dim = dim
        self.line = line

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok[2])

    def expect(self, value):
        t = self.peek()
        if t[1] != value:
            found = "end of input" if t[0] == "end" else repr(t[1])
            self.error(f"expected {value!r}, found {found}")
        return self.take()

    def parse(self):
        if self.peek()[0] == "end":
            self.error("empty expression")
        e = self.expr()
        t = self.peek()
        if t[0] != "end":
            self.error(f"unexpected {t[1]!r}")
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            r = self.term()
            e = add(e, r) if op == "+" else add(e, neg(r))
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/"):
            tok = self.take()
            r = self.unary()
            if tok[1] == "*":
                e = mul(e, r)
            else:
                if r.is_const(0.0):
                    self.error("division by zero", tok)
                e = div(e, r)
        return e

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return neg(self.unary())
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] != "^":
            return base
        self.take()
        k = self.exponent()
        if self.peek()[1] == "^":
            self.error("chained powers need parentheses")
        if k < 0 and base.is_const(0.0):
            self.error("negative power of zero")
        return power(base, k)

    def exponent(self):
        paren = self.peek()[1] == "("
        if paren:
            self.take()
        sign = 1
        if self.peek()[1] in ("-", "+"):
            sign = -1 if self.take()[1] == "-" else 1
        t = self.peek()
        if t[0] != "num":
            self.error("exponent must be an integer literal")
        if not re.fullmatch(r"\d+", t[1]):
            self.error(f"exponent must be an integer, got {t[1]}")
        self.take()
        if paren:
            self.expect(")")
        return sign * int(t[1])

    def atom(self):
        t = self.peek()
        if t[0] == "num":
            self.take()
            return Const(float(t[1]))
        if t[0] == "id":
            self.take()
            name = t[1]
            if name in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return func(name, arg)
            if name == "pi":
                return Const(math.pi)
            m = re.fullmatch(r"x(\d+)", name)
            if m:
                k = int(m.group(1))
                if k < 1 or k > self.dim:
                    self.error(f"unknown coordinate {name} in a {self.dim}-dimensional chart", t)
                return Var(k - 1)
            self.error(f"unknown identifier {name!r}", t)
        if t[1] == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        if t[0] == "end":
            self.error("unexpected end of expression")
        self.error(f"unexpected {t[1]!r}")


def parse_expr(text, dim, line=1, col=1):
    """Parse ``text`` into an expression; ``line``/``col`` locate it in a larger document."""
    return _Parser(text, dim, line, col).parse()
