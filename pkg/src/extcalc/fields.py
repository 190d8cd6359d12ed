"""Smooth fields on a coordinate chart.

Two kinds of field share one interface:

* :class:`ExprField` holds one :class:`~extcalc.expr.Expr` per component
  (per blade for multivector fields, per entry for extensor fields) and can
  be differentiated symbolically.
* Derived fields are lazy nodes (sums, products, extensions, inverses,
  directional derivatives, ...) built on top of other fields.

For evaluation every field produces a :class:`~extcalc.jet.Jet` over a
batch of points held by an :class:`EvalContext`.  A node asked for order k
asks its inputs for exactly the order it needs, so derivatives are exact
all the way down to the expression trees.

Component shapes: ``()`` scalar, ``(N,)`` multivector (N = 2**n),
``(n, n)`` extensor (column mu is the image of b_mu), ``(N, N)`` extended
map, ``(n, n, n)`` connection table.
"""
from math import factorial

import numpy as np

from . import expr as E
from . import extensor as X11
from . import jet as J
from . import multivector as mv
from .expr import EvaluationError
from .extensor import Extensor11
from .multivector import Multivector

SHRINK = 0.05


class DomainError(ValueError):
    pass


class Chart:
    """Open coordinate box; coordinates are named x1..xn."""

    def __init__(self, box):
        box = [(float(lo), float(hi)) for lo, hi in box]
        self.dim = mv.check_dim(len(box))
        for mu, (lo, hi) in enumerate(box):
            if not lo < hi:
                raise DomainError(f"empty interval for x{mu + 1}: ({lo}, {hi})")
        self.box = box

    def contains(self, p):
        p = np.asarray(p, dtype=float)
        return p.shape == (self.dim,) and all(lo < v < hi for v, (lo, hi) in zip(p, self.box))

    def sample_points(self, count, seed):
        """Uniform points in the box shrunk by 5% on each side."""
        rng = np.random.default_rng(seed)
        lo = np.array([a for a, _ in self.box])
        hi = np.array([b for _, b in self.box])
        width = hi - lo
        lo, hi = lo + SHRINK * width, hi - SHRINK * width
        return lo + (hi - lo) * rng.random((int(count), self.dim))


class EvalContext:
    """A batch of points plus a per-field jet cache."""

    def __init__(self, points, chart=None):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if chart is not None:
            for p in pts:
                if not chart.contains(p):
                    raise DomainError(f"point {tuple(p)} lies outside the chart domain")
        self.points = pts
        self.n = pts.shape[1]
        self.cache = {}
        self.expr_cache = {}

    @property
    def size(self):
        return self.points.shape[0]

    def jet(self, field, k):
        hit = self.cache.get(id(field))
        if hit is not None and hit[1].k >= k:
            return hit[1].trunc(k)
        try:
            j = field._jet(self, k)
        except J.JetError as err:
            idx = err.index if err.index is not None else 0
            raise EvaluationError(str(err), self.points[idx]) from None
        self.cache[id(field)] = (field, j)
        return j

    def expr_taylor(self, e, alpha):
        key = (id(e), alpha)
        hit = self.expr_cache.get(key)
        if hit is None:
            d = e.partial(alpha)
            scale = 1.0
            for a in alpha:
                scale *= factorial(a)
            vals = np.zeros(self.size) if d.is_const(0.0) else d.evaluate(self.points) / scale
            hit = (e, vals)
            self.expr_cache[key] = hit
        return hit[1]


def _num(x):
    return isinstance(x, (int, float, np.integer, np.floating))


class Field:
    dim = None
    shape = None

    @property
    def N(self):
        return 1 << self.dim

    def jet(self, ctx, k=0):
        return ctx.jet(self, k)

    def values(self, ctx):
        return ctx.jet(self, 0).value

    def at(self, p):
        """Value at a single point, as Multivector / Extensor11 / float."""
        ctx = EvalContext([p])
        v = self.values(ctx)[0]
        if self.shape == (self.N,):
            return Multivector(self.dim, v)
        if self.shape == (self.dim, self.dim):
            return Extensor11(v)
        if self.shape == ():
            return float(v)
        return v

    # arithmetic --------------------------------------------------------------
    def _check(self, other):
        if other.dim != self.dim or other.shape != self.shape:
            raise mv.DimensionError(f"field mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other):
        if _num(other):
            other = constant_like(self, other)
        self._check(other)
        return Op(lambda a, b: a + b, (self, other), self.shape)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        if _num(other):
            other = constant_like(self, other)
        self._check(other)
        return Op(lambda a, b: a - b, (self, other), self.shape)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __neg__(self):
        return Op(lambda a: -a, (self,), self.shape)

    def __mul__(self, other):
        if _num(other):
            s = float(other)
            return Op(lambda a: a.scale(s), (self,), self.shape)
        if isinstance(other, Field) and other.shape == ():
            return Op(lambda a, b: b.smul(a), (self, other), self.shape)
        if isinstance(other, Field) and self.shape == ():
            return Op(lambda a, b: a.smul(b), (self, other), other.shape)
        return NotImplemented

    def __rmul__(self, other):
        if _num(other):
            return self.__mul__(other)
        return NotImplemented

    def __truediv__(self, other):
        if _num(other):
            return self * (1.0 / float(other))
        if isinstance(other, Field) and other.shape == ():
            return self * reciprocal(other)
        return NotImplemented

    # multivector products ----------------------------------------------------
    def __xor__(self, other):
        return mv_product(self, other, mv.wedge)

    def __lshift__(self, other):
        return mv_product(self, other, mv.lcontract)

    def __rshift__(self, other):
        return mv_product(self, other, mv.rcontract)

    def wedge(self, other):
        return self ^ other

    def lc(self, other):
        return self << other

    def rc(self, other):
        return self >> other

    def gp(self, other):
        return mv_product(self, other, mv.gp)

    def cross(self, other):
        return mv_product(self, other, mv.commutator)

    def dot(self, other):
        """Scalar product as a scalar field."""
        _require_mv(self, other)
        return Op(lambda a, b: a.bil(b, mv.scalar_product), (self, other), ())

    def reverse(self):
        return Op(lambda a: a.lin(mv.reverse), (self,), self.shape)

    def involute(self):
        return Op(lambda a: a.lin(mv.involute), (self,), self.shape)

    def conjugate(self):
        return Op(lambda a: a.lin(mv.conjugate), (self,), self.shape)

    def grade(self, k):
        return Op(lambda a: a.lin(lambda c: mv.grade(c, k)), (self,), self.shape)

    def scalar_part(self):
        return Op(lambda a: a.lin(lambda c: c[..., 0]), (self,), ())

    def component(self, blade):
        """A single coefficient as a scalar field."""
        return Op(lambda a: a[blade], (self,), ())

    def component_of(self, idx):
        """Entry ``idx`` of a field of any shape, as a scalar field."""
        idx = tuple(idx)
        if len(idx) != len(self.shape):
            raise IndexError(f"index {idx} does not match field shape {self.shape}")
        return Op(lambda a: a[idx], (self,), ())

    def vcomp(self, mu):
        """Component a·b_mu of a vector field."""
        return self.component(1 << mu)

    def as_mv(self):
        """Scalar field promoted to a grade-0 multivector field."""
        if self.shape != ():
            raise TypeError("only scalar fields convert to multivectors")
        N = 1 << self.dim

        def lift(c):
            out = np.zeros(c.shape + (N,))
            out[..., 0] = c
            return out

        return Op(lambda a: a.lin(lift), (self,), (N,))

    # extensor fields ---------------------------------------------------------
    def __call__(self, v):
        """Apply a (1,1)-extensor field to a vector field, or an (N, N) matrix field to a multivector."""
        if self.shape == (self.N, self.N) and self.N != self.dim:
            return Op(J.matvec, (self, v), v.shape)
        if self.shape != (self.dim, self.dim):
            raise TypeError("only extensor fields can be applied")
        return Op(lambda t, x: t.bil(x, X11.apply_vector), (self, v), (self.N,))

    def __matmul__(self, other):
        return Op(J.matmul, (self, other), self.shape)

    @property
    def T(self):
        return Op(lambda a: a.lin(lambda c: np.swapaxes(c, -1, -2)), (self,), self.shape)

    def inv(self):
        return Op(J.inverse, (self,), self.shape)

    def det(self):
        return Op(J.det, (self,), ())

    def extend(self):
        return Extension(self)

    def generalize(self, X):
        return Op(lambda t, x: t.bil(x, X11.generalize_kernel), (self, X), X.shape)

    def biv(self):
        return Op(lambda t: t.lin(X11.biv_kernel), (self,), (self.N,))


def _require_mv(*fields):
    for f in fields:
        if f.shape != (f.N,):
            raise TypeError("multivector fields required")
    d = {f.dim for f in fields}
    if len(d) != 1:
        raise mv.DimensionError("fields of different dimension")


def mv_product(a, b, kernel):
    _require_mv(a, b)
    return Op(lambda x, y: x.bil(y, kernel), (a, b), a.shape)


class Op(Field):
    """Pointwise combination of input jets at the same order."""

    def __init__(self, fn, children, shape):
        self.fn = fn
        self.children = tuple(children)
        self.dim = self.children[0].dim
        self.shape = tuple(shape)

    def _jet(self, ctx, k):
        return self.fn(*(c.jet(ctx, k) for c in self.children))


class Lifted(Field):
    """Node whose jet function receives the context and order directly."""

    def __init__(self, dim, shape, fn):
        self.dim = dim
        self.shape = tuple(shape)
        self.fn = fn

    def _jet(self, ctx, k):
        return self.fn(ctx, k)


class ConstField(Field):
    def __init__(self, dim, value):
        self.dim = mv.check_dim(dim)
        self.value = np.array(value, dtype=float)
        self.shape = self.value.shape

    def _jet(self, ctx, k):
        return J.Jet.constant(np.broadcast_to(self.value, (ctx.size,) + self.shape), ctx.n, k)


def constant(value, dim=None):
    """Constant field from a Multivector, Extensor11, number or array."""
    if isinstance(value, Multivector):
        return ConstField(value.dim, value.coeffs)
    if isinstance(value, Extensor11):
        return ConstField(value.dim, value.matrix)
    if dim is None:
        raise ValueError("dimension required for raw constants")
    return ConstField(dim, value)


def constant_like(field, number):
    if field.shape == ():
        return ConstField(field.dim, float(number))
    if field.shape == (field.N,):
        return constant(Multivector.scalar(field.dim, float(number)))
    raise TypeError("numbers only combine with scalar or multivector fields")


def basis_vector(n, mu):
    return constant(Multivector.blade(n, 1 << mu))


def basis_blade(n, A):
    return constant(Multivector.blade(n, A))


class ExprField(Field):
    """Field with one expression per component."""

    def __init__(self, dim, exprs):
        self.dim = mv.check_dim(dim)
        arr = np.empty(np.shape(exprs), dtype=object)
        flat = np.asarray(exprs, dtype=object).reshape(-1)
        out = arr.reshape(-1)
        for i, e in enumerate(flat):
            e = E.as_expr(e)
            if e.max_var() >= self.dim:
                raise mv.DimensionError(f"expression {e} uses x{e.max_var() + 1} in dimension {self.dim}")
            out[i] = e
        self.exprs = arr
        self.shape = arr.shape

    def _jet(self, ctx, k):
        sp = J.space(ctx.n, k)
        flat = self.exprs.reshape(-1)
        c = np.zeros((ctx.size, sp.size, flat.size))
        for i, e in enumerate(flat):
            if e.is_const(0.0):
                continue
            for m, alpha in enumerate(sp.alphas):
                c[:, m, i] = ctx.expr_taylor(e, alpha)
        return J.Jet(c.reshape((ctx.size, sp.size) + self.shape), ctx.n, k)

    def diff(self, mu):
        out = np.empty(self.shape, dtype=object)
        for idx in np.ndindex(self.shape):
            out[idx] = self.exprs[idx].diff(mu)
        return ExprField(self.dim, out)

    def grades(self):
        if self.shape != (self.N,):
            raise TypeError("grades only apply to multivector fields")
        g = mv.tables(self.dim).grades
        return sorted({int(g[i]) for i, e in enumerate(self.exprs) if not e.is_const(0.0)})

    def __str__(self):
        if self.shape == (self.N,):
            terms = [f"coeff({mv.blade_name(i, self.dim)}) = {e}" for i, e in enumerate(self.exprs) if not e.is_const(0.0)]
            return "; ".join(terms) or "0"
        return str(self.exprs.tolist())


def multivector_field(dim, coeffs):
    """Multivector field from a mapping blade token/bitmask → expression (or number)."""
    N = 1 << dim
    exprs = [E.ZERO] * N
    for blade, e in coeffs.items():
        mask = blade if isinstance(blade, (int, np.integer)) else mv.parse_blade(blade, dim)
        exprs[mask] = E.parse_expr(e, dim) if isinstance(e, str) else E.as_expr(e)
    return ExprField(dim, exprs)


def vector_field(components):
    dim = len(components)
    return multivector_field(dim, {1 << mu: c for mu, c in enumerate(components)})


def scalar_field(dim, e):
    return ExprField(dim, np.array(E.parse_expr(e, dim) if isinstance(e, str) else E.as_expr(e), dtype=object))


def extensor_field(rows):
    """Extensor field from an n×n nested list of expressions; entry [i][j] = t(b_j)·b_i."""
    n = len(rows)
    arr = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            e = rows[i][j]
            arr[i, j] = E.parse_expr(e, n) if isinstance(e, str) else E.as_expr(e)
    return ExprField(n, arr)


def coordinate_field(dim, mu):
    return scalar_field(dim, E.Var(mu))


def position_field(dim):
    return vector_field([E.Var(mu) for mu in range(dim)])


class Partial(Field):
    def __init__(self, field, mu):
        self.field = field
        self.mu = mu
        self.dim = field.dim
        self.shape = field.shape

    def _jet(self, ctx, k):
        return self.field.jet(ctx, k + 1).d(self.mu)


def partial(field, mu):
    if isinstance(field, ExprField):
        return field.diff(mu)
    if isinstance(field, ConstField):
        return ConstField(field.dim, np.zeros(field.shape))
    return Partial(field, mu)


class DirectionalDerivative(Field):
    def __init__(self, a, field):
        self.a = a
        self.field = field
        self.dim = field.dim
        self.shape = field.shape

    def _jet(self, ctx, k):
        aj = self.a.jet(ctx, k)
        fj = self.field.jet(ctx, k + 1)
        out = None
        for mu in range(self.dim):
            term = aj[1 << mu].smul(fj.d(mu))
            out = term if out is None else out + term
        return out


def _is_vector(field):
    if field.shape != (field.N,):
        return False
    if isinstance(field, ExprField):
        return field.grades() in ([], [1])
    return True


def directional_derivative(a, field):
    """a·∂ₒ applied to a field of any shape; a must be a vector field."""
    if a.shape != (a.N,):
        raise TypeError("direction must be a vector field")
    if isinstance(a, ExprField) and not _is_vector(a):
        raise TypeError("direction must be a vector field")
    if isinstance(a, ExprField) and isinstance(field, ExprField):
        out = np.empty(field.shape, dtype=object)
        for idx in np.ndindex(field.shape):
            total = E.ZERO
            for mu in range(a.dim):
                total = total + a.exprs[1 << mu] * field.exprs[idx].diff(mu)
            out[idx] = total
        return ExprField(field.dim, out)
    if isinstance(field, ConstField):
        return ConstField(field.dim, np.zeros(field.shape))
    return DirectionalDerivative(a, field)


def lie_bracket(a, b):
    """[a,b] = a·∂ₒb − b·∂ₒa."""
    for f in (a, b):
        if not _is_vector(f):
            raise TypeError("Lie bracket needs vector fields")
    return directional_derivative(a, b) - directional_derivative(b, a)


def _basis_sum(field, kernel):
    n = field.dim
    out = None
    for mu in range(n):
        term = Op(lambda e, x, k=kernel: e.bil(x, k), (basis_vector(n, mu), partial(field, mu)), field.shape)
        out = term if out is None else out + term
    return out


def nabla_o(field, kind="full"):
    """∂ₒ∧X (curl), ∂ₒ⌟X (div) or the Clifford ∂ₒX (full)."""
    kernel = {"curl": mv.wedge, "div": mv.lcontract, "full": mv.gp}[kind]
    if isinstance(field, ExprField):
        return _symbolic_basis_sum(field, kernel)
    return _basis_sum(field, kernel)


def _symbolic_basis_sum(field, kernel):
    n, N = field.dim, field.N
    out = [E.ZERO] * N
    for mu in range(n):
        e = np.zeros(N)
        e[1 << mu] = 1.0
        d = field.diff(mu).exprs
        for j in range(N):
            if d[j].is_const(0.0):
                continue
            y = np.zeros(N)
            y[j] = 1.0
            img = kernel(e, y)
            for k in np.nonzero(img)[0]:
                out[k] = out[k] + float(img[k]) * d[j]
    return ExprField(n, out)


def reciprocal(s):
    return Op(J.reciprocal, (s,), ())


def sqrt(s):
    return Op(J.sqrt, (s,), ())


def sqrt_abs_det(t):
    return Op(J.sqrt_abs_det, (t,), ())


class Extension(Field):
    """Outermorphism of an extensor field as an (N, N) matrix field."""

    def __init__(self, base):
        self.base = base
        self.dim = base.dim
        self.shape = (base.N, base.N)

    def _jet(self, ctx, k):
        t = self.base.jet(ctx, k)
        return extension_jet(t)

    def __call__(self, X):
        return Op(J.matvec, (self, X), X.shape)


def extension_jet(t):
    def wedge(a, b):
        return a.bil(b, mv.wedge)

    n = t.shape[-1]
    N = 1 << n
    cols = [None] * N
    cols[0] = J.Jet.constant(np.broadcast_to(np.eye(N)[0], (t.points, N)), t.n, t.k)
    for A in range(1, N):
        low = A & -A
        mu = low.bit_length() - 1
        col = t[:, mu].lin(mv.from_vector)
        cols[A] = wedge(col, cols[A ^ low])
    return J.stack(cols, axis=-1)


def stack_fields(fields, shape):
    """Assemble equally shaped fields into one field whose leading axes are ``shape``."""
    fields = list(fields)
    inner = fields[0].shape

    def fn(*jets):
        s = J.stack(jets, axis=2)
        return J.Jet(s.c.reshape(s.c.shape[:2] + tuple(shape) + inner), s.n, s.k)

    return Op(fn, fields, tuple(shape) + inner)


def dummy_sum(dim, fn):
    """Σ_mu fn(mu) for fields (the basis form of the vector derivative ∂_a)."""
    out = None
    for mu in range(dim):
        term = fn(mu)
        out = term if out is None else out + term
    return out


def eval_field(field, p, chart=None):
    if chart is not None and not chart.contains(p):
        raise DomainError(f"point {tuple(p)} lies outside the chart domain")
    return field.at(p)


def as_field(x, dim=None):
    """Wrap constants (Multivector, Extensor11, numbers, arrays) as fields."""
    if isinstance(x, Field):
        return x
    if isinstance(x, (Multivector, Extensor11)):
        return constant(x)
    return ConstField(dim, x)


def vector_of(field):
    """A vector field from an (n,)-shaped component field."""
    return Op(lambda c: c.lin(mv.from_vector), (field,), (1 << field.dim,))


def column(t, mu):
    """Image t(b_mu) of an extensor field as a vector field."""
    return Op(lambda c: c[:, mu].lin(mv.from_vector), (t,), (t.N,))


def matrix_from_columns(vectors):
    """Extensor field whose column mu is the vector field ``vectors[mu]``."""
    n = vectors[0].dim

    def fn(*jets):
        cols = [j.lin(mv.vector_part) for j in jets]
        return J.stack(cols, axis=-1)

    return Op(fn, vectors, (n, n))
