"""Connection fields and the covariant-derivative machinery built on them.

Every operation takes and returns lazy fields.  Vector arguments are
multivector fields whose only non-zero blades are grade 1.
"""
import numpy as np

from . import expr as E
from . import fields as F
from . import jet as J
from . import multivector as mv
from .fields import Field

SIGNS = {"+": "+", "plus": "+", "-": "-", "minus": "-", "0": "0", "zero": "0"}
DUAL_SIGN = {"+": "-", "-": "+", "0": "0"}


def sign_of(s):
    try:
        return SIGNS[s]
    except KeyError:
        raise ValueError(f"unknown sign selector {s!r}; use +, - or 0") from None


def _basis(n):
    return [F.basis_vector(n, mu) for mu in range(n)]


def _blades(n):
    return [F.basis_blade(n, A) for A in range(1 << n)]


class ExtensorField:
    """A k-linear field map: takes k fields, returns a field."""

    def __init__(self, dim, arity, fn):
        self.dim = dim
        self.arity = arity
        self.fn = fn

    def __call__(self, *args):
        if len(args) != self.arity:
            raise TypeError(f"expected {self.arity} arguments, got {len(args)}")
        return self.fn(*args)


class DerivativePair:
    """A pair of a-directional covariant derivatives (plus, minus) and what follows from it."""

    dim = None

    def plus(self, a, X):
        raise NotImplementedError

    def minus(self, a, X):
        raise NotImplementedError

    def zero(self, a, X):
        return (self.plus(a, X) + self.minus(a, X)) * 0.5

    def cov(self, sign, a, X):
        s = sign_of(sign)
        if s == "+":
            return self.plus(a, X)
        if s == "-":
            return self.minus(a, X)
        return self.zero(a, X)

    def connection_operator(self, sign, a, b):
        s = sign_of(sign)
        if s == "0":
            raise ValueError("connection operators exist for + and - only")
        return self.cov(s, a, b)

    # extensor fields -------------------------------------------------------
    def extensor_cov_deriv(self, t, signs, a, *args, method="probe"):
        """Covariant derivative of a k-extensor field ``t`` evaluated on ``args``.

        ``signs`` lists one selector per argument slot followed by the one
        for the output.  ``probe`` solves the scalar defining relation
        against every basis blade; ``closed`` uses the dual-sign formula.
        """
        signs = [sign_of(s) for s in signs]
        if len(signs) != len(args) + 1:
            raise ValueError(f"need {len(args) + 1} sign selectors, got {len(signs)}")
        *slot_signs, out_sign = signs
        value = t(*args)
        corrections = []
        for i, (s, X) in enumerate(zip(slot_signs, args)):
            moved = list(args)
            moved[i] = self.cov(s, a, X)
            corrections.append(t(*moved))
        if method == "closed":
            out = self.cov(DUAL_SIGN[out_sign], a, value)
            for c in corrections:
                out = out - c
            return out
        if method != "probe":
            raise ValueError(f"unknown method {method!r}")
        out = None
        for B in _blades(self.dim):
            s = F.directional_derivative(a, value.dot(B))
            for c in corrections:
                s = s - c.dot(B)
            s = s - value.dot(self.cov(out_sign, a, B))
            term = B * s
            out = term if out is None else out + term
        return out

    def extensor11_cov_deriv(self, t, signs, a):
        """Covariant derivative of a (1,1)-extensor field, returned as an extensor field."""
        s1, s = (sign_of(x) for x in signs)
        cols = []
        for b in _basis(self.dim):
            img = self.cov(DUAL_SIGN[s], a, t(b)) - t(self.cov(s1, a, b))
            cols.append(img)
        return F.matrix_from_columns(cols)


def _gamma_kernel(av, G):
    return np.einsum("...m,...lmn->...ln", mv.vector_part(av), G)


class ConnectionField(DerivativePair):
    """Connection given by its table Γ[λ, μ, ν] = γ(b_μ, b_ν)·b_λ."""

    def __init__(self, table, name="connection"):
        if table.shape != (table.dim,) * 3:
            raise mv.DimensionError(f"connection table must be n×n×n, got {table.shape}")
        self.table = table
        self.dim = table.dim
        self.name = name

    @classmethod
    def from_exprs(cls, dim, entries, name="connection"):
        """``entries[l][m][n]`` are expressions (strings or Expr)."""
        arr = np.empty((dim, dim, dim), dtype=object)
        for idx in np.ndindex(arr.shape):
            e = entries[idx[0]][idx[1]][idx[2]]
            arr[idx] = E.parse_expr(e, dim) if isinstance(e, str) else E.as_expr(e)
        return cls(F.ExprField(dim, arr), name)

    @classmethod
    def flat(cls, dim):
        return cls(F.ConstField(dim, np.zeros((dim,) * 3)), "flat")

    @classmethod
    def from_bilinear(cls, dim, fn, name="connection"):
        """Table from a field-level bilinear map fn(b_mu, b_nu) → vector field."""
        return cls(table_from_gamma(dim, fn), name)

    def __add__(self, other):
        return ConnectionField(self.table + other.table, f"{self.name}+{other.name}")

    def __sub__(self, other):
        return ConnectionField(self.table - other.table, f"{self.name}-{other.name}")

    def __repr__(self):
        return f"ConnectionField({self.name!r}, dim={self.dim})"

    # pointwise pieces ------------------------------------------------------
    def gamma_a(self, a):
        """The extensor field b ↦ γ(a, b)."""
        return F.Op(lambda x, G: x.bil(G, _gamma_kernel), (a, self.table), (self.dim, self.dim))

    def gamma(self, a, b):
        return self.gamma_a(a)(b)

    def generalized(self, a, X):
        return self.gamma_a(a).generalize(X)

    def generalized_adjoint(self, a, X):
        return self.gamma_a(a).T.generalize(X)

    def gauge_omega(self, a):
        """Ω(a) = ½ Σ_mu γ(a, b_mu) ∧ b_mu."""
        total = None
        for b in _basis(self.dim):
            term = self.gamma(a, b) ^ b
            total = term if total is None else total + term
        return total * 0.5

    def skew_generalized(self, a, X):
        return (self.generalized(a, X) - self.generalized_adjoint(a, X)) * 0.5

    def is_symmetric_on(self, ctx, tol=1e-12):
        G = self.table.values(ctx)
        return float(np.max(np.abs(G - np.swapaxes(G, -1, -2)), initial=0.0)) <= tol

    def symmetrized(self):
        sym = F.Op(lambda t: t.lin(lambda c: 0.5 * (c + np.swapaxes(c, -1, -2))), (self.table,), self.table.shape)
        return ConnectionField(sym, f"sym({self.name})")

    # derivatives -----------------------------------------------------------
    def plus(self, a, X):
        if X.shape == ():
            return F.directional_derivative(a, X)
        return F.directional_derivative(a, X) + self.generalized(a, X)

    def minus(self, a, X):
        if X.shape == ():
            return F.directional_derivative(a, X)
        return F.directional_derivative(a, X) - self.generalized_adjoint(a, X)

    def zero_via_omega(self, a, X):
        """∇⁰ written with the gauge connection field: a·∂ₒX + Ω(a)×X."""
        return F.directional_derivative(a, X) + self.gauge_omega(a).cross(X)

    def deform(self, lam):
        return DeformedPair(self, lam)

    # torsion and curvature -------------------------------------------------
    def torsion(self, a, b):
        return self.gamma(a, b) - self.gamma(b, a)

    def torsion_operator_form(self, a, b):
        return self.plus(a, b) - self.plus(b, a) - F.lie_bracket(a, b)

    def curvature(self, a, b, c):
        """Coefficient form: derivatives of γ along a and b, commutator, bracket term."""
        ga, gb = self.gamma_a(a), self.gamma_a(b)
        out = F.directional_derivative(a, gb)(c) - F.directional_derivative(b, ga)(c)
        out = out + ga(gb(c)) - gb(ga(c))
        return out - self.gamma(F.lie_bracket(a, b), c)

    def curvature_operator_form(self, a, b, c):
        return (self.plus(a, self.plus(b, c)) - self.plus(b, self.plus(a, c))
                - self.plus(F.lie_bracket(a, b), c))

    def torsion_field(self):
        return ExtensorField(self.dim, 2, self.torsion)

    def curvature_field(self):
        return ExtensorField(self.dim, 3, self.curvature)

    # Cartan fields ---------------------------------------------------------
    def cartan_theta(self, c):
        """Θ(c) = ½ Σ (b_mu∧b_nu)(τ(b_mu, b_nu)·c)."""
        total = None
        B = _basis(self.dim)
        for mu in range(self.dim):
            for nu in range(mu + 1, self.dim):
                term = (B[mu] ^ B[nu]) * self.torsion(B[mu], B[nu]).dot(c)
                total = term if total is None else total + term
        return _or_zero(total, self.dim)

    def cartan_omega(self, c, d):
        """𝛀(c, d) = ½ Σ (b_mu∧b_nu)(ρ(b_mu, b_nu, c)·d)."""
        total = None
        B = _basis(self.dim)
        for mu in range(self.dim):
            for nu in range(mu + 1, self.dim):
                term = (B[mu] ^ B[nu]) * self.curvature(B[mu], B[nu], c).dot(d)
                total = term if total is None else total + term
        return _or_zero(total, self.dim)

    def torsion_from_theta(self, a, b):
        """τ(a, b) recovered as Σ_l b_l ((a∧b)·Θ(b_l))."""
        ab = a ^ b
        return F.dummy_sum(self.dim, lambda l: F.basis_vector(self.dim, l) * ab.dot(self.cartan_theta(F.basis_vector(self.dim, l))))

    def curvature_from_omega(self, a, b, c):
        ab = a ^ b
        return F.dummy_sum(self.dim, lambda l: F.basis_vector(self.dim, l) * ab.dot(self.cartan_omega(c, F.basis_vector(self.dim, l))))

    def cartan_connection_op(self, kind, b, c):
        """First kind: Σ b_mu ((∇⁺_{b_mu} b)·c).  Second kind: Σ b_mu (b·(∇⁻_{b_mu} c))."""
        B = _basis(self.dim)
        if kind in ("first", "+"):
            return F.dummy_sum(self.dim, lambda mu: B[mu] * self.plus(B[mu], b).dot(c))
        if kind in ("second", "-"):
            return F.dummy_sum(self.dim, lambda mu: B[mu] * b.dot(self.minus(B[mu], c)))
        raise ValueError(f"unknown Cartan operator kind {kind!r}")

    def structure_equation_residuals(self, c, d):
        """Both Cartan structure equations as residual fields (LHS − RHS)."""
        B = _basis(self.dim)
        rhs1 = F.nabla_o(c, "curl") + F.dummy_sum(
            self.dim, lambda s: B[s] ^ self.cartan_connection_op("second", B[s], c))
        rhs2 = F.nabla_o(self.cartan_connection_op("first", c, d), "curl") + F.dummy_sum(
            self.dim, lambda s: self.cartan_connection_op("first", c, B[s]) ^ self.cartan_connection_op("second", B[s], d))
        return self.cartan_theta(c) - rhs1, self.cartan_omega(c, d) - rhs2


def _or_zero(total, n):
    if total is None:
        return F.constant(mv.Multivector(n))
    return total


def _table_from_vectors(dim, vals):
    """Stack n² vector fields (ordered m-major) into a Γ[λ, μ, ν] table."""

    def fn(*jets):
        comps = [j.lin(mv.vector_part) for j in jets]
        s = J.stack(comps, axis=-1)  # (..., λ, m*n)
        c = s.c.reshape(s.c.shape[:2] + (dim, dim, dim))
        return J.Jet(c, s.n, s.k)

    return F.Op(fn, vals, (dim, dim, dim))


def table_from_gamma(dim, gamma):
    """Connection table from a field-level bilinear map gamma(b_mu, b_nu)."""
    B = _basis(dim)
    vals = [gamma(B[m], B[n]) for m in range(dim) for n in range(dim)]
    return _table_from_vectors(dim, vals)


class DeformedPair(DerivativePair):
    """λ-deformation of a derivative pair."""

    def __init__(self, base, lam):
        self.base = base
        self.lam = lam
        self.dim = base.dim
        self._ext = lam.extend()
        self._ext_inv = lam.inv().extend()
        self._ext_adj = lam.T.extend()
        self._ext_star = lam.inv().T.extend()

    def plus(self, a, X):
        if X.shape == ():
            return F.directional_derivative(a, X)
        return self._ext(self.base.plus(a, self._ext_inv(X)))

    def minus(self, a, X):
        if X.shape == ():
            return F.directional_derivative(a, X)
        return self._ext_star(self.base.minus(a, self._ext_adj(X)))


def gamma_a(conn, a):
    return conn.gamma_a(a)


def gauge_omega(conn, a):
    return conn.gauge_omega(a)


def cov_deriv(conn, sign, a, X):
    return conn.cov(sign, a, X)


def connection_operator(conn, sign, a, b):
    return conn.connection_operator(sign, a, b)


def deform_cov_deriv(lam, conn):
    return DeformedPair(conn, lam)


def extensor_cov_deriv(conn, t, signs, a, *args, method="probe"):
    return conn.extensor_cov_deriv(t, signs, a, *args, method=method)


def torsion(conn, a, b):
    return conn.torsion(a, b)


def curvature(conn, a, b, c):
    return conn.curvature(a, b, c)


def cartan_theta(conn, c):
    return conn.cartan_theta(c)


def cartan_omega(conn, c, d):
    return conn.cartan_omega(c, d)


def cartan_connection_op(conn, kind, b, c):
    return conn.cartan_connection_op(kind, b, c)


def structure_equation_residuals(conn, c, d):
    return conn.structure_equation_residuals(c, d)
