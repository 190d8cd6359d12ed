"""Metric fields, metric products, Christoffel operators and the Levi-Civita connection."""
import numpy as np

from . import connection as C
from . import fields as F
from . import jet as J
from . import multivector as mv
from .extensor import _lc_basis

DEGENERATE_TOL = 1e-10


class MetricError(ValueError):
    pass


class SignatureError(MetricError):
    pass


def _basis(n):
    return [F.basis_vector(n, mu) for mu in range(n)]


# ----------------------------------------------------------------------------
# metric-dependent Clifford product

def _left_mult_jets(gj):
    """Jets of the matrices L_A with (b_A *_g Y) = L_A @ Y, for every blade A."""
    n = gj.shape[-1]
    N = 1 << n
    T = mv.tables(n)
    P, k = gj.points, gj.k
    wedge_m = np.zeros((n, N, N))
    for mu in range(n):
        e = np.zeros(N)
        e[1 << mu] = 1.0
        for j in range(N):
            y = np.zeros(N)
            y[j] = 1.0
            wedge_m[mu, :, j] = mv.wedge(e, y)
    lcb = _lc_basis(n)
    # (g(b_mu) ⌟ Y) = Σ_nu g[nu, mu] C_nu Y
    vec_L = []
    for mu in range(n):
        gcol = gj[:, mu]
        lc = gcol.lin(lambda c: np.einsum("...v,vij->...ij", c, lcb))
        vec_L.append(lc + J.Jet.constant(np.broadcast_to(wedge_m[mu], (P, N, N)), gj.n, k))
    L = [None] * N
    L[0] = J.Jet.constant(np.broadcast_to(np.eye(N), (P, N, N)), gj.n, k)
    order = sorted(range(1, N), key=lambda A: bin(A).count("1"))
    for A in order:
        low = A & -A
        mu = low.bit_length() - 1
        rest = A ^ low
        out = J.matmul(vec_L[mu], L[rest])
        if rest:
            # b_mu ∧ R = b_mu *_g R − g(b_mu) ⌟ R
            for nu in range(n):
                m = 1 << nu
                if rest & m:
                    s = T.lc[m, rest ^ m]
                    if s:
                        out = out - gj[nu, mu].smul(L[rest ^ m]).scale(float(s))
        L[A] = out
    return L


def metric_clifford_jet(gj, xj, yj):
    L = _left_mult_jets(gj)
    out = None
    for A, LA in enumerate(L):
        term = xj[A].smul(J.matvec(LA, yj))
        out = term if out is None else out + term
    return out


# ----------------------------------------------------------------------------

class MetricField:
    """Symmetric non-degenerate extensor field g with declared signature (p, q)."""

    def __init__(self, G, signature=None, name="g"):
        if G.shape != (G.dim, G.dim):
            raise mv.DimensionError("a metric must be an n×n extensor field")
        self.G = G
        self.dim = G.dim
        if signature is None:
            signature = (self.dim, 0)
        p, q = (int(s) for s in signature)
        if p + q != self.dim or p < 0 or q < 0:
            raise SignatureError(f"signature {signature} does not add up to dimension {self.dim}")
        self.signature = (p, q)
        self.name = name
        self.inv = G.inv()
        self.ext = G.extend()
        self.ext_inv = self.inv.extend()
        self.det = G.det()
        self.sqrt_abs_det = F.sqrt_abs_det(G)
        self._inverse_metric = None

    @classmethod
    def from_exprs(cls, rows, signature=None, name="g"):
        n = len(rows)
        sym = [[rows[min(i, j)][max(i, j)] for j in range(n)] for i in range(n)]
        return cls(F.extensor_field(sym), signature, name)

    @classmethod
    def constant(cls, matrix, signature=None):
        m = np.asarray(matrix, dtype=float)
        return cls(F.ConstField(m.shape[0], m), signature)

    @classmethod
    def euclidean(cls, n):
        return cls.constant(np.eye(n), (n, 0))

    def inverse_metric(self):
        """g⁻¹ as a metric in its own right (used by the minus-side products)."""
        if self._inverse_metric is None:
            m = MetricField.__new__(MetricField)
            m.G, m.dim, m.signature, m.name = self.inv, self.dim, self.signature, f"{self.name}⁻¹"
            m.inv, m.ext, m.ext_inv = self.G, self.ext_inv, self.ext
            m.det = F.reciprocal(self.det)
            m.sqrt_abs_det = F.reciprocal(self.sqrt_abs_det)
            m._inverse_metric = self
            self._inverse_metric = m
        return self._inverse_metric

    def validate(self, ctx):
        """Check symmetry, non-degeneracy and the declared signature at every point."""
        g = self.G.values(ctx)
        if np.max(np.abs(g - np.swapaxes(g, -1, -2)), initial=0.0) > 1e-12:
            raise MetricError("metric is not symmetric")
        ev = np.linalg.eigvalsh(g)
        for i, e in enumerate(ev):
            if np.min(np.abs(e)) <= DEGENERATE_TOL:
                raise MetricError(f"degenerate metric at point {tuple(ctx.points[i])}")
            q = int(np.sum(e < 0))
            if (self.dim - q, q) != self.signature:
                raise SignatureError(
                    f"signature {(self.dim - q, q)} at point {tuple(ctx.points[i])} differs from declared {self.signature}")
        sgn = np.sign(np.linalg.det(g))
        if np.any(sgn != (-1) ** self.signature[1]):
            raise SignatureError("sign of det g disagrees with (−1)^q")
        return True

    # products --------------------------------------------------------------
    def dot(self, X, Y):
        return self.ext(X).dot(Y)

    def left(self, X, Y):
        return self.ext(X) << Y

    def right(self, X, Y):
        return X >> self.ext(Y)

    def clifford(self, X, Y):
        F._require_mv(X, Y)
        return F.Op(metric_clifford_jet, (self.G, X, Y), X.shape)

    def cross(self, X, Y):
        return (self.clifford(X, Y) - self.clifford(Y, X)) * 0.5

    def product(self, which, X, Y):
        fn = {"dot": self.dot, "left": self.left, "right": self.right,
              "clifford": self.clifford, "cross": self.cross}.get(which)
        if fn is None:
            raise ValueError(f"unknown metric product {which!r}")
        return fn(X, Y)

    def apply(self, v):
        return self.G(v)

    def apply_inv(self, v):
        return self.inv(v)

    def d(self, a):
        """a·∂ₒg as an extensor field."""
        return F.directional_derivative(a, self.G)

    def d_ext(self, a):
        return F.directional_derivative(a, self.ext)

    # Christoffel operators -------------------------------------------------
    def christoffel_first(self, a, b, c):
        dd = F.directional_derivative
        br = F.lie_bracket
        s = dd(a, self.dot(b, c)) + dd(b, self.dot(c, a)) - dd(c, self.dot(a, b))
        s = s + self.dot(c, br(a, b)) + self.dot(b, br(c, a)) - self.dot(a, br(b, c))
        return s * 0.5

    def christoffel_second(self, c, a, b):
        """{c; a, b} = [a, b, g⁻¹(c)]."""
        return self.christoffel_first(a, b, self.inv(c))

    # Levi-Civita -----------------------------------------------------------
    def omega_zero(self, a):
        """Bivector field ω₀(a) built from first derivatives of g."""
        n = self.dim
        B = _basis(n)
        total = None
        for al in range(n):
            for be in range(al + 1, n):
                ga_b = self.d(B[al])(B[be]).dot(a)
                gb_a = self.d(B[be])(B[al]).dot(a)
                term = self.ext_inv(B[al] ^ B[be]) * (ga_b - gb_a)
                total = term if total is None else total + term
        if total is None:
            return F.constant(mv.Multivector(n))
        return total * -0.5

    def lambda_sym(self, a):
        """½ g⁻¹∘(a·∂ₒg) as an extensor field."""
        return (self.inv @ self.d(a)) * 0.5

    def levi_civita_gamma(self, a, b):
        return self.lambda_sym(a)(b) + self.cross(self.omega_zero(a), b)

    def levi_civita(self):
        return C.ConnectionField(C.table_from_gamma(self.dim, self.levi_civita_gamma), "levi-civita")

    def christoffel_table(self):
        """Classical Γ^l_{mn} = ½ g^{lk}(∂_m g_{kn} + ∂_n g_{km} − ∂_k g_{mn}) as a table field."""
        n = self.dim
        dG = F.stack_fields([F.partial(self.G, mu) for mu in range(n)], (n,))

        def fn(gi, d):
            # d[..., m, k, n] = ∂_m g_kn
            t = d.lin(lambda c: 0.5 * (np.einsum("...mkn->...kmn", c) + np.einsum("...nkm->...kmn", c) - c))
            return gi.bil(t, lambda x, y: np.einsum("...lk,...kmn->...lmn", x, y))

        return F.Op(fn, (self.inv, dG), (n, n, n))

    def levi_civita_split(self, a):
        """(g-symmetric, g-skew) parts of b ↦ λ(a, b) as extensor fields."""
        gam = C.ConnectionField(C.table_from_gamma(self.dim, self.levi_civita_gamma)).gamma_a(a)
        adj = self.inv @ gam.T @ self.G
        return (gam + adj) * 0.5, (gam - adj) * 0.5

    def generalized_lambda(self, a, X):
        """½ g̲⁻¹∘(a·∂ₒg̲)(X) + ω₀(a)×_g X."""
        return (self.ext_inv @ self.d_ext(a))(X) * 0.5 + self.cross(self.omega_zero(a), X)

    # compatibility ---------------------------------------------------------
    def compatibility_residual(self, conn, a):
        """(∇^{++}_a g) as a matrix field: a·∂ₒg − g∘γ_a − γ_a†∘g."""
        ga = conn.gamma_a(a)
        return self.d(a) - self.G @ ga - ga.T @ self.G

    def inverse_compatibility_residual(self, conn, a):
        """(∇^{−−}_a g⁻¹) = a·∂ₒg⁻¹ + γ_a∘g⁻¹ + g⁻¹∘γ_a†."""
        ga = conn.gamma_a(a)
        return F.directional_derivative(a, self.inv) + ga @ self.inv + self.inv @ ga.T

    def biv_g(self, t):
        return (t @ self.inv).biv()

    def compatible_omega(self, conn, a):
        return self.biv_g(conn.gamma_a(a)) * 0.5

    def compatible_split_residual(self, conn, a, b):
        """γ_a(b) − ½g⁻¹∘(a·∂ₒg)(b) − ω(a)×_g b."""
        return conn.gamma(a, b) - self.lambda_sym(a)(b) - self.cross(self.compatible_omega(conn, a), b)

    def compatible_connection(self, contorsion):
        """λ + (b ↦ K(a)×_g b) for a bivector-valued ``contorsion(a)``."""
        lam = self.levi_civita_gamma

        def gam(a, b):
            return lam(a, b) + self.cross(contorsion(a), b)

        return C.ConnectionField(C.table_from_gamma(self.dim, gam), "compatible")

    # gauge factor ----------------------------------------------------------
    def gauge_factor(self):
        return GaugeMetricFactorization(self)


def _order_eigen(w, Q, q):
    """Row order for h: positive eigenvalues first, then coordinate alignment, then size."""
    n = len(w)
    keys = []
    for i in range(n):
        v = Q[:, i]
        keys.append((0 if w[i] > 0 else 1, int(np.argmax(np.abs(v) - 1e-12 * np.arange(n))), -w[i], i))
    return [k[-1] for k in sorted(keys)]


def _eigen_root(g0, signature):
    p, q = signature
    h0 = np.empty_like(g0)
    for i, m in enumerate(g0):
        w, Q = np.linalg.eigh(m)
        if np.min(np.abs(w)) <= DEGENERATE_TOL:
            raise MetricError("degenerate metric: eigenvalue within 1e-10 of zero")
        if int(np.sum(w < 0)) != q:
            raise SignatureError("signature change across sample points")
        order = _order_eigen(w, Q, q)
        rows = []
        for j in order:
            v = Q[:, j]
            if v[np.argmax(np.abs(v) - 1e-12 * np.arange(len(v)))] < 0:
                v = -v
            rows.append(np.sqrt(abs(w[j])) * v)
        h0[i] = np.array(rows)
    return h0


def _sqrt_one_plus(N, order):
    """√(1 + N) for a nilpotent matrix jet N by the binomial series."""
    n = N.shape[-1]
    out = J.Jet.constant(np.broadcast_to(np.eye(n), (N.points, n, n)), N.n, N.k)
    power = None
    for m in range(1, order + 1):
        power = N if power is None else J.matmul(power, N)
        coef = _binom_half(m)
        out = out + power.scale(coef)
    return out


def _binom_half(m):
    c = 1.0
    for i in range(m):
        c *= (0.5 - i) / (i + 1)
    return c


class GaugeMetricFactorization:
    """g = h†∘η∘h with η = diag(+1 × p, −1 × q)."""

    def __init__(self, metric):
        self.metric = metric
        n = metric.dim
        p, q = metric.signature
        self.eta_matrix = np.diag([1.0] * p + [-1.0] * q)
        self.eta = F.ConstField(n, self.eta_matrix)
        self.h = F.Lifted(n, (n, n), self._h_jet)
        self.h_inv = self.h.inv()
        self.h_star = self.h_inv.T

    def _h_jet(self, ctx, k):
        gj = self.metric.G.jet(ctx, k)
        g0 = gj.value
        h0 = _eigen_root(g0, self.metric.signature)
        if k == 0:
            return J.Jet.constant(h0, ctx.n, 0)
        g0inv = J.Jet.constant(np.linalg.inv(g0), ctx.n, k)
        N = J.matmul(g0inv, gj.nilpotent())
        S = _sqrt_one_plus(N, k)
        return J.matmul(J.Jet.constant(h0, ctx.n, k), S)

    def residual(self):
        """h†∘η∘h − g as a matrix field."""
        return self.h.T @ self.eta @ self.h - self.metric.G

    def eta_metric(self):
        return MetricField(self.eta, self.metric.signature, "η")


def gauge_metric_factor(g):
    return GaugeMetricFactorization(g)


def deform_compatible_pair(conn, fact):
    """The h-deformation of a g-compatible pair."""
    return C.DeformedPair(conn, fact.h)


def metric_products(g, X, Y, which):
    return g.product(which, X, Y)


def christoffel_first(g, a, b, c):
    return g.christoffel_first(a, b, c)


def christoffel_second(g, c, a, b):
    return g.christoffel_second(c, a, b)


def omega_zero(g, a):
    return g.omega_zero(a)


def levi_civita(g):
    return g.levi_civita()


def compatibility_residual(conn, g, a):
    return g.compatibility_residual(conn, a)


def compatible_omega(conn, g, a):
    return g.compatible_omega(conn, a)
