"""Bridge to index notation: coefficients of connection, chart changes and component derivatives."""
import numpy as np

from . import expr as E
from . import fields as F
from .expr import EvaluationError

SINGULAR_TOL = 1e-12


class ChartMap:
    """A coordinate change x ↦ x′(x), given by one expression per primed coordinate."""

    def __init__(self, dim, forward):
        if len(forward) != dim:
            raise ValueError(f"chart map needs {dim} component expressions, got {len(forward)}")
        self.dim = dim
        self.forward = [E.parse_expr(e, dim) if isinstance(e, str) else E.as_expr(e) for e in forward]
        jac = np.empty((dim, dim), dtype=object)
        hes = np.empty((dim, dim, dim), dtype=object)
        for i, f in enumerate(self.forward):
            for a in range(dim):
                jac[i, a] = f.diff(a)
                for b in range(dim):
                    hes[i, a, b] = jac[i, a].diff(b)
        self.jacobian = F.ExprField(dim, jac)  # ∂x′^i/∂x^a
        self.hessian = F.ExprField(dim, hes)  # ∂²x′^i/∂x^a∂x^b
        self.inverse_jacobian = self.jacobian.inv()  # ∂x^a/∂x′^i, numeric jet path
        self.inverse_path = "numeric"

    @classmethod
    def identity(cls, dim):
        return cls(dim, [E.Var(mu) for mu in range(dim)])

    def check(self, ctx):
        d = np.linalg.det(self.jacobian.values(ctx))
        bad = np.abs(d) <= SINGULAR_TOL
        if bad.any():
            raise EvaluationError("singular chart-map Jacobian", ctx.points[int(np.argmax(bad))])
        return True

    def lower_frame(self):
        """e_{mu′} = Σ_a (∂x^a/∂x′^mu) b_a."""
        return [F.column(self.inverse_jacobian, mu) for mu in range(self.dim)]

    def upper_frame(self):
        """e^{mu′} = Σ_a (∂x′^mu/∂x^a) b_a."""
        return [F.column(self.jacobian.T, mu) for mu in range(self.dim)]


def fiducial_frames(dim):
    B = [F.basis_vector(dim, mu) for mu in range(dim)]
    return B, B


def frames(dim, chart_map=None):
    if chart_map is None:
        return fiducial_frames(dim)
    return chart_map.lower_frame(), chart_map.upper_frame()


class ClassicalSymbols:
    """Γ^l_{mn} = (∇⁺_{e_m} e_n)·e^l in a coordinate frame pair."""

    def __init__(self, conn, chart_map=None):
        self.conn = conn
        self.dim = conn.dim
        self.chart_map = chart_map
        self.lower, self.upper = frames(self.dim, chart_map)
        n = self.dim
        self.entries = [[[conn.plus(self.lower[m], self.lower[k]).dot(self.upper[l]) for k in range(n)]
                         for m in range(n)] for l in range(n)]

    def __getitem__(self, idx):
        l, m, k = idx
        return self.entries[l][m][k]

    def table(self):
        n = self.dim
        flat = [self.entries[l][m][k] for l in range(n) for m in range(n) for k in range(n)]
        return F.stack_fields(flat, (n, n, n))

    def lower_asymmetry(self):
        """Γ^l_{mn} − Γ^l_{nm} as a stacked field."""
        n = self.dim
        flat = [self.entries[l][m][k] - self.entries[l][k][m] for l in range(n) for m in range(n) for k in range(n)]
        return F.stack_fields(flat, (n, n, n))


def coefficients_of_connection(conn, chart_map=None):
    return ClassicalSymbols(conn, chart_map)


def transformation_residual(conn, chart_map):
    """Primed symbols minus the chart-change expression built from unprimed ones.

    The inhomogeneous term uses ∂²x^b/∂x′^m∂x′^n = −K[b,r] H[r,s,t] K[s,m] K[t,n]
    with K the inverse Jacobian and H the forward Hessian.
    """
    old = ClassicalSymbols(conn).table()
    new = ClassicalSymbols(conn, chart_map).table()
    J = chart_map.jacobian
    K = chart_map.inverse_jacobian
    H = chart_map.hessian

    def fn(new_j, old_j, Jj, Kj, Hj):
        ein = lambda spec: (lambda x, y: np.einsum(spec, x, y))
        # homogeneous part: J[l,c] Γ[c,a,b] K[a,m] K[b,k]
        t = Jj.bil(old_j, ein("...lc,...cab->...lab"))
        t = t.bil(Kj, ein("...lab,...am->...lmb"))
        t = t.bil(Kj, ein("...lmb,...bk->...lmk"))
        # inhomogeneous part: J[l,b] K[b,r] H[r,s,t] K[s,m] K[t,k]
        s = Jj.bil(Kj, ein("...lb,...br->...lr"))
        s = s.bil(Hj, ein("...lr,...rst->...lst"))
        s = s.bil(Kj, ein("...lst,...sm->...lmt"))
        s = s.bil(Kj, ein("...lmt,...tk->...lmk"))
        return new_j - (t - s)

    n = conn.dim
    return F.Op(fn, (new, old, J, K, H), (n, n, n))


def component_transforms(v, chart_map):
    """Residuals of the covariant and contravariant component laws, as stacked fields."""
    n = v.dim
    lo_new, up_new = chart_map.lower_frame(), chart_map.upper_frame()
    J = chart_map.jacobian
    K = chart_map.inverse_jacobian
    cov, con = [], []
    for al in range(n):
        rhs_c = F.dummy_sum(n, lambda b: K.component_of((b, al)) * v.vcomp(b))
        cov.append(v.dot(lo_new[al]) - rhs_c)
        rhs_u = F.dummy_sum(n, lambda b: J.component_of((al, b)) * v.vcomp(b))
        con.append(v.dot(up_new[al]) - rhs_u)
    return F.stack_fields(cov, (n,)), F.stack_fields(con, (n,))


def component_covariant_derivatives(conn, chart_map=None):
    return ComponentDerivatives(conn, chart_map)


class ComponentDerivatives:
    """Index-form covariant derivatives next to their extensor-level counterparts."""

    def __init__(self, conn, chart_map=None):
        self.conn = conn
        self.dim = conn.dim
        self.sym = ClassicalSymbols(conn, chart_map)
        self.lower, self.upper = self.sym.lower, self.sym.upper

    def _dd(self, mu, f):
        return F.directional_derivative(self.lower[mu], f)

    def vector_residuals(self, v):
        """Contravariant (plus) and covariant (minus) component rules, stacked over (mu, l)."""
        n = self.dim
        G = self.sym
        up_res, lo_res = [], []
        for mu in range(n):
            for l in range(n):
                lhs = self.conn.plus(self.lower[mu], v).dot(self.upper[l])
                rhs = self._dd(mu, v.dot(self.upper[l])) + F.dummy_sum(n, lambda a: G[l, mu, a] * v.dot(self.upper[a]))
                up_res.append(lhs - rhs)
                lhs = self.conn.minus(self.lower[mu], v).dot(self.lower[l])
                rhs = self._dd(mu, v.dot(self.lower[l])) - F.dummy_sum(n, lambda a: G[a, mu, l] * v.dot(self.lower[a]))
                lo_res.append(lhs - rhs)
        return F.stack_fields(up_res, (n, n)), F.stack_fields(lo_res, (n, n))

    def tensor_residuals(self, t):
        """Covariant (++) and mixed (+−) component rules for an extensor field, stacked over (mu, a, b)."""
        n = self.dim
        G = self.sym
        tmap = lambda X: t(X)
        low, up = self.lower, self.upper
        cc = lambda a, b: t(low[a]).dot(low[b])
        cm = lambda a, b: t(low[a]).dot(up[b])
        r_cov, r_mix = [], []
        for mu in range(n):
            for a in range(n):
                d_pp = self.conn.extensor_cov_deriv(tmap, "++", low[mu], low[a])
                d_pm = self.conn.extensor_cov_deriv(tmap, "+-", low[mu], low[a])
                for b in range(n):
                    rhs = (self._dd(mu, cc(a, b))
                           - F.dummy_sum(n, lambda s: G[s, mu, a] * cc(s, b))
                           - F.dummy_sum(n, lambda s: G[s, mu, b] * cc(a, s)))
                    r_cov.append(d_pp.dot(low[b]) - rhs)
                    rhs = (self._dd(mu, cm(a, b))
                           - F.dummy_sum(n, lambda s: G[s, mu, a] * cm(s, b))
                           + F.dummy_sum(n, lambda s: G[b, mu, s] * cm(a, s)))
                    r_mix.append(d_pm.dot(up[b]) - rhs)
        return F.stack_fields(r_cov, (n, n, n)), F.stack_fields(r_mix, (n, n, n))
