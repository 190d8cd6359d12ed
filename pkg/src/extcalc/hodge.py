"""Volume pseudoscalars, Hodge stars, coderivatives and the derivative operators built from them."""
import numpy as np

from . import fields as F
from . import metric as M
from . import multivector as mv
from .extensor import Extensor11
from .jet import Jet


def _basis(n):
    return [F.basis_vector(n, mu) for mu in range(n)]


def _pseudoscalar(n):
    return F.basis_blade(n, (1 << n) - 1)


def _sign_q(q):
    return -1.0 if q % 2 else 1.0


class FramePair:
    """Reciprocal frames e_mu = ε(b_mu) and e^mu = ε*(b_mu) from a non-singular extensor field."""

    def __init__(self, eps):
        self.eps = eps
        self.dim = eps.dim
        self.star = eps.inv().T

    @classmethod
    def fiducial(cls, n):
        return cls(F.ConstField(n, np.eye(n)))

    def lower(self, mu):
        return self.eps(F.basis_vector(self.dim, mu))

    def upper(self, mu):
        return self.star(F.basis_vector(self.dim, mu))

    def reciprocity_residual(self):
        """Matrix field of e_mu·e^nu − δ."""
        return self.eps.T @ self.star - F.ConstField(self.dim, np.eye(self.dim))

    def wedge_lower(self):
        return self.eps.extend()(_pseudoscalar(self.dim))

    def wedge_upper(self):
        return self.star.extend()(_pseudoscalar(self.dim))


class VolumeField:
    """Standard volume pseudoscalar and, when a metric is given, the metric one."""

    def __init__(self, frame=None, g=None, dim=None):
        if frame is None:
            if dim is None:
                dim = g.dim
            frame = FramePair.fiducial(dim)
        self.frame = frame
        self.dim = frame.dim
        self.g = g
        lo = frame.wedge_lower()
        self.tau = frame.wedge_upper() * F.sqrt(lo.dot(lo))
        self.tau_g = None if g is None else self.tau * g.sqrt_abs_det

    def sign_form(self):
        """±b_∧ with the sign of det ε."""
        return _pseudoscalar(self.dim) * F.Op(_sign_jet, (self.frame.eps.det(),), ())


def _sign_jet(d):
    return Jet.constant(np.sign(d.value), d.n, d.k)


def volume(frame=None, g=None, dim=None):
    return VolumeField(frame, g, dim)


class HodgeStar:
    """Standard (``g`` omitted) or metric Hodge extensor field."""

    def __init__(self, dim=None, g=None, frame=None):
        self.g = g
        self.vol = VolumeField(frame, g, dim)
        self.dim = self.vol.dim
        self.kind = "standard" if g is None else "metric"

    def __call__(self, X):
        if self.g is None:
            return X.reverse() << self.vol.tau
        return (self.g.ext_inv(X.reverse()) << self.vol.tau) * self.g.sqrt_abs_det

    def inverse(self, X):
        if self.g is None:
            return self.vol.tau >> X.reverse()
        s = _sign_q(self.g.signature[1])
        return (self.vol.tau >> self.g.ext_inv(X.reverse())) * self.g.sqrt_abs_det * s

    def via_metric_products(self, X):
        """⋆_g X written as X̃ ⌟_{g⁻¹} τ_g."""
        return self.g.inverse_metric().left(X.reverse(), self.vol.tau_g)

    def inverse_via_metric_products(self, X):
        s = _sign_q(self.g.signature[1])
        return self.g.inverse_metric().right(self.vol.tau_g, X.reverse()) * s


def hodge_star(X, g=None, frame=None):
    return HodgeStar(X.dim, g, frame)(X)


def hodge_star_inv(X, g=None, frame=None):
    return HodgeStar(X.dim, g, frame).inverse(X)


def curl(X):
    return F.nabla_o(X, "curl")


def div(X):
    return F.nabla_o(X, "div")


def delta_ordinary(X, g=None):
    """δX = ⋆⁻¹(∂ₒ∧⋆X̂), or its metric version when g is given."""
    star = HodgeStar(X.dim, g)
    return star.inverse(curl(star(X.involute())))


def delta_closed_form(X, g=None):
    if g is None:
        return -div(X)
    s = g.sqrt_abs_det
    return -(g.ext(div(g.ext_inv(X) * s)) / s)


def duality_residuals(X, g=None):
    """LHS − RHS for the four curl/divergence duality identities."""
    n = X.dim
    if g is None:
        g = M.MetricField.euclidean(n)
    tau = VolumeField(g=g).tau
    sgn = (-1.0) ** (n + 1)
    gi = g.inverse_metric()
    out = {}
    out["DI.1"] = tau.gp(curl(X)) - div(tau.gp(X)) * sgn
    out["DI.2"] = gi.clifford(tau, curl(X)) - g.ext(div(tau.gp(X))) * sgn / g.det
    st = HodgeStar(n)
    out["HDI.1"] = st.inverse(curl(st(X))) + div(X.involute())
    sg = HodgeStar(n, g)
    s = g.sqrt_abs_det
    out["HDI.2"] = sg.inverse(curl(sg(X))) + g.ext(div(g.ext_inv(X.involute()) * s)) / s
    return out


# ----------------------------------------------------------------------------
# bulk (vector-derivative) operators of a derivative pair

def bulk(pair, which, X, g=None):
    """Σ_mu over basis directions of one of the contracted covariant derivatives.

    ``div_plus``: b_mu ⌟ D⁺_{b_mu}X.  With a metric, ``div``: g⁻¹(b_mu) ⌟ D⁻X,
    ``curl``: b_mu ∧ D⁻X, ``grad``: b_mu (g⁻¹-Clifford) D⁻X.
    """
    n = X.dim
    B = _basis(n)
    if which == "div_plus":
        return F.dummy_sum(n, lambda mu: B[mu] << pair.plus(B[mu], X))
    if which == "curl":
        return F.dummy_sum(n, lambda mu: B[mu] ^ pair.minus(B[mu], X))
    if g is None:
        raise ValueError(f"operator {which!r} needs a metric")
    if which == "div":
        return F.dummy_sum(n, lambda mu: g.inv(B[mu]) << pair.minus(B[mu], X))
    if which == "grad":
        gi = g.inverse_metric()
        return F.dummy_sum(n, lambda mu: gi.clifford(B[mu], pair.minus(B[mu], X)))
    raise ValueError(f"unknown operator {which!r}")


LEVI_CIVITA_OPS = {"div_plus": "div_plus", "div_minus_g": "div", "curl_minus": "curl", "grad_minus": "grad"}


def levi_civita_derivative(g, which, X, conn=None):
    if which not in LEVI_CIVITA_OPS:
        raise ValueError(f"unknown Levi-Civita derivative {which!r}")
    conn = conn or g.levi_civita()
    return bulk(conn, LEVI_CIVITA_OPS[which], X, g)


def levi_civita_closed_forms(g, X):
    s = g.sqrt_abs_det
    return {
        "div_plus": div(X * s) / s,
        "div_minus_g": g.ext(div(g.ext_inv(X) * s)) / s,
        "curl_minus": curl(X),
    }


def levi_civita_structure_residuals(g, b, X, conn=None):
    """The four basis-sum identities of the Levi-Civita connection."""
    n = g.dim
    conn = conn or g.levi_civita()
    B = _basis(n)
    s = g.sqrt_abs_det
    grad_log = F.nabla_o(s.as_mv(), "full") / s
    return {
        "LGS.3a": F.dummy_sum(n, lambda mu: B[mu].dot(conn.gamma(B[mu], b))) - F.directional_derivative(b, s) / s,
        "LGS.3b": F.dummy_sum(n, lambda mu: B[mu] ^ conn.gamma_a(B[mu]).T(b)),
        "LGS.4a": F.dummy_sum(n, lambda mu: B[mu] << conn.generalized(B[mu], X)) - (grad_log << X),
        "LGS.4b": F.dummy_sum(n, lambda mu: B[mu] ^ conn.generalized_adjoint(B[mu], X)),
    }


def lagrangian_identities(g, X, Y, conn=None):
    """Residual scalar fields of the three integration-by-parts identities."""
    n = g.dim
    conn = conn or g.levi_civita()
    gi = g.inverse_metric()
    s = g.sqrt_abs_det
    B = _basis(n)

    def total_div(inner):
        V = F.dummy_sum(n, lambda mu: B[mu] * inner(B[mu]))
        return div(V * s).scalar_part() / s

    Ddiv = lambda Z: bulk(conn, "div", Z, g)
    Dgrad = lambda Z: bulk(conn, "grad", Z, g)
    return {
        "LCD.6a": gi.dot(curl(X), Y) + gi.dot(X, Ddiv(Y)) - total_div(lambda e: gi.dot(e ^ X, Y)),
        "LCD.6b": gi.dot(Ddiv(X), Y) + gi.dot(X, curl(Y)) - total_div(lambda e: gi.dot(gi.left(e, X), Y)),
        "LCD.6c": gi.dot(Dgrad(X), Y) + gi.dot(X, Dgrad(Y)) - total_div(lambda e: gi.dot(gi.clifford(e, X), Y)),
    }


# ----------------------------------------------------------------------------
# gauge derivatives

class GaugeDerivatives:
    """Levi-Civita derivatives transported to the orthonormal gauge η by a factor h."""

    def __init__(self, fact, conn=None):
        self.fact = fact
        self.g = fact.metric
        self.dim = self.g.dim
        self.conn = conn or self.g.levi_civita()
        self.eta = fact.eta_metric()
        self.h = fact.h
        self.h_ext = self.h.extend()
        self.h_inv_ext = fact.h_inv.extend()
        self.h_adj_ext = self.h.T.extend()
        self.h_star_ext = fact.h_star.extend()

    def plus(self, v, X):
        """h̲(D⁺_v h̲⁻¹X)."""
        return self.h_ext(self.conn.plus(v, self.h_inv_ext(X)))

    def minus_labelled(self, a, X):
        """The minus derivative along h*(a): h̲*(D⁻_a h̲†X)."""
        return self.h_star_ext(self.conn.minus(a, self.h_adj_ext(X)))

    def minus(self, v, X):
        return self.minus_labelled(self.h.T(v), X)

    def omega0(self, a):
        """Gauge bivector Ω₀(a) = −½ Σ η̲(b_mu∧b_nu)[a, h⁻¹b_mu, h⁻¹b_nu]."""
        n = self.dim
        B = _basis(n)
        hi = self.fact.h_inv
        total = None
        for mu in range(n):
            for nu in range(n):
                if mu == nu:
                    continue
                term = F.constant(_eta_blade(self.fact.eta_matrix, mu, nu)) * self.g.christoffel_first(a, hi(B[mu]), hi(B[nu]))
                total = term if total is None else total + term
        if total is None:
            return F.constant(mv.Multivector(n))
        return total * -0.5

    def plus_via_omega0(self, a, X):
        return F.directional_derivative(a, X) + self.eta.cross(self.omega0(a), X)

    def pairing_residual(self, a, b, c):
        """(𝐃⁺_{h(a)} b)·_η c − [h(a), h⁻¹(b), h⁻¹(c)]."""
        ha = self.h(a)
        hi = self.fact.h_inv
        return self.eta.dot(self.plus(ha, b), c) - self.g.christoffel_first(ha, hi(b), hi(c))

    def eta_relation_residual(self, a, X):
        """η̲(h̲ D⁺_a h̲⁻¹ η̲X) − 𝐃⁻ along h*(a)."""
        ex = self.eta.ext
        return ex(self.plus(a, ex(X))) - self.minus_labelled(a, X)

    def bulk(self, which, X):
        n = self.dim
        B = _basis(n)
        hs = self.fact.h_star
        if which == "div":
            return F.dummy_sum(n, lambda mu: self.eta.left(hs(B[mu]), self.minus_labelled(B[mu], X)))
        if which == "curl":
            return F.dummy_sum(n, lambda mu: hs(B[mu]) ^ self.minus_labelled(B[mu], X))
        if which == "grad":
            return F.dummy_sum(n, lambda mu: self.eta.clifford(hs(B[mu]), self.minus_labelled(B[mu], X)))
        raise ValueError(f"unknown gauge operator {which!r}")

    def golden_residuals(self, X):
        hs = self.h_star_ext
        return {
            "GD.7a": hs(bulk(self.conn, "div", X, self.g)) - self.bulk("div", hs(X)),
            "GD.7b": hs(bulk(self.conn, "curl", X, self.g)) - self.bulk("curl", hs(X)),
            "GD.7c": hs(bulk(self.conn, "grad", X, self.g)) - self.bulk("grad", hs(X)),
        }

    def closed_forms(self, X):
        eta = self.fact.eta
        dh = self.h.det()
        inner = (self.fact.h_inv @ eta).extend()(X) * dh
        div_form = (eta @ self.h).extend()(div(inner)) / dh
        curl_form = self.h_star_ext(curl(self.h_adj_ext(X)))
        return {"div": div_form, "curl": curl_form}


def _eta_blade(eta, mu, nu):
    n = eta.shape[0]
    b = mv.Multivector.blade(n, 1 << mu) ^ mv.Multivector.blade(n, 1 << nu)
    return Extensor11(eta).extend()(b)


def gauge_derivative(fact, sign, a, X, conn=None):
    gd = GaugeDerivatives(fact, conn)
    if sign in ("+", "plus"):
        return gd.plus(a, X)
    if sign in ("-", "minus"):
        return gd.minus(a, X)
    raise ValueError(f"unknown sign {sign!r}")


def gauge_bulk(fact, which, X, conn=None):
    return GaugeDerivatives(fact, conn).bulk(which, X)


# ----------------------------------------------------------------------------
# covariant Hodge coderivative of a geometric structure

class CovariantHodge:
    """Operators of a g-compatible connection acting through the metric Hodge star."""

    def __init__(self, conn, g):
        self.conn = conn
        self.g = g
        self.dim = g.dim
        self.star = HodgeStar(g.dim, g)
        self.tau_g = self.star.vol.tau_g
        self.gi = g.inverse_metric()

    def div(self, X):
        return bulk(self.conn, "div", X, self.g)

    def curl(self, X):
        return bulk(self.conn, "curl", X, self.g)

    def grad(self, X):
        return bulk(self.conn, "grad", X, self.g)

    def coderivative(self, X):
        return self.star.inverse(self.curl(self.star(X.involute())))

    def residuals(self, a, X):
        n = self.dim
        gi = self.gi
        t = self.tau_g
        Dm = self.conn.minus
        sgn = (-1.0) ** (n + 1)
        out = {"CHC.1": Dm(a, t)}
        for name, prod in (("clifford", gi.clifford), ("wedge", lambda u, v: u ^ v), ("left", gi.left)):
            out[f"CHC.2[{name}]"] = Dm(a, prod(t, X)) - prod(t, Dm(a, X))
        out["CHC.3d"] = self.grad(X) - self.div(X) - self.curl(X)
        out["CHC.4"] = gi.clifford(t, self.curl(X)) - self.div(gi.clifford(t, X)) * sgn
        out["CHC.5"] = self.star.inverse(self.curl(self.star(X))) + self.div(X.involute())
        out["CHC.6"] = self.coderivative(X) + self.div(X)
        return out


def covariant_hodge_coderivative(conn, g, X):
    return CovariantHodge(conn, g).coderivative(X)
