"""Identity suites run by the verification harness.

A suite maps a :class:`Workbench` to a list of :class:`Check` objects; a
check pairs two lazily built fields that must agree at every sample point.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .. import classic as CL
from .. import connection as C
from .. import expr as E
from .. import fields as F
from .. import hodge as H
from .. import metric as M
from .. import multivector as mv

TIERS = ("exact", "algebraic", "first", "second", "fd")
FIXED_TOL = {"exact": 1e-12, "algebraic": 1e-10, "fd": 1e-8}
FD_STEP = 1e-5


@dataclass
class Check:
    id: str
    eq: object          # equation tag or None for plumbing checks
    lhs: object         # Field, or a callable ctx -> (lhs values, rhs values)
    rhs: object = None  # Field or None meaning zero
    tier: str = "first"


# ----------------------------------------------------------------------------
# default test fields

def _coeff_rng(dim, salt):
    return np.random.default_rng(1000 * dim + salt)


def _poly(rng, dim, base=0.0):
    """A smooth low-degree expression with small fixed coefficients."""
    i, j, k = (int(v) + 1 for v in rng.integers(0, dim, 3))
    c = np.round(rng.uniform(-1, 1, 4), 2)
    s = f"{base + c[0]:.2f} + {c[1]:.2f}*x{i} + {c[2]:.2f}*x{i}*x{j} + {c[3]:.2f}*sin(x{k})"
    return E.parse_expr(s, dim)


def default_vector(dim, salt):
    rng = _coeff_rng(dim, salt)
    return F.vector_field([_poly(rng, dim, base=1.0 if mu == salt % dim else 0.0) for mu in range(dim)])


def default_multivector(dim, salt):
    rng = _coeff_rng(dim, salt)
    return F.multivector_field(dim, {A: _poly(rng, dim) for A in range(1 << dim)})


def default_scalar(dim, salt):
    rng = _coeff_rng(dim, salt)
    return F.scalar_field(dim, _poly(rng, dim, base=1.5))


def default_extensor(dim, salt):
    rng = _coeff_rng(dim, salt)
    return F.extensor_field([[_poly(rng, dim) for _ in range(dim)] for _ in range(dim)])


def dominant_extensor(dim, salt):
    """Diagonally dominant, hence non-singular everywhere."""
    rng = _coeff_rng(dim, salt)
    rows = []
    for i in range(dim):
        row = []
        for j in range(dim):
            k = int(rng.integers(0, dim)) + 1
            if i == j:
                row.append(E.parse_expr(f"2 + 0.5*sin(x{k})", dim))
            else:
                row.append(E.parse_expr(f"{0.3 / dim:.4f}*cos(x{k})", dim))
        rows.append(row)
    return F.extensor_field(rows)


VECTOR_NAMES = ("a", "b", "c", "d")
MV_NAMES = ("X", "Y")
FIELD_KINDS = {**{n: "mv" for n in VECTOR_NAMES + MV_NAMES}, "f": "scalar", "t": "tensor"}


# ----------------------------------------------------------------------------

class Workbench:
    """Everything a suite needs, built on first use from a scenario."""

    def __init__(self, scenario):
        self.sc = scenario
        self.dim = scenario.dim
        self.notes = []

    # fields ------------------------------------------------------------------
    def _user(self, name):
        kind = self.sc.fields.get(name)
        if kind is None:
            return None
        tag, data = kind
        if tag == "scalar":
            return F.scalar_field(self.dim, data)
        if tag == "mv":
            return F.multivector_field(self.dim, data)
        n = self.dim
        return F.extensor_field([[data.get((i, j), E.ZERO) for j in range(n)] for i in range(n)])

    @cached_property
    def fields(self):
        n = self.dim
        out = {}
        for salt, name in enumerate(VECTOR_NAMES):
            out[name] = self._user(name) or default_vector(n, salt)
        for salt, name in enumerate(MV_NAMES, start=10):
            out[name] = self._user(name) or default_multivector(n, salt)
        out["f"] = self._user("f") or default_scalar(n, 20)
        out["t"] = self._user("t") or default_extensor(n, 21)
        return out

    def __getattr__(self, name):
        if name in FIELD_KINDS:
            return self.fields[name]
        raise AttributeError(name)

    @cached_property
    def basis(self):
        return [F.basis_vector(self.dim, mu) for mu in range(self.dim)]

    @cached_property
    def deformer(self):
        return dominant_extensor(self.dim, 30)

    @cached_property
    def frame(self):
        return H.FramePair(dominant_extensor(self.dim, 31))

    # structures --------------------------------------------------------------
    @cached_property
    def g(self):
        sc = self.sc
        n = self.dim
        if not sc.metric:
            return M.MetricField.euclidean(n)
        rows = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                hit = sc.metric.get((i, j)) or sc.metric.get((j, i))
                rows[i][j] = hit[0] if hit else E.ZERO
        return M.MetricField.from_exprs(rows, sc.signature)

    @cached_property
    def lam(self):
        if not self.sc.metric:
            return C.ConnectionField.flat(self.dim)
        return self.g.levi_civita()

    @cached_property
    def conn(self):
        """The connection under study."""
        sc = self.sc
        n = self.dim
        if sc.gamma:
            entries = [[[sc.gamma.get((l, m, k), E.ZERO) for k in range(n)] for m in range(n)] for l in range(n)]
            return C.ConnectionField.from_exprs(n, entries, "table")
        if sc.contorsion:
            return self.g.compatible_connection(self._contorsion)
        return self.lam

    def _contorsion(self, a):
        n = self.dim
        total = None
        for mu, coeffs in sorted(self.sc.contorsion.items()):
            K = F.multivector_field(n, coeffs)
            term = K * a.dot(self.basis[mu])
            total = term if total is None else total + term
        return total

    @cached_property
    def struct(self):
        """Connection of the geometric structure (U, γ, g)."""
        sc = self.sc
        if sc.geometric or sc.contorsion or sc.levi_civita:
            return self.conn
        return self.lam

    @cached_property
    def symmetric(self):
        return self.conn.symmetrized()

    @cached_property
    def fact(self):
        return self.g.gauge_factor()

    @cached_property
    def chart_map(self):
        sc = self.sc
        if sc.chart_map:
            return CL.ChartMap(self.dim, [sc.chart_map[i] for i in range(self.dim)])
        return CL.ChartMap.identity(self.dim)


# ----------------------------------------------------------------------------
# helpers

dd = F.directional_derivative

PRODUCTS = {
    "wedge": lambda x, y: x ^ y,
    "dot": lambda x, y: x.dot(y),
    "left": lambda x, y: x << y,
    "right": lambda x, y: x >> y,
    "clifford": lambda x, y: x.gp(y),
}


def _metric_products(g):
    return {
        "wedge": lambda x, y: x ^ y,
        "dot": g.dot,
        "left": g.left,
        "right": g.right,
        "clifford": g.clifford,
    }


def _sum(terms):
    out = None
    for t in terms:
        out = t if out is None else out + t
    return out


def _frame_sum(lower, upper, n, fn):
    return _sum(fn(lower(mu), upper(mu)) for mu in range(n))


# ----------------------------------------------------------------------------
# suites

def suite_fields(w):
    """Canonical derivative, Lie bracket and ∂ₒ operators."""
    a, b, c, X, Y, t = w.a, w.b, w.c, w.X, w.Y, w.t
    n = w.dim
    out = []
    for name in ("wedge", "dot", "left", "clifford"):
        p = PRODUCTS[name]
        out.append(Check(f"leibniz[{name}]", None, dd(a, p(X, Y)), p(dd(a, X), Y) + p(X, dd(a, Y))))
    br = F.lie_bracket
    out.append(Check("jacobi", None, br(a, br(b, c)) + br(b, br(c, a)) + br(c, br(a, b)), None))
    out.append(Check("curl_curl", None, F.nabla_o(F.nabla_o(w.X * w.f, "curl"), "curl"), None, "second"))
    out.append(Check("div_div", None, F.nabla_o(F.nabla_o(w.X * w.f, "div"), "div"), None, "second"))
    out.append(Check("full_split", None, F.nabla_o(X, "full"), F.nabla_o(X, "div") + F.nabla_o(X, "curl")))
    out.append(Check("fd_oracle", None, _fd_oracle(w, X), None, "fd"))
    fp = w.frame
    for name in ("wedge", "clifford"):
        p = PRODUCTS[name]
        fid = _sum(p(w.basis[mu], t(w.basis[mu])) for mu in range(n))
        other = _frame_sum(fp.upper, fp.lower, n, lambda lo, up: p(lo, t(up)))
        out.append(Check(f"frame_independence[{name}]", None, fid, other, "algebraic"))
    two = lambda u, v: u.dot(c) * v.dot(b)
    fid = _sum((w.basis[m] ^ w.basis[k]) * two(w.basis[m], w.basis[k]) for m in range(n) for k in range(n))
    other = _sum((fp.upper(m) ^ fp.upper(k)) * two(fp.lower(m), fp.lower(k)) for m in range(n) for k in range(n))
    out.append(Check("frame_independence[pair]", None, fid, other, "algebraic"))
    out.append(Check("dummy_pair", None, fid, c ^ b, "algebraic"))
    return out


def _fd_oracle(w, X):
    """Directional derivatives along each b_mu against central differences."""
    n = w.dim
    d_fields = [F.partial(X, mu) for mu in range(n)]

    def evaluate(ctx):
        exact = np.stack([d.values(ctx) for d in d_fields], axis=1)
        approx = []
        for mu in range(n):
            step = np.zeros(n)
            step[mu] = FD_STEP
            hi = X.values(F.EvalContext(ctx.points + step))
            lo = X.values(F.EvalContext(ctx.points - step))
            approx.append((hi - lo) / (2 * FD_STEP))
        return exact, np.stack(approx, axis=1)

    return evaluate


def suite_covariant(w):
    """Covariant derivatives, connection operators and extensor derivatives."""
    cn = w.conn
    a, b, c, X, Y, f, t = w.a, w.b, w.c, w.X, w.Y, w.f, w.t
    out = [
        Check("CDM.2", "CDM.2", cn.plus(a, X.grade(2)).grade(2), cn.plus(a, X.grade(2))),
        Check("CDM.4a", "CDM.4a", cn.minus(a, f), dd(a, f)),
        Check("CDM.4c", "CDM.4c", cn.plus(a, X * f), X * dd(a, f) + cn.plus(a, X) * f),
        Check("CDM.5", "CDM.5", cn.minus(a, X ^ Y), (cn.minus(a, X) ^ Y) + (X ^ cn.minus(a, Y))),
        Check("CDM.6", "CDM.6", cn.plus(a, X).dot(Y) + X.dot(cn.minus(a, Y)), dd(a, X.dot(Y))),
        Check("CDM.8", "CDM.8", cn.zero(a, X), cn.zero_via_omega(a, X)),
        Check("CDM.9", "CDM.9", cn.zero(a, X).dot(Y) + X.dot(cn.zero(a, Y)), dd(a, X.dot(Y))),
    ]
    for name, p in PRODUCTS.items():
        out.append(Check(f"CDM.10[{name}]", "CDM.10", cn.zero(a, p(X, Y)),
                         p(cn.zero(a, X), Y) + p(X, cn.zero(a, Y))))
    for s in "+-":
        out.append(Check(f"CO.2c[{s}]", "CO.2c", cn.connection_operator(s, a * f, b),
                         cn.connection_operator(s, a, b) * f))
        out.append(Check(f"CO.2d[{s}]", "CO.2d", cn.connection_operator(s, a, b * f),
                         b * dd(a, f) + cn.connection_operator(s, a, b) * f))
    out.append(Check("CO.3", "CO.3", cn.connection_operator("+", a, b).dot(c) + b.dot(cn.connection_operator("-", a, c)),
                     dd(a, b.dot(c))))
    pair = cn.deform(w.deformer)
    out.append(Check("CDM.11", "CDM.11", pair.plus(a, X).dot(Y) + X.dot(pair.minus(a, Y)), dd(a, X.dot(Y))))
    out.append(Check("CDM.11[scalar]", "CDM.11", pair.plus(a, f), dd(a, f)))
    for s1, s in ("++", "+-", "-+", "--"):
        lhs = cn.extensor11_cov_deriv(t, s1 + s, a).T
        rhs = cn.extensor11_cov_deriv(t.T, s + s1, a)
        out.append(Check(f"CDE.3[{s1}{s}]", "CDE.3", lhs, rhs))
    for tag, signs in (("CDE.4a", "++"), ("CDE.4b", "+-"), ("CDE.4c", "--"), ("CDE.4d", "-+")):
        probe = cn.extensor_cov_deriv(t, signs, a, b, method="probe")
        closed = cn.extensor_cov_deriv(t, signs, a, b, method="closed")
        out.append(Check(tag, tag, probe, closed))
    return out


def suite_torsion(w):
    """Torsion and curvature in coefficient and operator form."""
    cn = w.conn
    a, b, c = w.a, w.b, w.c
    return [
        Check("TCF.1", "TCF.1a", cn.torsion(a, b), cn.torsion_operator_form(a, b)),
        Check("TCF.2", "TCF.2a", cn.curvature(a, b, c), cn.curvature_operator_form(a, b, c), "second"),
        Check("TCF.3", "TCF.3", cn.curvature(a, b, c), -cn.curvature(b, a, c)),
    ]


def suite_cartan(w):
    """Cartan fields, connection operators and both structure equations."""
    cn = w.conn
    a, b, c, d, f = w.a, w.b, w.c, w.d, w.f
    res1, res2 = cn.structure_equation_residuals(c, d)
    return [
        Check("CF.1a", "CF.1a", cn.torsion_from_theta(a, b), cn.torsion(a, b), "algebraic"),
        Check("CF.2a", "CF.2a", cn.curvature_from_omega(a, b, c), cn.curvature(a, b, c), "algebraic"),
        Check("CSE.3d", "CSE.3d", cn.cartan_connection_op("first", b, c * f), cn.cartan_connection_op("first", b, c) * f),
        Check("CSE.4c", "CSE.4c", cn.cartan_connection_op("second", b * f, c), cn.cartan_connection_op("second", b, c) * f),
        Check("CSE.5", "CSE.5", cn.cartan_connection_op("first", b, c) + cn.cartan_connection_op("second", b, c),
              F.nabla_o(b.dot(c).as_mv(), "full")),
        Check("FCE.1", "FCE.1", res1, None),
        Check("SCE.1", "SCE.1", res2, None),
    ]


def suite_bianchi(w):
    """Identities of symmetric connections (the table is symmetrized first)."""
    cn = w.symmetric
    a, b, c, d = w.a, w.b, w.c, w.d
    rho = cn.curvature
    cyc = rho(a, b, c) + rho(b, c, a) + rho(c, a, b)

    def bianchi(x, y, z):
        return cn.extensor_cov_deriv(rho, "+++-", x, y, z, c, method="closed")

    return [
        Check("SPS.3", "SPS.3", cn.torsion(a, b), None),
        Check("SPS.4", "SPS.4", cyc, None),
        Check("SPS.5", "SPS.5", bianchi(d, a, b) + bianchi(a, b, d) + bianchi(b, d, a), None, "second"),
    ]


def suite_levi_civita(w):
    """Christoffel operators and the Levi-Civita decomposition."""
    g, lam = w.g, w.lam
    a, b, c, f, X = w.a, w.b, w.c, w.f, w.X
    a2, b2, c2 = w.d, w.c, w.a
    ch = g.christoffel_first
    br = F.lie_bracket
    gdot = g.dot
    out = [
        Check("CHO.3a", "CHO.3a", ch(a + a2, b, c), ch(a, b, c) + ch(a2, b, c)),
        Check("CHO.3b", "CHO.3b", ch(a * f, b, c), ch(a, b, c) * f),
        Check("CHO.3c", "CHO.3c", ch(a, b + b2, c), ch(a, b, c) + ch(a, b2, c)),
        Check("CHO.3d", "CHO.3d", ch(a, b * f, c), ch(a, b, c) * f + dd(a, f) * gdot(b, c)),
        Check("CHO.3e", "CHO.3e", ch(a, b, c + c2), ch(a, b, c) + ch(a, b, c2)),
        Check("CHO.3f", "CHO.3f", ch(a, b, c * f), ch(a, b, c) * f),
        Check("CHO.4a", "CHO.4a", ch(a, b, c) + ch(b, a, c),
              dd(a, gdot(b, c)) + dd(b, gdot(c, a)) - dd(c, gdot(a, b)) + gdot(b, br(c, a)) - gdot(a, br(b, c))),
        Check("CHO.4b", "CHO.4b", ch(a, b, c) - ch(b, a, c), gdot(c, br(a, b))),
        Check("CHO.4c", "CHO.4c", ch(a, b, c) + ch(a, c, b), dd(a, gdot(b, c))),
        Check("CHO.4d", "CHO.4d", ch(a, b, c) - ch(a, c, b),
              dd(b, gdot(c, a)) - dd(c, gdot(a, b)) + gdot(c, br(a, b)) + gdot(b, br(c, a)) - gdot(a, br(b, c))),
        Check("CHO.4e", "CHO.4e", ch(a, b, c) + ch(c, b, a),
              dd(b, gdot(c, a)) + gdot(c, br(a, b)) - gdot(a, br(b, c))),
        Check("CHO.4f", "CHO.4f", ch(a, b, c) - ch(c, b, a),
              dd(a, gdot(b, c)) - dd(c, gdot(a, b)) + gdot(b, br(c, a))),
        Check("CHO.2", "CHO.2", g.christoffel_second(c, a, b), ch(a, b, g.inv(c))),
    ]
    w0 = g.omega_zero
    cyc = lambda x, y, z: gdot(g.cross(w0(x), y), z)
    out += [
        Check("LCC.1", "LCC.1", ch(a, b, c), gdot(dd(a, b) + g.lambda_sym(a)(b) + g.cross(w0(a), b), c)),
        Check("LCC.3a", "LCC.3a", cyc(a, b, c) + cyc(b, c, a) + cyc(c, a, b), None),
        Check("LCC.3a3", "LCC.3a3", lam.plus(a, b).dot(c), g.christoffel_second(c, a, b)),
        Check("LCC.3b", "LCC.3b", w0(a), g.biv_g(lam.gamma_a(a)) * 0.5),
        Check("LCC.3c", "LCC.3c", lam.gamma(a, b), lam.gamma(b, a)),
    ]
    sym, skew = g.levi_civita_split(a)
    out += [
        Check("LCC.3d", "LCC.3d", sym(b), g.lambda_sym(a)(b), "algebraic"),
        Check("LCC.3f", "LCC.3f", skew(b), g.cross(w0(a), b), "algebraic"),
        Check("LCC.4", "LCC.4", lam.generalized(a, X), g.generalized_lambda(a, X)),
        Check("christoffel_table", "A1", lam.table, g.christoffel_table()),
    ]
    return out


def suite_compatibility(w):
    """Metric compatibility and the compatible split of the structure connection."""
    g, cn = w.g, w.struct
    a, b, c, X, Y = w.a, w.b, w.c, w.X, w.Y
    ga = cn.gamma_a(a)
    gi = g.inverse_metric()
    out = [
        Check("MCD.1", "MCD.1", g.d(a), g.G @ ga + ga.T @ g.G),
        Check("MCD.1a", "MCD.1a", g.inverse_compatibility_residual(cn, a), None),
        Check("MCD.2", "MCD.2", cn.minus(a, g.ext(b ^ c)), g.ext(cn.plus(a, b ^ c))),
        Check("MCD.3", "MCD.3", cn.minus(a, g.ext(X)), g.ext(cn.plus(a, X))),
        Check("MCD.2a", "MCD.2a", cn.plus(a, g.ext_inv(X)), g.ext_inv(cn.minus(a, X))),
        Check("MCD.4", "MCD.4", dd(a, g.dot(X, Y)), g.dot(cn.plus(a, X), Y) + g.dot(X, cn.plus(a, Y))),
        Check("MCD.4b", "MCD.4b", dd(a, gi.dot(X, Y)), gi.dot(cn.minus(a, X), Y) + gi.dot(X, cn.minus(a, Y))),
    ]
    for name, p in _metric_products(g).items():
        out.append(Check(f"MCD.5[{name}]", "MCD.5", cn.plus(a, p(X, Y)), p(cn.plus(a, X), Y) + p(X, cn.plus(a, Y))))
    for name, p in _metric_products(gi).items():
        out.append(Check(f"MCD.5a[{name}]", "MCD.5a", cn.minus(a, p(X, Y)), p(cn.minus(a, X), Y) + p(X, cn.minus(a, Y))))
    sym = (ga + g.inv @ ga.T @ g.G) * 0.5
    out += [
        Check("GS.1", "GS.1", sym, g.lambda_sym(a)),
        Check("GS.1a", "GS.1a", cn.gamma(a, b), g.lambda_sym(a)(b) + g.cross(g.compatible_omega(cn, a), b)),
    ]
    return out


def suite_gauge(w):
    """Gauge metric factorization and the deformation to an eta-compatible pair."""
    g, cn, fact = w.g, w.struct, w.fact
    a, X = w.a, w.X
    pair = M.deform_compatible_pair(cn, fact)
    h_ext = fact.h.extend()
    hs_ext = fact.h_star.extend()
    back = C.DeformedPair(pair, fact.h_inv)
    return [
        Check("MCD.6", "MCD.6", fact.h.T @ fact.eta @ fact.h, g.G, "algebraic"),
        Check("MCD.7a", "MCD.7a", h_ext(cn.plus(a, X)), pair.plus(a, h_ext(X))),
        Check("MCD.7b", "MCD.7b", hs_ext(cn.minus(a, X)), pair.minus(a, hs_ext(X))),
        Check("eta_compat", "MCD.7", pair.extensor11_cov_deriv(fact.eta, "++", a), None),
        Check("eta_pairing", "MCD.7", pair.plus(a, X).dot(w.Y) + X.dot(pair.minus(a, w.Y)), dd(a, X.dot(w.Y))),
        Check("round_trip[+]", "MCD.7", back.plus(a, X), cn.plus(a, X)),
        Check("round_trip[-]", "MCD.7", back.minus(a, X), cn.minus(a, X)),
    ]


def suite_hodge(w):
    """Volume pseudoscalars, Hodge stars, duality and ordinary coderivatives."""
    g = w.g
    n = w.dim
    q = g.signature[1]
    a, X, f = w.a, w.X, w.f
    fp = w.frame
    vol = H.VolumeField(fp)
    tau = vol.tau
    flip = np.eye(n)
    flip[0, 0] = -1.0
    vol_flip = H.VolumeField(H.FramePair(F.ConstField(n, flip) @ fp.eps))
    one = F.constant(mv.Multivector.scalar(n))
    I = F.basis_blade(n, (1 << n) - 1) * f
    gvol = H.VolumeField(g=g)
    tg = gvol.tau_g
    gi = g.inverse_metric()
    st = H.HodgeStar(n)
    sg = H.HodgeStar(n, g)
    out = [
        Check("OHD.2a", "OHD.2a", tau.dot(tau), F.constant_like(f, 1.0), "exact"),
        Check("OHD.2b", "OHD.2b", I, tau * I.dot(tau), "algebraic"),
        Check("OHD.5", "OHD.5", fp.reciprocity_residual(), None, "algebraic"),
        Check("OHD.6[+]", "OHD.6", tau, vol.sign_form(), "algebraic"),
        Check("OHD.6[-]", "OHD.6", vol_flip.tau, vol_flip.sign_form(), "algebraic"),
        Check("OHD.6a", "OHD.6a", dd(a, tau), None, "algebraic"),
        Check("OHD.6b", "OHD.6b", dd(a, tau.gp(X)), tau.gp(dd(a, X)), "algebraic"),
        Check("OHD.7a", "OHD.7a", gi.dot(tg, tg), F.constant_like(f, (-1.0) ** q), "exact"),
        Check("OHD.7a[clifford]", "OHD.7a", gi.clifford(tg, tg.reverse()), one * (-1.0) ** q, "algebraic"),
        Check("OHD.7b", "OHD.7b", I, tg * gi.dot(I, tg) * (-1.0) ** q, "algebraic"),
        Check("OHD.8a", "OHD.8a", st.inverse(st(X)), X, "algebraic"),
        Check("OHD.8b", "OHD.8b", dd(a, st(X)), st(dd(a, X)), "algebraic"),
        Check("OHD.9", "OHD.9", sg(X), sg.via_metric_products(X), "algebraic"),
        Check("OHD.9a", "OHD.9a", sg.inverse(sg(X)), X, "algebraic"),
        Check("OHD.9a[products]", "OHD.9a", sg.inverse(X), sg.inverse_via_metric_products(X), "algebraic"),
    ]
    for tag, res in H.duality_residuals(X, g).items():
        out.append(Check(tag, tag, res, None))
    out += [
        Check("OHO.1a", "OHO.1a", H.delta_ordinary(X), -H.div(X)),
        Check("OHO.2a", "OHO.2a", H.delta_ordinary(X, g), H.delta_closed_form(X, g)),
    ]
    return out


def suite_lc_derivatives(w):
    """Levi-Civita divergence, curl and gradient operators."""
    g, lam = w.g, w.lam
    b, X, Y = w.b, w.X, w.Y
    out = [Check(tag, tag, res, None) for tag, res in H.levi_civita_structure_residuals(g, b, X, lam).items()]
    op = lambda which, Z: H.levi_civita_derivative(g, which, Z, lam)
    closed = H.levi_civita_closed_forms(g, X)
    out += [
        Check("LCD.1a", "LCD.1a", op("div_plus", X), closed["div_plus"]),
        Check("LCD.3", "LCD.3", op("grad_minus", X), op("div_minus_g", X) + op("curl_minus", X)),
        Check("LCD.4a", "LCD.4a", op("div_minus_g", X), g.ext(op("div_plus", g.ext_inv(X)))),
        Check("LCD.4b", "LCD.4b", op("div_minus_g", X), closed["div_minus_g"]),
        Check("LCD.4b1", "LCD.4b1", op("div_minus_g", op("div_minus_g", X)), None, "second"),
        Check("LCD.4b2", "LCD.4b2", op("div_minus_g", X), -H.delta_ordinary(X, g)),
        Check("LCD.5", "LCD.5", op("curl_minus", X), closed["curl_minus"]),
    ]
    for tag, res in H.lagrangian_identities(g, X, Y, lam).items():
        out.append(Check(tag, tag, res, None))
    return out


def suite_gauge_derivatives(w):
    """Levi-Civita derivatives moved to the orthonormal gauge."""
    gd = H.GaugeDerivatives(w.fact, w.lam)
    a, b, c, X = w.a, w.b, w.c, w.X
    closed = gd.closed_forms(X)
    out = [
        Check("GD.2", "GD.2", gd.pairing_residual(a, b, c), None),
        Check("GD.3", "GD.3", gd.plus(a, X), gd.plus_via_omega0(a, X)),
        Check("GD.1b", "GD.1b", gd.eta_relation_residual(a, X), None),
        Check("GD.6", "GD.6", gd.bulk("grad", X), gd.bulk("div", X) + gd.bulk("curl", X)),
    ]
    for tag, res in gd.golden_residuals(X).items():
        out.append(Check(tag, tag, res, None))
    out += [
        Check("GD.8a", "GD.8a", gd.bulk("div", X), closed["div"]),
        Check("GD.8b", "GD.8b", gd.bulk("curl", X), closed["curl"]),
    ]
    return out


def suite_covariant_hodge(w):
    """Covariant Hodge coderivative of the geometric structure."""
    ch = H.CovariantHodge(w.struct, w.g)
    return [Check(tag, tag.split("[")[0], res, None) for tag, res in ch.residuals(w.a, w.X).items()]


def suite_flatness(w):
    """Vanishing curvature of a connection declared flat."""
    cn = w.conn
    return [
        Check("curvature", "TCF.2b", cn.curvature(w.a, w.b, w.c), None),
        Check("cartan_curvature", "CF.2", cn.cartan_omega(w.c, w.d), None),
    ]


def suite_classic(w):
    """Index-notation bridge under the scenario chart map."""
    cn, lam, cm = w.conn, w.lam, w.chart_map
    a, t = w.a, w.t
    sym_lam = CL.ClassicalSymbols(lam)
    cov, con = CL.component_transforms(a, cm)
    comp = CL.ComponentDerivatives(cn, cm)
    up, lo = comp.vector_residuals(a)
    r_cov, r_mix = comp.tensor_residuals(t)
    return [
        Check("A1", "A1", CL.ClassicalSymbols(cn).table(), cn.table, "algebraic"),
        Check("A1[symmetry]", "A1", sym_lam.lower_asymmetry(), None, "algebraic"),
        Check("A3", "A3", CL.transformation_residual(cn, cm), None),
        Check("A8", "A8", cov, None, "algebraic"),
        Check("A9", "A9", con, None, "algebraic"),
        Check("A10", "A10", up, None),
        Check("A11", "A11", lo, None),
        Check("A24", "A24", r_cov, None),
        Check("A25", "A25", r_mix, None),
    ]


# name -> (builder, needs_metric_validation)
SUITES = {
    "fields": (suite_fields, False),
    "covariant": (suite_covariant, False),
    "torsion": (suite_torsion, False),
    "cartan": (suite_cartan, False),
    "bianchi": (suite_bianchi, False),
    "levi_civita": (suite_levi_civita, True),
    "compatibility": (suite_compatibility, True),
    "gauge": (suite_gauge, True),
    "hodge": (suite_hodge, True),
    "lc_derivatives": (suite_lc_derivatives, True),
    "gauge_derivatives": (suite_gauge_derivatives, True),
    "covariant_hodge": (suite_covariant_hodge, True),
    "flatness": (suite_flatness, False),
    "classic": (suite_classic, True),
}


def applicable(scenario):
    """Suites that ``run = all`` expands to for this scenario."""
    return [s for s in SUITES if s != "flatness" or scenario.flat]
