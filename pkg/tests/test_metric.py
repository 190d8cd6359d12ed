import numpy as np
import pytest
from hypothesis import given, strategies as st

from extcalc import connection as C
from extcalc import fields as F
from extcalc import metric as Mt
from extcalc.multivector import Multivector as M

from helpers import (METRICS, lorentz_metric, mv_field, points, polar_metric, random_metric, residual,
                     scalar, sphere_metric, vec)

PT = (2.0, 0.3)
TOL = 1e-9
seeds = st.integers(0, 2**32 - 1)


polar, sphere, lorentz = polar_metric, sphere_metric, lorentz_metric


def b(n, mu):
    return F.basis_vector(n, mu)


class TestPolarValues:
    """Values of the polar metric diag(1, x1^2) evaluated by hand at (2, 0.3)."""

    g = polar()

    def test_det_and_product(self):
        assert self.g.det.at(PT) == pytest.approx(4.0, abs=1e-14)
        assert self.g.dot(b(2, 1), b(2, 1)).at(PT) == pytest.approx(4.0, abs=1e-14)

    def test_christoffel_first(self):
        ch = self.g.christoffel_first
        assert ch(b(2, 0), b(2, 1), b(2, 1)).at(PT) == pytest.approx(2.0, abs=1e-14)
        assert ch(b(2, 1), b(2, 1), b(2, 0)).at(PT) == pytest.approx(-2.0, abs=1e-14)

    def test_christoffel_second(self):
        assert self.g.christoffel_second(b(2, 1), b(2, 0), b(2, 1)).at(PT) == pytest.approx(0.5, abs=1e-14)

    def test_classical_table(self):
        T = self.g.christoffel_table().at(PT)
        assert T[1, 0, 1] == pytest.approx(0.5, abs=1e-14)
        assert T[1, 1, 0] == pytest.approx(0.5, abs=1e-14)
        assert T[0, 1, 1] == pytest.approx(-2.0, abs=1e-14)
        assert abs(T[0, 0, 0]) + abs(T[1, 1, 1]) + abs(T[0, 0, 1]) == 0.0

    def test_omega_zero(self):
        assert (self.g.omega_zero(b(2, 1)).at(PT) - M.blade(2, "e12", -0.5)).norm_inf() < 1e-14
        assert self.g.omega_zero(b(2, 0)).at(PT).norm_inf() < 1e-14

    def test_gauge_factor(self):
        fact = self.g.gauge_factor()
        assert np.allclose(fact.h.at(PT).matrix, np.diag([1.0, 2.0]), atol=1e-14)
        assert np.array_equal(fact.eta_matrix, np.eye(2))

    def test_levi_civita_pairing(self):
        lam = self.g.levi_civita()
        val = lam.plus(b(2, 0), b(2, 1)).dot(b(2, 1)).at(PT)
        assert val == pytest.approx(0.5, abs=1e-14)

    def test_closed_values_at_samples(self):
        p = F.Chart([(0.5, 3), (0.1, 1.4)]).sample_points(10, 42)
        ctx = F.EvalContext(p)
        ch = self.g.christoffel_first(b(2, 0), b(2, 1), b(2, 1)).values(ctx)
        ch2 = self.g.christoffel_second(b(2, 1), b(2, 0), b(2, 1)).values(ctx)
        T = self.g.christoffel_table().values(ctx)
        x1 = p[:, 0]
        assert np.max(np.abs(ch - x1)) < 1e-10
        assert np.max(np.abs(ch2 - 1 / x1)) < 1e-10
        assert np.max(np.abs(T[:, 0, 1, 1] + x1)) < 1e-10


class TestSphereValues:
    def test_classical_symbols(self):
        p = F.Chart([(0.3, 2.8), (-1, 1)]).sample_points(10, 1)
        T = sphere().christoffel_table().values(F.EvalContext(p))
        th = p[:, 0]
        assert np.max(np.abs(T[:, 0, 1, 1] + np.sin(th) * np.cos(th))) < 1e-12
        assert np.max(np.abs(T[:, 1, 0, 1] - np.cos(th) / np.sin(th))) < 1e-12


class TestValidation:
    def test_signature_mismatch(self):
        g = Mt.MetricField.from_exprs([["1", "0"], [None, "-1"]], (2, 0))
        with pytest.raises(Mt.SignatureError):
            g.validate(F.EvalContext(points(2)))

    def test_degenerate(self):
        g = Mt.MetricField.from_exprs([["1", "0"], [None, "x1^2"]], (2, 0))
        with pytest.raises(Mt.MetricError):
            g.validate(F.EvalContext([[0.0, 0.5]]))

    def test_signature_change_in_gauge_factor(self):
        g = Mt.MetricField.from_exprs([["1", "0"], [None, "x1"]], (2, 0))
        with pytest.raises(Mt.SignatureError):
            g.gauge_factor().h.values(F.EvalContext([[0.5, 0.0], [-0.5, 0.0]]))

    def test_minkowski_factor(self):
        g = Mt.MetricField.from_exprs([["1", "0"], [None, "-1"]], (1, 1))
        fact = g.gauge_factor()
        assert np.allclose(fact.h.at((0.1, 0.2)).matrix, np.eye(2))
        assert np.array_equal(fact.eta_matrix, np.diag([1.0, -1.0]))

    def test_euclidean_is_canonical(self):
        rng = np.random.default_rng(0)
        g = Mt.MetricField.euclidean(3)
        X, Y = mv_field(rng, 3), mv_field(rng, 3)
        p = points(3)
        assert residual(g.dot(X, Y), X.dot(Y), p) < 1e-14
        assert residual(g.left(X, Y), X << Y, p) < 1e-14
        assert residual(g.clifford(X, Y), X.gp(Y), p) < 1e-14
        lam = g.levi_civita()
        assert residual(lam.table, None, p) == 0.0


def _setup(name, seed):
    make, box = METRICS[name]
    g = make()
    n = g.dim
    rng = np.random.default_rng(seed)
    return g, n, rng, points(n, 6, seed % 97, box)


class TestMetricIdentities:
    @given(st.sampled_from(sorted(METRICS)), seeds)
    def test_clifford_axioms(self, name, seed):
        g, n, rng, p = _setup(name, seed)
        v, X = vec(rng, n), mv_field(rng, n)
        assert residual(g.clifford(v, X), g.left(v, X) + (v ^ X), p) < 1e-12
        assert residual(g.clifford(X, v), g.right(X, v) + (X ^ v), p) < 1e-12
        f = scalar(rng, n).as_mv()
        assert residual(g.clifford(f, X), f.gp(X), p) < 1e-12

    @given(st.sampled_from(sorted(METRICS)), seeds)
    def test_levi_civita_structure(self, name, seed):
        g, n, rng, p = _setup(name, seed)
        lam = g.levi_civita()
        a, u, c = vec(rng, n), vec(rng, n), vec(rng, n)
        dd = F.directional_derivative
        assert residual(lam.gamma(a, u), lam.gamma(u, a), p) < TOL
        assert residual(lam.torsion(a, u), None, p) < TOL
        lhs = g.christoffel_first(a, u, c)
        rhs = g.dot(dd(a, u) + g.lambda_sym(a)(u) + g.cross(g.omega_zero(a), u), c)
        assert residual(lhs, rhs, p) < TOL
        assert residual(lam.plus(a, u).dot(c), g.christoffel_second(c, a, u), p) < TOL
        cyc = lambda x, y, z: g.dot(g.cross(g.omega_zero(x), y), z)
        assert residual(cyc(a, u, c) + cyc(u, c, a) + cyc(c, a, u), None, p) < TOL

    @given(st.sampled_from(sorted(METRICS)), seeds)
    def test_compatibility(self, name, seed):
        g, n, rng, p = _setup(name, seed)
        lam = g.levi_civita()
        a = vec(rng, n)
        assert residual(g.compatibility_residual(lam, a), None, p) < TOL
        assert residual(g.inverse_compatibility_residual(lam, a), None, p) < TOL
        flat = C.ConnectionField.flat(n)
        assert residual(g.compatibility_residual(flat, a), g.d(a), p) < 1e-14
        assert residual(g.compatible_omega(lam, a), g.omega_zero(a), p) < TOL

    @given(st.sampled_from(sorted(METRICS)), seeds)
    def test_ricci_rules(self, name, seed):
        g, n, rng, p = _setup(name, seed)
        lam = g.levi_civita()
        gi = g.inverse_metric()
        a, X, Y = vec(rng, n), mv_field(rng, n), mv_field(rng, n)
        dd = F.directional_derivative
        assert residual(dd(a, g.dot(X, Y)), g.dot(lam.plus(a, X), Y) + g.dot(X, lam.plus(a, Y)), p) < TOL
        assert residual(dd(a, gi.dot(X, Y)), gi.dot(lam.minus(a, X), Y) + gi.dot(X, lam.minus(a, Y)), p) < TOL
        for which in ("left", "clifford"):
            lhs = lam.plus(a, g.product(which, X, Y))
            rhs = g.product(which, lam.plus(a, X), Y) + g.product(which, X, lam.plus(a, Y))
            assert residual(lhs, rhs, p) < TOL

    @given(st.integers(2, 3), seeds)
    def test_contorted_connection_is_compatible(self, n, seed):
        rng = np.random.default_rng(seed)
        g = random_metric(rng, n)
        K = [mv_field(rng, n, [2]) for _ in range(n)]
        conn = g.compatible_connection(lambda a: F.dummy_sum(n, lambda mu: K[mu] * a.vcomp(mu)))
        a, u = vec(rng, n), vec(rng, n)
        p = points(n, 6)
        assert residual(g.compatibility_residual(conn, a), None, p) < TOL
        assert residual(g.compatible_split_residual(conn, a, u), None, p) < TOL

    def test_compatible_split_on_identity_metric(self):
        g = Mt.MetricField.euclidean(3)
        B = M.random(3, np.random.default_rng(4), grades=[2])
        conn = g.compatible_connection(lambda a: F.constant(B) * a.vcomp(0))
        p = points(3, 4)
        got = g.compatible_omega(conn, b(3, 0))
        assert residual(got, F.constant(B), p) < 1e-12
        assert residual(g.compatible_omega(conn, b(3, 1)), None, p) < 1e-12


class TestGaugeFactorization:
    @given(st.sampled_from(sorted(METRICS)), seeds)
    def test_factorization_and_deformation(self, name, seed):
        g, n, rng, p = _setup(name, seed)
        fact = g.gauge_factor()
        lam = g.levi_civita()
        a, X, Y = vec(rng, n), mv_field(rng, n), mv_field(rng, n)
        assert residual(fact.residual(), None, p) < TOL
        pair = Mt.deform_compatible_pair(lam, fact)
        assert residual(fact.h.extend()(lam.plus(a, X)), pair.plus(a, fact.h.extend()(X)), p) < TOL
        assert residual(fact.h_star.extend()(lam.minus(a, X)), pair.minus(a, fact.h_star.extend()(X)), p) < TOL
        assert residual(pair.extensor11_cov_deriv(fact.eta, "++", a), None, p) < TOL
        back = C.DeformedPair(pair, fact.h_inv)
        assert residual(back.plus(a, X), lam.plus(a, X), p) < TOL

    @given(st.integers(2, 4), seeds)
    def test_random_metric_factor_derivatives(self, n, seed):
        rng = np.random.default_rng(seed)
        g = random_metric(rng, n)
        fact = g.gauge_factor()
        p = points(n, 5)
        res = fact.residual()
        assert residual(res, None, p) < TOL
        for mu in range(n):
            assert residual(F.partial(res, mu), None, p) < TOL

    def test_constant_eta_metric_unchanged(self):
        g = Mt.MetricField.from_exprs([["1", "0"], [None, "-1"]], (1, 1))
        rng = np.random.default_rng(6)
        lam = g.levi_civita()
        pair = Mt.deform_compatible_pair(lam, g.gauge_factor())
        a, X = vec(rng, 2), mv_field(rng, 2)
        assert residual(pair.plus(a, X), lam.plus(a, X), points(2)) < 1e-14
