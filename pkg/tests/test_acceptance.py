"""Acceptance criteria, one test each; a PASS/FAIL line per criterion is printed and summarized."""
import contextlib
import json
import sys
import time

import numpy as np
import pytest

from extcalc import fields as F
from extcalc.extensor import Extensor11, sym_skew_split
from extcalc.multivector import Multivector as M

from helpers import polar_metric

RNG_SEED = 20240601


def rel(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = 1.0 + max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0))
    return float(np.max(np.abs(a - b), initial=0.0)) / scale


class Criterion:
    """Collects (label, value, bound) measurements; passes when every value is under its bound."""

    def __init__(self, number, title):
        self.number, self.title = number, title
        self.items = []
        self.unmet = []
        self.required = 0

    def measure(self, label, value, bound):
        self.items.append((label, float(value), bound))

    def require(self, label, ok):
        self.required += 1
        if not ok:
            self.unmet.append(label)

    def failures(self):
        return [(l, v, b) for l, v, b in self.items if not v < b] + [(l, np.nan, "met") for l in self.unmet]

    def line(self, error=None):
        bad = self.failures()
        ok = error is None and not bad and (self.items or self.required)
        if error is not None:
            detail = f"error {error}"
        elif bad:
            detail = "; ".join(f"{l} = {v:.3e} (bound {b})" for l, v, b in bad[:4])
        else:
            worst = max(self.items, key=lambda it: it[1] / it[2])
            detail = f"{len(self.items)} measurements, tightest {worst[0]} = {worst[1]:.3e} (bound {worst[2]:g})"
            if self.required:
                detail += f", {self.required} requirements met"
        return f"{'PASS' if ok else 'FAIL'} criterion {self.number}: {self.title}: {detail}"


@pytest.fixture
def criterion(acceptance_log):
    opened = []

    @contextlib.contextmanager
    def run(number, title):
        c = Criterion(number, title)
        opened.append(c)
        try:
            yield c
        except Exception as err:
            acceptance_log.append(c.line(error=f"{type(err).__name__}: {err}"))
            print(acceptance_log[-1])
            raise
        acceptance_log.append(c.line())
        print(acceptance_log[-1])
        assert c.items or c.required, "no measurements"
        assert not c.failures(), acceptance_log[-1]

    return run


@pytest.fixture(scope="module")
def reports(corpus_run):
    return {name: json.loads(data) for name, (_, _, data) in corpus_run.items()}


def check_ids(c, reports, scenarios, ids, bound, label_prefix=""):
    """Measure the worst residual of every check whose id or equation tag is in ``ids``."""
    for name in scenarios:
        rows = reports[name]["suites"]
        for want in ids:
            hits = [r for r in rows if r["id"] == want or r["id"].startswith(want + "[") or r["eq"] == want]
            if not hits:
                c.measure(f"{name}:{want} (missing)", np.inf, bound)
                continue
            worst = max(np.inf if r["max_residual"] is None else r["max_residual"] for r in hits)
            c.measure(f"{label_prefix}{name}:{want}", worst, bound)
            for r in hits:
                assert r["points"] == 64


def test_criterion_1_algebra(criterion):
    with criterion(1, "multivector algebra on n = 2..5") as c:
        rng = np.random.default_rng(RNG_SEED)
        t0 = time.perf_counter()
        worst = {"associativity": 0.0, "wedge commutation": 0.0, "contraction duality": 0.0, "involutions": 0.0}
        for n in (2, 3, 4, 5):
            for _ in range(200):
                X, Y, Z = (M.random(n, rng) for _ in range(3))
                worst["associativity"] = max(worst["associativity"],
                                             rel(((X * Y) * Z).coeffs, (X * (Y * Z)).coeffs),
                                             rel(((X ^ Y) ^ Z).coeffs, (X ^ (Y ^ Z)).coeffs))
                swapped = M(n)
                for r in range(n + 1):
                    for s in range(n + 1):
                        swapped = swapped + (Y.grade(s) ^ X.grade(r)) * (-1) ** (r * s)
                worst["wedge commutation"] = max(worst["wedge commutation"], rel((X ^ Y).coeffs, swapped.coeffs))
                worst["contraction duality"] = max(worst["contraction duality"],
                                                   rel((X << Y).dot(Z), Y.dot(X.reverse() ^ Z)),
                                                   rel((Z >> X).dot(Y), Z.dot(Y ^ X.reverse())))
                inv = max(rel(X.reverse().reverse().coeffs, X.coeffs),
                          rel(X.involute().involute().coeffs, X.coeffs),
                          rel(X.conjugate().coeffs, X.involute().reverse().coeffs),
                          rel(X.reverse().involute().coeffs, X.involute().reverse().coeffs))
                worst["involutions"] = max(worst["involutions"], inv)
        elapsed = time.perf_counter() - t0
        for label, value in worst.items():
            c.measure(label, value, 1e-12)
        c.measure("runtime [s]", elapsed, 5.0)


PRODUCTS = {
    "wedge": lambda x, y: x ^ y,
    "scalar": lambda x, y: M.scalar(x.dim, x.dot(y)),
    "left": lambda x, y: x << y,
    "right": lambda x, y: x >> y,
    "clifford": lambda x, y: x * y,
}


def test_criterion_2_generalization(criterion):
    with criterion(2, "generalized extensor properties, 50 pairs per n <= 4") as c:
        rng = np.random.default_rng(RNG_SEED + 1)
        worst = {}

        def bump(key, value):
            worst[key] = max(worst.get(key, 0.0), value)

        for n in (1, 2, 3, 4):
            for _ in range(50):
                t = Extensor11(rng.standard_normal((n, n)))
                X, Y = M.random(n, rng), M.random(n, rng)
                tX = t.generalize(X)
                for k in range(n + 1):
                    out = t.generalize(X.grade(k))
                    bump("grade preservation", rel(out.coeffs, out.grade(k).coeffs))
                for which in ("grade_involution", "reverse", "conjugate"):
                    bump("involution commutation",
                         rel(t.generalize(X.involution(which)).coeffs, tX.involution(which).coeffs))
                bump("adjoint of generalized", rel(t.adjoint().generalize(X).dot(Y), X.dot(t.generalize(Y))))
                _, skew = sym_skew_split(t)
                sX = skew.generalize(X)
                bump("skew factorization", rel(sX.coeffs, (t.biv() * 0.5).cross(X).coeffs))
                for name, p in PRODUCTS.items():
                    lhs = skew.generalize(p(X, Y))
                    rhs = p(sX, Y) + p(X, skew.generalize(Y))
                    bump(f"skew Leibniz [{name}]", rel(lhs.coeffs, rhs.coeffs))
        for label, value in worst.items():
            c.measure(label, value, 1e-10)


def test_criterion_3_covariant_core(criterion, reports):
    with criterion(3, "covariant derivative core on toy-torsion and polar") as c:
        check_ids(c, reports, ("toy-torsion", "polar"),
                  ("CDM.6", "CDM.9", "CDM.10", "CO.2c", "CO.2d", "CO.3", "CDM.11"), 1e-9)


def test_criterion_4_cartan(criterion, reports):
    with criterion(4, "Cartan structure equations, round trips and Bianchi") as c:
        lc = ("polar", "sphere-patch", "lorentz", "flat-euclidean")
        check_ids(c, reports, ("toy-torsion",) + lc, ("FCE.1", "SCE.1"), 1e-9)
        check_ids(c, reports, ("toy-torsion",) + lc, ("CF.1a", "CF.2a"), 1e-10)
        check_ids(c, reports, ("toy-torsion",) + lc, ("SPS.4",), 1e-8)
        check_ids(c, reports, ("toy-torsion",) + lc, ("SPS.5",), 1e-7)


def test_criterion_5_metric(criterion, reports):
    with criterion(5, "Levi-Civita decomposition and Christoffel closed values") as c:
        check_ids(c, reports, ("polar", "sphere-patch"), ("LCC.1", "LCC.3a", "LCC.3c", "LCC.4"), 1e-9)
        g = polar_metric()
        p = F.Chart([(0.5, 3), (0.1, 1.4)]).sample_points(10, 42)
        ctx = F.EvalContext(p)
        b1, b2 = F.basis_vector(2, 0), F.basis_vector(2, 1)
        x1 = p[:, 0]
        c.measure("[b1,b2,b2] - x1", np.max(np.abs(g.christoffel_first(b1, b2, b2).values(ctx) - x1)), 1e-10)
        c.measure("{b2;b1,b2} - 1/x1", np.max(np.abs(g.christoffel_second(b2, b1, b2).values(ctx) - 1 / x1)), 1e-10)
        T = g.christoffel_table().values(ctx)
        c.measure("Gamma^1_22 + x1", np.max(np.abs(T[:, 0, 1, 1] + x1)), 1e-10)


def test_criterion_6_compatibility(criterion, reports):
    with criterion(6, "compatibility, gauge factorization and deformation on polar and lorentz") as c:
        check_ids(c, reports, ("polar", "lorentz"),
                  ("MCD.1", "MCD.6", "MCD.7a", "MCD.7b", "eta_compat", "eta_pairing", "round_trip"), 1e-9)


def test_criterion_7_hodge(criterion, reports):
    with criterion(7, "Hodge layer, coderivatives and covariant Hodge on polar and sphere-patch") as c:
        check_ids(c, reports, ("polar", "sphere-patch", "lorentz", "flat-euclidean"), ("OHD.2a", "OHD.7a"), 1e-12)
        check_ids(c, reports, ("polar", "sphere-patch"),
                  ("DI.1", "DI.2", "HDI.1", "HDI.2", "OHO.1a", "LCD.1a", "LCD.4b1", "LCD.4b2", "LCD.5",
                   "LCD.6a", "LCD.6b", "LCD.6c", "GD.7a", "GD.7b", "GD.7c", "GD.8a", "GD.8b",
                   "CHC.1", "CHC.4", "CHC.5", "CHC.6"), 1e-8)
        check_ids(c, reports, ("polar",), ("curvature", "cartan_curvature"), 1e-8, "flatness ")


def test_criterion_8_classic(criterion, reports):
    with criterion(8, "index-notation bridge under the chart maps") as c:
        check_ids(c, reports, ("polar",), ("A3",), 1e-8)
        check_ids(c, reports, ("polar", "sphere-patch"), ("A10", "A11", "A24", "A25"), 1e-9)
        check_ids(c, reports, ("polar", "sphere-patch", "lorentz"), ("A1[symmetry]",), 1e-10)


def test_criterion_9_harness(criterion, corpus_run, negative_runs, tmp_path):
    from extcalc.cli import main
    from extcalc.verify import SUITES
    with criterion(9, "bundled corpus, negative controls and determinism") as c:
        total = sum(dt for _, dt, _ in corpus_run.values())
        c.measure("corpus runtime [s]", total, 60.0)
        c.require("five bundled scenarios", len(corpus_run) == 5)
        for name, (code, _, data) in corpus_run.items():
            doc = json.loads(data)
            c.require(f"{name} exits 0", code == 0)
            c.require(f"{name} at 64 points, seed 42", (doc["header"]["points"], doc["header"]["seed"]) == (64, 42))
        for suite in SUITES:
            code, doc = negative_runs[f"fault-{suite}"]
            failed = [s["suite"] for s in doc["summary"]["suites"] if not s["pass"]]
            c.require(f"fault-{suite} exits 1 failing only {suite}", (code, failed) == (1, [suite]))
        code, doc = negative_runs["incompatible-gamma"]
        failed = [s["suite"] for s in doc["summary"]["suites"] if not s["pass"]]
        c.require("incompatible-gamma fails only compatibility", (code, failed) == (1, ["compatibility"]))
        for name, (_, _, data) in corpus_run.items():
            out = tmp_path / f"{name}.json"
            main(["verify", "--scenario", f"bundled:{name}", "--out", str(out)])
            c.require(f"{name} repeat is byte-identical", out.read_bytes() == data)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
