"""Evaluate suites of a scenario at seeded sample points."""
from dataclasses import dataclass, field, replace

import numpy as np

from .. import __version__
from .. import fields as F
from ..expr import EvaluationError
from .suites import FIXED_TOL, SUITES, Workbench

FAULT_SCALE = 1e-3

CONVENTIONS = {
    "gauge_connection": "Omega(a) = +1/2 sum_mu gamma(a, b_mu) ^ b_mu",
    "scalar_product": "det-of-Gram on simple blades",
    "residual": "max|L-R| / (1 + max(|L|, |R|)) per point, max over points",
    "bianchi": "connection table symmetrized before the bianchi suite",
    "gauge_factor": "h0 rows from eigh: positive eigenvalues first, then coordinate alignment; h = h0 sqrt(g0^-1 g)",
    "inverse_jacobian": "numeric (per-point jet inverse)",
    "sqrt_abs_det": "exact jets via the trace-log identity",
}


@dataclass
class CheckResult:
    suite: str
    id: str
    eq: object
    points: int
    max_residual: float
    tol: float
    tier: str
    passed: bool
    worst_point: object = None
    error: object = None

    def as_dict(self):
        return {
            "suite": self.suite,
            "id": self.id,
            "eq": self.eq,
            "points": self.points,
            "max_residual": self.max_residual if np.isfinite(self.max_residual) else None,
            "tol": self.tol,
            "tier": self.tier,
            "pass": self.passed,
            "worst_point": self.worst_point,
            "error": self.error,
        }


@dataclass
class Report:
    header: dict
    results: list = field(default_factory=list)

    @property
    def suite_status(self):
        status = {}
        for r in self.results:
            status[r.suite] = status.get(r.suite, True) and r.passed
        return status

    @property
    def failed_suites(self):
        return [s for s, ok in self.suite_status.items() if not ok]

    @property
    def passed(self):
        return not self.failed_suites


def _round(x):
    return float(f"{x:.6e}")


def _point(p):
    return [_round(float(v)) for v in p]


def residuals(L, R):
    """Per-point normalized residual of two value arrays with a leading point axis."""
    P = L.shape[0]
    L = L.reshape(P, -1)
    R = R.reshape(P, -1)
    diff = np.max(np.abs(L - R), axis=1, initial=0.0)
    scale = 1.0 + np.maximum(np.max(np.abs(L), axis=1, initial=0.0), np.max(np.abs(R), axis=1, initial=0.0))
    r = diff / scale
    return np.where(np.isfinite(r), r, np.inf)


def tolerance(tier, scenario):
    if tier == "first":
        return scenario.tol_first
    if tier == "second":
        return scenario.tol_second
    return FIXED_TOL[tier]


def _values(check, ctx):
    if callable(check.lhs) and not isinstance(check.lhs, F.Field):
        return check.lhs(ctx)
    L = check.lhs.values(ctx)
    R = np.zeros_like(L) if check.rhs is None else check.rhs.values(ctx)
    if L.shape != R.shape:
        raise ValueError(f"shape mismatch {L.shape} vs {R.shape}")
    return L, R


def run_check(check, ctx, suite, scenario, faulty=False):
    tol = tolerance(check.tier, scenario)
    base = dict(suite=suite, id=check.id, eq=check.eq, points=ctx.size, tol=tol, tier=check.tier)
    try:
        with np.errstate(all="ignore"):
            L, R = _values(check, ctx)
            if faulty:
                L = L * (1.0 + FAULT_SCALE) + FAULT_SCALE
            r = residuals(L, R)
    except EvaluationError as err:
        pt = None if err.point is None else _point(err.point)
        return CheckResult(max_residual=float("inf"), passed=False, worst_point=pt, error=str(err), **base)
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as err:
        return CheckResult(max_residual=float("inf"), passed=False, error=f"{type(err).__name__}: {err}", **base)
    i = int(np.argmax(r))
    worst = float(r[i])
    return CheckResult(max_residual=_round(worst), passed=bool(worst <= tol), worst_point=_point(ctx.points[i]), **base)


def _suite_failure(suite, err, ctx, scenario, point=None):
    return CheckResult(suite=suite, id=f"{suite}:setup", eq=None, points=ctx.size, max_residual=float("inf"),
                       tol=scenario.tol_first, tier="first", passed=False,
                       worst_point=None if point is None else _point(point), error=str(err))


def sample_points(scenario):
    chart = F.Chart(scenario.box)
    return chart.sample_points(scenario.points, scenario.seed)


def run_scenario(scenario, suites=None, points=None, seed=None, tol_first=None, tol_second=None):
    """Evaluate the selected suites and return a :class:`Report`."""
    overrides = {k: v for k, v in (("points", points), ("seed", seed), ("tol_first", tol_first),
                                   ("tol_second", tol_second)) if v is not None}
    if suites:
        overrides["suites"] = list(suites)
    sc = replace(scenario, **overrides) if overrides else scenario
    wb = Workbench(sc)
    pts = sample_points(sc)
    ctx = F.EvalContext(pts)
    notes = []
    if "bianchi" in sc.suites:
        notes.append("bianchi: connection table symmetrized")
    if sc.fault:
        notes.append(f"fault injection: left sides of suite {sc.fault!r} perturbed")
    header = {
        "scenario": sc.name,
        "dim": sc.dim,
        "seed": sc.seed,
        "points": sc.points,
        "version": __version__,
        "conventions": CONVENTIONS,
        "notes": notes,
    }
    report = Report(header)
    metric_error = _validate_metric(wb, ctx, sc)
    for suite in sc.suites:
        builder, needs_metric = SUITES[suite]
        if needs_metric and metric_error is not None:
            report.results.append(_suite_failure(suite, metric_error[0], ctx, sc, metric_error[1]))
            continue
        try:
            checks = builder(wb)
        except EvaluationError as err:
            report.results.append(_suite_failure(suite, err, ctx, sc, err.point))
            continue
        except (ArithmeticError, ValueError, TypeError) as err:
            report.results.append(_suite_failure(suite, f"{type(err).__name__}: {err}", ctx, sc))
            continue
        for check in checks:
            report.results.append(run_check(check, ctx, suite, sc, faulty=(sc.fault == suite)))
    return report


def _validate_metric(wb, ctx, sc):
    if not sc.metric:
        return None
    try:
        wb.g.validate(ctx)
    except EvaluationError as err:
        return str(err), err.point
    except ValueError as err:
        return str(err), None
    return None
