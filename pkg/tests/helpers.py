"""Random smooth fields and connections shared by the field-level tests."""
import numpy as np

from extcalc import fields as F
from extcalc.connection import ConnectionField


def coeff(rng, dim):
    c = rng.uniform(-1, 1, size=4)
    i, j, k = rng.integers(1, dim + 1, size=3)
    return f"{c[0]:.4f} + {c[1]:.4f}*x{i} + {c[2]:.4f}*x{i}*x{j} + {c[3]:.4f}*sin(x{k})"


def mv_field(rng, dim, grades=None):
    coeffs = {m: coeff(rng, dim) for m in range(1 << dim)
              if grades is None or bin(m).count("1") in grades}
    return F.multivector_field(dim, coeffs)


def vec(rng, dim):
    return mv_field(rng, dim, [1])


def scalar(rng, dim):
    return F.scalar_field(dim, coeff(rng, dim))


def connection(rng, dim, symmetric=False, scale=0.5):
    entries = [[[None] * dim for _ in range(dim)] for _ in range(dim)]
    for l in range(dim):
        for m in range(dim):
            for n in range(dim):
                if symmetric and n < m:
                    entries[l][m][n] = entries[l][n][m]
                else:
                    entries[l][m][n] = f"{scale}*({coeff(rng, dim)})"
    return ConnectionField.from_exprs(dim, entries)


def extensor(rng, dim, shift=0.0):
    rows = [[coeff(rng, dim) + (f" + {shift}" if i == j else "") for j in range(dim)] for i in range(dim)]
    return F.extensor_field(rows)


def points(dim, count=8, seed=0, box=(-1, 1)):
    return F.Chart([box] * dim).sample_points(count, seed)


def residual(a, b, pts):
    ctx = F.EvalContext(pts)
    A = a.values(ctx)
    B = np.zeros_like(A) if b is None else b.values(ctx)
    scale = 1 + max(np.max(np.abs(A), initial=0.0), np.max(np.abs(B), initial=0.0))
    return float(np.max(np.abs(A - B), initial=0.0)) / scale


def polar_metric():
    from extcalc.metric import MetricField
    return MetricField.from_exprs([["1", "0"], [None, "x1^2"]], (2, 0))


def sphere_metric():
    from extcalc.metric import MetricField
    return MetricField.from_exprs([["1", "0"], [None, "sin(x1)^2"]], (2, 0))


def lorentz_metric():
    from extcalc.metric import MetricField
    rows = [["1 + 0.2*x2^2", "0", "0", "0"],
            [None, "-(1 + 0.1*x1^2)", "0.1*sin(x1)", "0"],
            [None, None, "-exp(0.3*x4)", "0"],
            [None, None, None, "-1"]]
    return MetricField.from_exprs(rows, (1, 3))


def random_metric(rng, n, signature=None):
    """2·η + a small smooth symmetric perturbation, with η = diag(+1 × p, −1 × q)."""
    from extcalc.metric import MetricField
    p, q = signature or (n, 0)
    diag = [1.0] * p + [-1.0] * q
    rows = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            c = rng.uniform(-0.2, 0.2, size=2)
            k = rng.integers(1, n + 1)
            base = f"{2 * diag[i]:+.1f} + " if i == j else ""
            rows[i][j] = f"{base}{c[0]:.4f}*sin(x{k}) + {c[1]:.4f}*x{k}^2"
    return MetricField.from_exprs(rows, (p, q))


METRICS = {
    "polar": (polar_metric, (0.5, 3)),
    "sphere": (sphere_metric, (0.3, 2.8)),
    "lorentz": (lorentz_metric, (-0.5, 0.5)),
}
