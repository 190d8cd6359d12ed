"""Truncated multivariate Taylor expansions ("jets") of array-valued fields.

A jet of order k stores, for a batch of P base points, the Taylor
coefficients ∂^α f / α! for every multi-index |α| ≤ k.  Arithmetic on jets
is exact polynomial arithmetic truncated at order k, so derivatives of
products, inverses, determinants and square roots come out exactly (up to
rounding) without any differencing.

Coefficient arrays have shape (P, M, *value_shape) where M counts the
multi-indices.  Multi-indices are ordered by total degree, so the jet of a
lower order is a prefix slice.
"""
from functools import lru_cache
from itertools import combinations_with_replacement
from math import factorial

import numpy as np


class JetSpace:
    def __init__(self, n, k):
        self.n, self.k = n, k
        alphas = []
        for d in range(k + 1):
            for combo in combinations_with_replacement(range(n), d):
                a = [0] * n
                for mu in combo:
                    a[mu] += 1
                alphas.append(tuple(a))
        self.alphas = alphas
        self.index = {a: i for i, a in enumerate(alphas)}
        self.size = len(alphas)
        ia, ib, ig = [], [], []
        for i, a in enumerate(alphas):
            for j, b in enumerate(alphas):
                s = tuple(x + y for x, y in zip(a, b))
                g = self.index.get(s)
                if g is not None:
                    ia.append(i)
                    ib.append(j)
                    ig.append(g)
        self.ia = np.array(ia)
        self.ib = np.array(ib)
        S = np.zeros((self.size, len(ia)))
        S[ig, np.arange(len(ia))] = 1.0
        self.S = S
        self.deriv = []
        if k > 0:
            lower = alphas[: _count(n, k - 1)]
            for mu in range(n):
                src, fac = [], []
                for a in lower:
                    b = list(a)
                    b[mu] += 1
                    src.append(self.index[tuple(b)])
                    fac.append(float(b[mu]))
                self.deriv.append((np.array(src), np.array(fac)))


def _count(n, k):
    return factorial(n + k) // (factorial(n) * factorial(k))


@lru_cache(maxsize=None)
def space(n, k):
    return JetSpace(n, k)


class JetError(ArithmeticError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class Jet:
    __slots__ = ("c", "n", "k")

    def __init__(self, c, n, k):
        self.c = c
        self.n = n
        self.k = k

    @classmethod
    def constant(cls, value, n, k, points=None):
        value = np.asarray(value, dtype=float)
        if points is not None and (value.ndim == 0 or value.shape[0] != points):
            value = np.broadcast_to(value, (points,) + value.shape)
        M = space(n, k).size
        c = np.zeros((value.shape[0], M) + value.shape[1:])
        c[:, 0] = value
        return cls(c, n, k)

    @property
    def shape(self):
        return self.c.shape[2:]

    @property
    def value(self):
        return self.c[:, 0]

    @property
    def points(self):
        return self.c.shape[0]

    def trunc(self, k):
        if k == self.k:
            return self
        if k > self.k:
            raise ValueError(f"cannot raise a jet from order {self.k} to {k}")
        return Jet(self.c[:, : space(self.n, k).size], self.n, k)

    def _align(self, other):
        k = min(self.k, other.k)
        return self.trunc(k), other.trunc(k), k

    def __add__(self, other):
        a, b, k = self._align(other)
        return Jet(a.c + b.c, self.n, k)

    def __sub__(self, other):
        a, b, k = self._align(other)
        return Jet(a.c - b.c, self.n, k)

    def __neg__(self):
        return Jet(-self.c, self.n, self.k)

    def scale(self, s):
        return Jet(self.c * s, self.n, self.k)

    def lin(self, fn):
        """Apply a linear map acting on the value axes (batched over points and monomials)."""
        return Jet(fn(self.c), self.n, self.k)

    def bil(self, other, fn):
        """Truncated product under the bilinear map ``fn`` on value arrays."""
        a, b, k = self._align(other)
        if k == 0:
            return Jet(fn(a.c, b.c), self.n, 0)
        sp = space(self.n, k)
        r = fn(a.c[:, sp.ia], b.c[:, sp.ib])
        flat = r.reshape(r.shape[:2] + (-1,))
        out = np.matmul(sp.S, flat)
        return Jet(out.reshape((r.shape[0], sp.size) + r.shape[2:]), self.n, k)

    def smul(self, other):
        """Scalar jet (shape ()) times a jet of any shape."""
        extra = len(other.shape)
        return self.bil(other, lambda a, b: a.reshape(a.shape + (1,) * extra) * b)

    def d(self, mu):
        """Partial derivative along coordinate ``mu``; order drops by one."""
        if self.k == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        src, fac = space(self.n, self.k).deriv[mu]
        c = self.c[:, src] * fac.reshape((1, -1) + (1,) * len(self.shape))
        return Jet(c, self.n, self.k - 1)

    def nilpotent(self):
        c = self.c.copy()
        c[:, 0] = 0.0
        return Jet(c, self.n, self.k)

    def __getitem__(self, idx):
        """Index into the value axes."""
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.c[(slice(None), slice(None)) + idx], self.n, self.k)


def stack(jets, axis=-1):
    k = min(j.k for j in jets)
    n = jets[0].n
    cs = [j.trunc(k).c for j in jets]
    if axis < 0:
        axis = cs[0].ndim + 1 + axis
    return Jet(np.stack(cs, axis=axis), n, k)


def taylor_compose(u, derivs):
    """f(u) for a scalar jet u, given f^(m)(u0) for m = 0..k as arrays over points."""
    v = u.nilpotent()
    out = Jet.constant(derivs[0], u.n, u.k)
    term = None
    for m in range(1, u.k + 1):
        term = v if term is None else term.bil(v, np.multiply)
        out = out + Jet.constant(derivs[m] / factorial(m), u.n, u.k).bil(term, np.multiply)
    return out


def reciprocal(u):
    u0 = u.value
    if np.any(u0 == 0):
        raise JetError("division by zero", int(np.argmax(u0 == 0)))
    derivs = [((-1) ** m) * factorial(m) / u0 ** (m + 1) for m in range(u.k + 1)]
    return taylor_compose(u, derivs)


def sqrt(u):
    u0 = u.value
    if np.any(u0 <= 0):
        raise JetError("square root of a non-positive value", int(np.argmax(u0 <= 0)))
    derivs = []
    coef = 1.0
    for m in range(u.k + 1):
        derivs.append(coef * u0 ** (0.5 - m))
        coef *= 0.5 - m
    return taylor_compose(u, derivs)


def exp(u):
    e = np.exp(u.value)
    return taylor_compose(u, [e] * (u.k + 1))


def matmul(a, b):
    return a.bil(b, np.matmul)


def matvec(a, x):
    return a.bil(x, lambda m, v: np.einsum("...ij,...j->...i", m, v))


def _identity_like(a):
    n = a.shape[-1]
    return Jet.constant(np.broadcast_to(np.eye(n), (a.points, n, n)), a.n, a.k)


def inverse(a, tol=1e-12):
    """Matrix inverse of an (n, n)-valued jet by the Neumann series about the base value."""
    a0 = a.value
    det0 = np.linalg.det(a0)
    bad = np.abs(det0) <= tol
    if bad.any():
        raise JetError("singular matrix", int(np.argmax(bad)))
    inv0 = Jet.constant(np.linalg.inv(a0), a.n, a.k)
    e = -matmul(inv0, a.nilpotent())
    out = inv0
    term = inv0
    for _ in range(a.k):
        term = matmul(e, term)
        out = out + term
    return out


def logdet_increment(a):
    """tr log(1 + a0⁻¹ (a − a0)) as a nilpotent scalar jet."""
    inv0 = Jet.constant(np.linalg.inv(a.value), a.n, a.k)
    f = matmul(inv0, a.nilpotent())
    total = None
    power = None
    for m in range(1, a.k + 1):
        power = f if power is None else matmul(power, f)
        tr = power.lin(lambda c: np.trace(c, axis1=-2, axis2=-1))
        term = tr.scale((-1) ** (m + 1) / m)
        total = term if total is None else total + term
    if total is None:
        return Jet.constant(np.zeros(a.points), a.n, a.k)
    return total


def det(a, tol=1e-12):
    d0 = np.linalg.det(a.value)
    bad = np.abs(d0) <= tol
    if bad.any():
        raise JetError("singular matrix", int(np.argmax(bad)))
    if a.k == 0:
        return Jet.constant(d0, a.n, 0)
    s = logdet_increment(a)
    return Jet.constant(d0, a.n, a.k).bil(exp_nilpotent(s), np.multiply)


def sqrt_abs_det(a, tol=1e-12):
    """√|det a| via the trace-log expansion of det."""
    d0 = np.linalg.det(a.value)
    bad = np.abs(d0) <= tol
    if bad.any():
        raise JetError("singular matrix", int(np.argmax(bad)))
    if a.k == 0:
        return Jet.constant(np.sqrt(np.abs(d0)), a.n, 0)
    s = logdet_increment(a).scale(0.5)
    return Jet.constant(np.sqrt(np.abs(d0)), a.n, a.k).bil(exp_nilpotent(s), np.multiply)


def exp_nilpotent(s):
    out = Jet.constant(np.ones(s.points), s.n, s.k)
    term = None
    for m in range(1, s.k + 1):
        term = s if term is None else term.bil(s, np.multiply)
        out = out + term.scale(1.0 / factorial(m))
    return out
