"""Pointwise linear machinery: (1,1)-extensors, their extensions and k-extensors."""
import numpy as np

from . import multivector as mv
from .multivector import DimensionError, Multivector

SINGULAR_TOL = 1e-12


class SingularExtensorError(ValueError):
    pass


# ----------------------------------------------------------------------------
# batched kernels; matrices are (..., n, n) with column mu the image of b_mu

def apply_vector(t, x):
    """t applied to the grade-1 part of x, returned as a multivector array."""
    return mv.from_vector(np.einsum("...ij,...j->...i", t, mv.vector_part(x)))


def extension_matrix(t, wedge=mv.wedge):
    """Matrix of the outermorphism of t acting on all 2**n blades.

    Column ``A`` holds t(b_i1)^...^t(b_ik).  ``wedge`` may be swapped for a
    jet-aware product so the same recursion builds derivatives too.
    """
    n = t.shape[-1]
    N = 1 << n
    cols = [None] * N
    one = np.zeros(t.shape[:-2] + (N,))
    one[..., 0] = 1.0
    cols[0] = one
    for A in range(1, N):
        low = A & -A
        mu = low.bit_length() - 1
        cols[A] = wedge(mv.from_vector(t[..., :, mu]), cols[A ^ low])
    return np.stack(cols, axis=-1)


def left_contraction_by_basis(n):
    """Matrices C_mu with (b_mu ⌟ X) = C_mu @ X."""
    T = mv.tables(n)
    N = T.size
    out = np.zeros((n, N, N))
    for mu in range(n):
        v = 1 << mu
        for j in range(N):
            if j & v:
                out[mu, j ^ v, j] = T.lc[v, j ^ v]
    return out


def generalize_kernel(t, x):
    """Σ_mu t(b_mu) ∧ (b_mu ⌟ X), batched and bilinear in (t, x)."""
    n = t.shape[-1]
    C = _lc_basis(n)
    out = 0.0
    for mu in range(n):
        inner = np.einsum("kj,...j->...k", C[mu], x)
        out = out + mv.wedge(mv.from_vector(t[..., :, mu]), inner)
    return out


_LC_CACHE = {}


def _lc_basis(n):
    if n not in _LC_CACHE:
        _LC_CACHE[n] = left_contraction_by_basis(n)
    return _LC_CACHE[n]


def biv_kernel(t):
    """−Σ b^mu ∧ t(b_mu) = Σ_{l<m} (t[l,m] − t[m,l]) b_l∧b_m."""
    n = t.shape[-1]
    out = np.zeros(t.shape[:-2] + (1 << n,))
    for l in range(n):
        for m in range(l + 1, n):
            out[..., (1 << l) | (1 << m)] = t[..., l, m] - t[..., m, l]
    return out


def cross_matrix(B):
    """Matrix of the vector map v ↦ B×v for a bivector array B."""
    n = mv.dim_of(B.shape[-1])
    cols = []
    for mu in range(n):
        e = np.zeros(1 << n)
        e[1 << mu] = 1.0
        cols.append(mv.vector_part(mv.commutator(B, e)))
    return np.stack(cols, axis=-1)


# ----------------------------------------------------------------------------
# value types

def _as_matrix(m):
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"extensor matrix must be square, got shape {a.shape}")
    mv.check_dim(a.shape[0])
    a.setflags(write=False)
    return a


class Extensor11:
    """Linear map of vectors; ``matrix[:, mu]`` is the image of ``b_mu``."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        object.__setattr__(self, "matrix", _as_matrix(matrix))

    def __setattr__(self, name, value):
        raise AttributeError("Extensor11 is immutable")

    @property
    def dim(self):
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n))

    @classmethod
    def from_function(cls, n, fn):
        """Build from a vector map given on Multivector inputs."""
        cols = [fn(b).vector_part() for b in Multivector.basis(n)]
        return cls(np.stack(cols, axis=1))

    @classmethod
    def cross(cls, B):
        """The map v ↦ B×v."""
        return cls(cross_matrix(B.coeffs))

    def __call__(self, v):
        if not isinstance(v, Multivector) or v.dim != self.dim:
            raise DimensionError("argument must be a multivector of matching dimension")
        if np.any(mv.tables(v.dim).grades[v.coeffs != 0] != 1):
            raise ValueError("a (1,1)-extensor acts on vectors only")
        return Multivector(self.dim, apply_vector(self.matrix, v.coeffs))

    def __add__(self, other):
        return Extensor11(self.matrix + other.matrix)

    def __sub__(self, other):
        return Extensor11(self.matrix - other.matrix)

    def __neg__(self):
        return Extensor11(-self.matrix)

    def __mul__(self, s):
        return Extensor11(self.matrix * float(s))

    __rmul__ = __mul__

    def __matmul__(self, other):
        return Extensor11(self.matrix @ other.matrix)

    compose = __matmul__

    def adjoint(self):
        return Extensor11(self.matrix.T)

    def det(self):
        return float(np.linalg.det(self.matrix))

    def inverse(self):
        d = self.det()
        if abs(d) <= SINGULAR_TOL:
            raise SingularExtensorError(f"singular extensor (det = {d:.3e})")
        return Extensor11(np.linalg.inv(self.matrix))

    def dual(self):
        """t* = (t⁻¹)†."""
        return self.inverse().adjoint()

    def g_adjoint(self, g):
        """The adjoint with respect to the metric pairing: g⁻¹ t† g."""
        return g.inverse() @ self.adjoint() @ g

    def extend(self):
        return ExtendedMap(self)

    def generalize(self, X):
        return Multivector(self.dim, generalize_kernel(self.matrix, X.coeffs))

    def biv(self):
        return Multivector(self.dim, biv_kernel(self.matrix))

    def is_close(self, other, tol=1e-12):
        return float(np.max(np.abs(self.matrix - other.matrix))) <= tol

    def __repr__(self):
        return f"Extensor11({self.matrix.tolist()})"


class ExtendedMap:
    """Outermorphism of a (1,1)-extensor, acting on every grade."""

    __slots__ = ("base", "matrix")

    def __init__(self, base):
        object.__setattr__(self, "base", base)
        m = extension_matrix(base.matrix)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __setattr__(self, name, value):
        raise AttributeError("ExtendedMap is immutable")

    def __call__(self, X):
        return Multivector(self.base.dim, self.matrix @ X.coeffs)

    def adjoint(self):
        return ExtendedMap(self.base.adjoint())

    def inverse(self):
        return ExtendedMap(self.base.inverse())


class ExtensorK:
    """A k-linear multivector-valued map stored as an evaluator."""

    def __init__(self, dim, arity, evaluator):
        self.dim = mv.check_dim(dim)
        self.arity = int(arity)
        self.evaluator = evaluator

    def __call__(self, *args):
        if len(args) != self.arity:
            raise TypeError(f"expected {self.arity} arguments, got {len(args)}")
        return self.evaluator(*args)

    def multilinearity_defect(self, rng, trials=5, grades=None):
        """Largest violation of additivity/homogeneity seen on random inputs."""
        worst = 0.0
        for _ in range(trials):
            args = [Multivector.random(self.dim, rng, grades) for _ in range(self.arity)]
            base = self(*args)
            for slot in range(self.arity):
                extra = Multivector.random(self.dim, rng, grades)
                s = float(rng.standard_normal())
                moved = list(args)
                moved[slot] = args[slot] * s + extra
                other = list(args)
                other[slot] = extra
                lhs = self(*moved)
                rhs = base * s + self(*other)
                worst = max(worst, (lhs - rhs).norm_inf())
        return worst


def adjoint(t):
    return t.adjoint()


def extend(t):
    return t.extend()


def apply_extend(ext, X):
    return ext(X)


def generalize(t, X):
    return t.generalize(X)


def biv(t):
    return t.biv()


def det_and_inverse(t):
    return t.det(), t.inverse()


def sym_skew_split(t, metric=None):
    """(t₊, t₋) with t₊ + t₋ = t; the adjoint is taken w.r.t. ``metric`` when given."""
    if metric is None:
        tadj = t.adjoint()
    else:
        if not np.allclose(metric.matrix, metric.matrix.T, rtol=0, atol=1e-12):
            raise ValueError("metric must be symmetric")
        tadj = t.g_adjoint(metric)
    return (t + tadj) * 0.5, (t - tadj) * 0.5


def reciprocal_frame(eps):
    """Frame pair e_mu = ε(b_mu), e^mu = ε*(b_mu) as two lists of vectors."""
    n = eps.dim
    star = eps.dual()
    basis = Multivector.basis(n)
    return [eps(b) for b in basis], [star(b) for b in basis]


def dummy_vector_derivative(F, arity, dim, product="gp", frame=None):
    """Basis-sum form of the vector derivative of a multilinear argument.

    arity 1: Σ_mu e^mu ⋄ F(e_mu) with ⋄ one of ``gp``, ``wedge``, ``lc``,
    ``rc``, ``dot`` or ``scalar`` (plain scaling, for scalar-valued F).
    arity 2: Σ_{mu,nu} (e^mu ∧ e^nu) F(e_mu, e_nu) with F scalar-valued.
    ``frame`` is an optional Extensor11 ε generating the frame pair; the
    fiducial frame is used otherwise.
    """
    if frame is None:
        lower = upper = Multivector.basis(dim)
    else:
        lower, upper = reciprocal_frame(frame)
    total = Multivector(dim)
    if arity == 1:
        for e_lo, e_up in zip(lower, upper):
            val = F(e_lo)
            if product == "scalar":
                total = total + e_up * float(_as_scalar(val))
            else:
                total = total + Multivector(dim, mv.PRODUCTS[product](e_up.coeffs, val.coeffs))
        return total
    if arity == 2:
        for a_lo, a_up in zip(lower, upper):
            for b_lo, b_up in zip(lower, upper):
                total = total + (a_up ^ b_up) * float(_as_scalar(F(a_lo, b_lo)))
        return total
    raise ValueError("arity must be 1 or 2")


def _as_scalar(v):
    if isinstance(v, Multivector):
        return v.scalar_part()
    return float(v)
