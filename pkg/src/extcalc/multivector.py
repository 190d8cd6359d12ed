"""Dense multivectors over the Euclidean canonical space R^n.

A multivector of dimension n stores 2**n real coefficients, one per basis
blade.  Blade ``i`` is the bitmask whose bit ``mu`` is set when the basis
vector ``b_{mu+1}`` is present; the stored blade always lists its vectors in
increasing order and carries sign +1.

Every product is implemented twice: as a batched kernel acting on raw arrays
with arbitrary leading axes (used by the field machinery) and as a method on
the immutable :class:`Multivector` value type.
"""
from functools import lru_cache

import numpy as np

MAX_DIM = 10


class DimensionError(ValueError):
    pass


def check_dim(n):
    if not isinstance(n, (int, np.integer)) or n < 1 or n > MAX_DIM:
        raise DimensionError(f"dimension must be an integer in 1..{MAX_DIM}, got {n!r}")
    return int(n)


def popcount(i):
    return bin(i).count("1")


def reorder_sign(a, b):
    """Sign picked up when the vectors of blade ``a`` are moved past those of ``b``.

    This is the bubble-sort transposition count of the concatenated index
    list, which is the Clifford sign for a Euclidean metric.
    """
    a >>= 1
    swaps = 0
    while a:
        swaps += popcount(a & b)
        a >>= 1
    return -1.0 if swaps & 1 else 1.0


class BladeTables:
    """Precomputed sign and index tables for one dimension."""

    def __init__(self, n):
        self.n = n
        N = self.size = 1 << n
        idx = np.arange(N)
        self.grades = np.array([popcount(i) for i in range(N)])
        self.xor = idx[:, None] ^ idx[None, :]
        # product kernels are indexed [i, k]: left blade i, result blade k, right blade i^k
        gp = np.empty((N, N))
        wedge = np.zeros((N, N))
        lc = np.zeros((N, N))
        rc = np.zeros((N, N))
        for i in range(N):
            for k in range(N):
                j = i ^ k
                s = reorder_sign(i, j)
                gp[i, k] = s
                if i & j == 0:
                    wedge[i, k] = s
                if i & k == 0:
                    lc[i, k] = s
                if j & k == 0:
                    rc[i, k] = s
        self.gp = gp
        self.wedge = wedge
        self.lc = lc
        self.rc = rc
        g = self.grades
        self.reverse_signs = np.where((g * (g - 1) // 2) % 2, -1.0, 1.0)
        self.involute_signs = np.where(g % 2, -1.0, 1.0)
        self.conjugate_signs = self.reverse_signs * self.involute_signs
        self.vector_index = np.array([1 << mu for mu in range(n)])
        self.pseudoscalar = N - 1


@lru_cache(maxsize=None)
def tables(n):
    return BladeTables(check_dim(n))


def dim_of(size):
    n = int(size).bit_length() - 1
    if 1 << n != size:
        raise DimensionError(f"coefficient count {size} is not a power of two")
    return n


# ----------------------------------------------------------------------------
# batched kernels on raw coefficient arrays (last axis = blades)

def _product(x, y, sign):
    n = dim_of(x.shape[-1])
    if y.shape[-1] != x.shape[-1]:
        raise DimensionError("multivectors of different dimension")
    T = tables(n)
    return np.einsum("...i,...ik,ik->...k", x, y[..., T.xor], sign)


def gp(x, y):
    return _product(x, y, tables(dim_of(x.shape[-1])).gp)


def wedge(x, y):
    return _product(x, y, tables(dim_of(x.shape[-1])).wedge)


def lcontract(x, y):
    return _product(x, y, tables(dim_of(x.shape[-1])).lc)


def rcontract(x, y):
    return _product(x, y, tables(dim_of(x.shape[-1])).rc)


def scalar_product(x, y):
    # <reverse(X) Y>_0; for the orthonormal fiducial basis this is the coefficient dot product
    if y.shape[-1] != x.shape[-1]:
        raise DimensionError("multivectors of different dimension")
    return np.einsum("...i,...i->...", x, y)


def commutator(x, y):
    return 0.5 * (gp(x, y) - gp(y, x))


def reverse(x):
    return x * tables(dim_of(x.shape[-1])).reverse_signs


def involute(x):
    return x * tables(dim_of(x.shape[-1])).involute_signs


def conjugate(x):
    return x * tables(dim_of(x.shape[-1])).conjugate_signs


def grade(x, k):
    g = tables(dim_of(x.shape[-1])).grades
    return np.where(g == k, x, 0.0)


def vector_part(x):
    """Grade-1 coefficients as an (..., n) array."""
    T = tables(dim_of(x.shape[-1]))
    return x[..., T.vector_index]


def from_vector(v):
    n = v.shape[-1]
    T = tables(n)
    out = np.zeros(v.shape[:-1] + (T.size,))
    out[..., T.vector_index] = v
    return out


def scalar_part(x):
    return x[..., 0]


def dot(x, y):
    """Scalar product returned as a grade-0 multivector, so it composes like the others."""
    out = np.zeros(np.broadcast_shapes(x.shape, y.shape))
    out[..., 0] = scalar_product(x, y)
    return out


PRODUCTS = {
    "wedge": wedge,
    "dot": dot,
    "lc": lcontract,
    "rc": rcontract,
    "gp": gp,
}


# ----------------------------------------------------------------------------
# blade names

def blade_name(i, n):
    if i == 0:
        return "s"
    idx = [mu + 1 for mu in range(n) if i >> mu & 1]
    if n < 10:
        return "e" + "".join(str(k) for k in idx)
    return "e" + "_".join(str(k) for k in idx)


def parse_blade(token, n):
    """Bitmask of a blade token such as ``s``, ``e1``, ``e134`` or ``e1_10``."""
    token = token.strip()
    if token == "s":
        return 0
    if not token.startswith("e") or len(token) < 2:
        raise ValueError(f"bad blade token {token!r}")
    body = token[1:]
    if "_" in body:
        parts = body.split("_")
    elif n >= 10:
        parts = [body]
    else:
        parts = list(body)
    try:
        idx = [int(p) for p in parts]
    except ValueError:
        raise ValueError(f"bad blade token {token!r}") from None
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise ValueError(f"blade {token!r} must list strictly increasing indices")
    mask = 0
    for k in idx:
        if k < 1 or k > n:
            raise ValueError(f"blade {token!r} refers to b{k} outside dimension {n}")
        mask |= 1 << (k - 1)
    return mask


# ----------------------------------------------------------------------------
# value type

class Multivector:
    """Immutable multivector value.

    ``*`` is the Clifford product (or scaling by a number), ``^`` the wedge,
    ``<<`` the left contraction and ``>>`` the right contraction.
    """

    __slots__ = ("dim", "coeffs")

    def __init__(self, dim, coeffs=None):
        dim = check_dim(dim)
        size = 1 << dim
        if coeffs is None:
            arr = np.zeros(size)
        else:
            arr = np.array(coeffs, dtype=float)
            if arr.shape != (size,):
                raise DimensionError(f"expected {size} coefficients, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Multivector is immutable")

    @classmethod
    def scalar(cls, n, value=1.0):
        c = np.zeros(1 << n)
        c[0] = value
        return cls(n, c)

    @classmethod
    def blade(cls, n, name, value=1.0):
        c = np.zeros(1 << n)
        mask = name if isinstance(name, (int, np.integer)) else parse_blade(name, n)
        c[mask] = value
        return cls(n, c)

    @classmethod
    def vector(cls, components):
        v = np.asarray(components, dtype=float)
        return cls(len(v), from_vector(v))

    @classmethod
    def basis(cls, n):
        """The fiducial vectors b_1..b_n."""
        return [cls.blade(n, 1 << mu) for mu in range(n)]

    @classmethod
    def pseudoscalar(cls, n):
        return cls.blade(n, (1 << n) - 1)

    @classmethod
    def random(cls, n, rng, grades=None):
        c = rng.standard_normal(1 << n)
        if grades is not None:
            g = tables(n).grades
            c = np.where(np.isin(g, list(grades)), c, 0.0)
        return cls(n, c)

    def _coerce(self, other):
        if isinstance(other, Multivector):
            if other.dim != self.dim:
                raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")
            return other.coeffs
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector.scalar(self.dim, float(other)).coeffs
        return NotImplemented

    def _binary(self, other, fn, reflected=False):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if reflected:
            return Multivector(self.dim, fn(o, self.coeffs))
        return Multivector(self.dim, fn(self.coeffs, o))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return self._binary(other, np.subtract, reflected=True)

    def __neg__(self):
        return Multivector(self.dim, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector(self.dim, self.coeffs * float(other))
        return self._binary(other, gp)

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector(self.dim, self.coeffs * float(other))
        return self._binary(other, gp, reflected=True)

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector(self.dim, self.coeffs / float(other))
        return NotImplemented

    def __xor__(self, other):
        return self._binary(other, wedge)

    def __rxor__(self, other):
        return self._binary(other, wedge, reflected=True)

    def __lshift__(self, other):
        return self._binary(other, lcontract)

    def __rlshift__(self, other):
        return self._binary(other, lcontract, reflected=True)

    def __rshift__(self, other):
        return self._binary(other, rcontract)

    def __rrshift__(self, other):
        return self._binary(other, rcontract, reflected=True)

    def wedge(self, other):
        return self ^ other

    def lc(self, other):
        return self << other

    def rc(self, other):
        return self >> other

    def contract(self, other, side="left"):
        if side == "left":
            return self << other
        if side == "right":
            return self >> other
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")

    def dot(self, other):
        o = self._coerce(other)
        return float(scalar_product(self.coeffs, o))

    def cross(self, other):
        """Commutator product ½(BX − XB)."""
        return self._binary(other, commutator)

    def reverse(self):
        return Multivector(self.dim, reverse(self.coeffs))

    def involute(self):
        return Multivector(self.dim, involute(self.coeffs))

    def conjugate(self):
        return Multivector(self.dim, conjugate(self.coeffs))

    def involution(self, which):
        return {
            "reverse": self.reverse,
            "grade_involution": self.involute,
            "conjugate": self.conjugate,
        }[which]()

    def grade(self, k):
        if not 0 <= k <= self.dim:
            raise ValueError(f"grade {k} outside 0..{self.dim}")
        return Multivector(self.dim, grade(self.coeffs, k))

    def grades(self):
        g = tables(self.dim).grades
        return sorted({int(k) for k in g[self.coeffs != 0]})

    def scalar_part(self):
        return float(self.coeffs[0])

    def vector_part(self):
        return vector_part(self.coeffs).copy()

    def norm_inf(self):
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def is_close(self, other, tol=1e-12):
        return float(np.max(np.abs(self.coeffs - self._coerce(other)))) <= tol

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.dim, self.coeffs.tobytes()))

    def __getitem__(self, blade):
        mask = blade if isinstance(blade, (int, np.integer)) else parse_blade(blade, self.dim)
        return float(self.coeffs[mask])

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c != 0:
                terms.append(f"{c:g}" if i == 0 else f"{c:g}*{blade_name(i, self.dim)}")
        return "Multivector(" + (" + ".join(terms) if terms else "0") + ")"


def exterior_product(X, Y):
    return X ^ Y


def contract(X, Y, side="left"):
    return X.contract(Y, side)


def clifford_product(X, Y):
    return X * Y


def commutator_x(B, X):
    return B.cross(X)


def grade_project(X, k):
    return X.grade(k)


def involutions(X, which):
    return X.involution(which)
