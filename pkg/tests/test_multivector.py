import numpy as np
import pytest
from hypothesis import given, strategies as st

from extcalc import multivector as mv
from extcalc.multivector import DimensionError, Multivector as M

TOL = 1e-12

dims = st.integers(min_value=1, max_value=6)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def b(n, name):
    return M.blade(n, name)


def homogeneous(n, k, rng):
    return M.random(n, rng, grades=[k])


class TestExamples:
    """Hand-expanded values for small dimensions."""

    def test_wedge(self):
        assert b(2, "e1") ^ b(2, "e2") == b(2, "e12")
        assert (b(2, "e1") ^ b(2, "e1")) == M(2)
        assert ((1 + b(2, "e1")) ^ b(2, "e2")) == b(2, "e2") + b(2, "e12")

    def test_contractions(self):
        assert (b(2, "e1") << b(2, "e12")) == b(2, "e2")
        assert b(2, "e12").dot(b(2, "e12")) == 1.0
        X = M.random(3, np.random.default_rng(1))
        assert ((M.scalar(3, 2.5) << X) - X * 2.5).norm_inf() == 0.0

    def test_clifford(self):
        assert b(2, "e1") * b(2, "e1") == M.scalar(2)
        assert b(2, "e1") * b(2, "e2") == b(2, "e12")
        assert b(2, "e12") * b(2, "e12") == M.scalar(2, -1.0)

    def test_involutions(self):
        e12 = b(2, "e12")
        assert e12.reverse() == -e12
        assert b(2, "e1").involute() == -b(2, "e1")
        # grade 2: reverse gives -1, grade involution +1
        assert e12.conjugate() == -e12

    def test_commutator(self):
        e12 = b(2, "e12")
        assert e12.cross(b(2, "e1")) == -b(2, "e2")
        assert e12.cross(e12) == M(2)
        assert e12.cross(M.scalar(2, 3.0)) == M(2)

    def test_grade_projection(self):
        X = 1 + b(2, "e1") + b(2, "e12")
        assert X.grade(1) == b(2, "e1")
        assert b(2, "e12").grade(0) == M(2)

    def test_gram_determinant(self, rng):
        for n in (3, 4):
            for k in (1, 2, 3):
                A = rng.standard_normal((k, n))
                B = rng.standard_normal((k, n))
                blade = lambda rows: _wedge_all([M.vector(r) for r in rows])
                gram = np.linalg.det(A @ B.T)
                assert abs(blade(A).dot(blade(B)) - gram) < 1e-12


def _wedge_all(vs):
    out = vs[0]
    for v in vs[1:]:
        out = out ^ v
    return out


class TestStructure:
    def test_dim_cap(self):
        with pytest.raises(DimensionError):
            M(11)
        with pytest.raises(DimensionError):
            M(0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            M(2) ^ M(3)

    def test_blade_tokens(self):
        assert mv.parse_blade("s", 3) == 0
        assert mv.parse_blade("e13", 3) == 0b101
        assert mv.parse_blade("e1_10", 10) == (1 | 1 << 9)
        assert mv.blade_name(0b101, 3) == "e13"
        for bad in ("e31", "e4", "x1", "e"):
            with pytest.raises(ValueError):
                mv.parse_blade(bad, 3)

    def test_immutable(self):
        X = M(2)
        with pytest.raises(AttributeError):
            X.dim = 3
        with pytest.raises(ValueError):
            X.coeffs[0] = 1.0


class TestProperties:
    @given(dims, seeds)
    def test_associativity(self, n, seed):
        rng = np.random.default_rng(seed)
        X, Y, Z = (M.random(n, rng) for _ in range(3))
        assert ((X * Y) * Z - X * (Y * Z)).norm_inf() < TOL * 10 ** (n / 2)
        assert (((X ^ Y) ^ Z) - (X ^ (Y ^ Z))).norm_inf() < TOL * 10 ** (n / 2)

    @given(dims, seeds, st.data())
    def test_graded_commutation(self, n, seed, data):
        rng = np.random.default_rng(seed)
        r = data.draw(st.integers(0, n))
        s = data.draw(st.integers(0, n))
        X, Y = homogeneous(n, r, rng), homogeneous(n, s, rng)
        assert ((X ^ Y) - (Y ^ X) * (-1) ** (r * s)).norm_inf() < TOL

    @given(dims, seeds)
    def test_contraction_duality(self, n, seed):
        rng = np.random.default_rng(seed)
        X, Y, Z = (M.random(n, rng) for _ in range(3))
        assert abs((X << Y).dot(Z) - Y.dot(X.reverse() ^ Z)) < TOL * 10 ** (n / 2)

    @given(dims, seeds)
    def test_vector_split(self, n, seed):
        rng = np.random.default_rng(seed)
        v = M.random(n, rng, grades=[1])
        X = M.random(n, rng)
        assert (v * X - ((v << X) + (v ^ X))).norm_inf() < TOL
        assert (X * v - ((X >> v) + (X ^ v))).norm_inf() < TOL

    @given(dims, seeds)
    def test_involution_composition(self, n, seed):
        X = M.random(n, np.random.default_rng(seed))
        assert X.reverse().reverse() == X
        assert X.involute().involute() == X
        assert X.conjugate() == X.involute().reverse()

    @given(dims, seeds, st.data())
    def test_grade_of_contraction(self, n, seed, data):
        rng = np.random.default_rng(seed)
        r = data.draw(st.integers(0, n))
        s = data.draw(st.integers(0, n))
        out = homogeneous(n, r, rng) << homogeneous(n, s, rng)
        kept = out.grade(s - r) if s >= r else out * 0.0
        assert (out - kept).norm_inf() < TOL

    @given(dims, seeds)
    def test_grade_completeness(self, n, seed):
        X = M.random(n, np.random.default_rng(seed))
        total = M(n)
        for k in range(n + 1):
            total = total + X.grade(k)
        assert total == X

    @given(st.integers(2, 6), seeds)
    def test_bivector_commutator_preserves_grade(self, n, seed):
        rng = np.random.default_rng(seed)
        B = M.random(n, rng, grades=[2])
        for k in range(n + 1):
            X = homogeneous(n, k, rng)
            out = B.cross(X)
            assert (out - out.grade(k)).norm_inf() < TOL
