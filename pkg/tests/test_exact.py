"""Tests for exact vectors, matrices and coordinatewise powers"""

from fractions import Fraction

import pytest

from cubiclin.core.exact import (
    FloatVector,
    Matrix,
    Vector,
    diag,
    hadamard_mul,
    hadamard_pow,
    to_scalar,
)
from cubiclin.errors import (
    DimensionMismatch,
    EvenRootRequested,
    MalformedInput,
    PreconditionViolated,
    ZeroToNegativePower,
)


class TestScalars:
    """to_scalar accepts every exact spelling and nothing else"""

    @pytest.mark.parametrize("value,expected", [
        (3, Fraction(3)),
        ("-5", Fraction(-5)),
        ("6/8", Fraction(3, 4)),
        (Fraction(2, 3), Fraction(2, 3)),
        (0.5, Fraction(1, 2)),
    ])
    def test_accepted(self, value, expected):
        assert to_scalar(value) == expected

    @pytest.mark.parametrize("value", ["abc", "1/0", True, float("inf"), None])
    def test_rejected(self, value):
        with pytest.raises(MalformedInput):
            to_scalar(value)

    def test_lowest_terms(self):
        v = Vector.of("4/6", "-3/9")
        assert v.to_strings() == ["2/3", "-1/3"]


class TestVector:
    def test_arithmetic(self):
        a = Vector.of(1, 2, 3)
        b = Vector.of("1/2", 0, -1)
        assert a + b == Vector.of("3/2", 2, 2)
        assert a - b == Vector.of("1/2", 2, 4)
        assert -a == Vector.of(-1, -2, -3)
        assert a.scale("1/3") == Vector.of("1/3", "2/3", 1)
        assert a * 2 == 2 * a == Vector.of(2, 4, 6)
        assert a / 2 == Vector.of("1/2", 1, "3/2")
        assert a.dot(b) == Fraction(-5, 2)
        assert a.norm_squared() == 14

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatch):
            Vector.of(1, 2) + Vector.of(1, 2, 3)

    def test_star_is_not_hadamard(self):
        with pytest.raises(TypeError):
            Vector.of(1, 2) * Vector.of(3, 4)

    def test_constructors(self):
        assert Vector.zeros(2).is_zero()
        assert Vector.ones(3) == Vector.of(1, 1, 1)
        assert Vector.unit(3, 1) == Vector.of(0, 1, 0)
        assert Vector.unit(3, 1).has_zero_coordinate()


class TestMatrix:
    def test_square_only(self):
        with pytest.raises(DimensionMismatch):
            Matrix.from_rows([[1, 2, 3], [4, 5, 6]])
        with pytest.raises(PreconditionViolated):
            Matrix(())

    def test_products(self, ref_matrix):
        assert ref_matrix @ Vector.ones(3) == Vector.zeros(3)
        assert ref_matrix @ Vector.of(1, 0, 1) == Vector.of(5, 5, 5)
        assert ref_matrix @ Vector.of(0, 1, 0) == Vector.of(-5, -5, -5)
        assert Matrix.identity(3) @ ref_matrix == ref_matrix

    def test_transpose_and_columns(self, ref_matrix):
        assert ref_matrix.transpose().row(0) == ref_matrix.column(0)
        cols = [ref_matrix.column(j) for j in range(3)]
        assert Matrix.from_columns(cols) == ref_matrix

    def test_det_trace_power(self, ref_matrix):
        assert ref_matrix.det() == 0
        assert ref_matrix.trace() == 0
        assert Matrix.from_rows([[2, 1], [1, 1]]).det() == 1
        N = Matrix.from_rows([[0, 1, 5], [0, 0, 2], [0, 0, 0]])
        assert N.is_nilpotent()
        assert not N.power(2).is_zero()
        assert N.power(3).is_zero()
        assert not Matrix.identity(2).is_nilpotent()
        with pytest.raises(PreconditionViolated):
            N.power(-1)

    def test_float_mirror(self, ref_matrix):
        assert ref_matrix.to_float().tolist()[1] == [2.0, -5.0, 3.0]


class TestHadamard:
    """Signed coordinatewise powers x^(p/q)"""

    def test_product(self):
        assert hadamard_mul(Vector.of(1, -2, 3), Vector.of(4, 5, "1/3")) == Vector.of(4, -10, 1)

    def test_cube_and_signed_root(self):
        x = Vector.of(-2, "1/3", 0)
        assert hadamard_pow(x, 3) == Vector.of(-8, "1/27", 0)
        assert hadamard_pow(Vector.of(-8, "27/64", 1), 1, 3) == Vector.of(-2, "3/4", 1)
        assert hadamard_pow(Vector.of(-8, 27), 2, 3) == Vector.of(4, 9)

    def test_cube_then_cube_root_is_identity(self, rng):
        for _ in range(100):
            m = rng.randint(1, 6)
            x = Vector(tuple(Fraction(rng.randint(-999, 999), rng.randint(1, 999)) for _ in range(m)))
            assert hadamard_pow(hadamard_pow(x, 3, 1), 1, 3) == x

    def test_irrational_root_is_inexact(self):
        root = hadamard_pow(Vector.of(2, -8), 1, 3)
        assert isinstance(root, FloatVector)
        assert root.inexact
        assert root[0] == pytest.approx(2 ** (1 / 3))
        assert root[1] == pytest.approx(-2.0)

    def test_even_root_refused(self):
        with pytest.raises(EvenRootRequested):
            hadamard_pow(Vector.of(4), 1, 2)

    def test_zero_to_negative_power(self):
        with pytest.raises(ZeroToNegativePower):
            hadamard_pow(Vector.of(1, 0), -1)
        assert hadamard_pow(Vector.of(2, "-1/2"), -1) == Vector.of("1/2", -2)

    def test_diag(self):
        assert diag(Vector.of(1, 2)) == Matrix.from_rows([[1, 0], [0, 2]])


class TestFloatVector:
    def test_non_finite_needs_overflow_flag(self):
        with pytest.raises(PreconditionViolated):
            FloatVector((1.0, float("inf")))
        v = FloatVector.from_array([1.0, float("inf")])
        assert v.overflowed
