#!/usr/bin/env python3
"""
exact.py - Exact rational vectors and matrices for cubiclin

Scalars are ``fractions.Fraction`` values, which are always kept in lowest
terms with a positive denominator. ``Vector`` and ``Matrix`` are immutable
containers of scalars; ``FloatVector`` is the numeric mirror used for decay
tables and for coordinatewise roots that are not rational.
"""

import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, List, Sequence, Tuple, Union

import numpy as np
import sympy
from sympy import integer_nthroot

from ..errors import (
    DimensionMismatch,
    EvenRootRequested,
    MalformedInput,
    PreconditionViolated,
    ZeroToNegativePower,
)

ExactScalar = Fraction
ScalarLike = Union[int, Fraction, str]


def to_scalar(value) -> Fraction:
    """Convert a value to an exact scalar

    Accepts integers, fractions, sympy rationals and strings such as
    ``"-5"`` or ``"3/7"``. Floats are converted exactly (binary value).

    Raises:
        MalformedInput: If the value has no exact rational reading
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise MalformedInput(f"Booleans are not scalars: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise MalformedInput(f"Not an exact rational: {value!r} ({e})")
    if isinstance(value, float):
        if not math.isfinite(value):
            raise MalformedInput(f"Non-finite value: {value!r}")
        return Fraction(value)
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, numbers.Rational):
        return Fraction(int(value.numerator), int(value.denominator))
    raise MalformedInput(f"Cannot read {value!r} as an exact rational")


def scalar_to_str(value: Fraction) -> str:
    """Canonical string form: ``"-5"`` or ``"3/7"``"""
    return str(value)


@dataclass(frozen=True)
class Vector:
    """Immutable exact m-vector"""

    coords: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(to_scalar(c) for c in self.coords))

    @classmethod
    def of(cls, *values: ScalarLike) -> "Vector":
        return cls(tuple(values))

    @classmethod
    def zeros(cls, m: int) -> "Vector":
        return cls((0,) * m)

    @classmethod
    def ones(cls, m: int) -> "Vector":
        return cls((1,) * m)

    @classmethod
    def unit(cls, m: int, i: int) -> "Vector":
        return cls(tuple(1 if j == i else 0 for j in range(m)))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.coords)

    def __getitem__(self, i: int) -> Fraction:
        return self.coords[i]

    def _check(self, other: "Vector") -> None:
        if not isinstance(other, Vector):
            raise TypeError(f"Expected Vector, got {type(other).__name__}")
        if len(other) != len(self):
            raise DimensionMismatch(f"Vector lengths differ: {len(self)} vs {len(other)}")

    def __add__(self, other: "Vector") -> "Vector":
        self._check(other)
        return Vector(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Vector") -> "Vector":
        self._check(other)
        return Vector(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Vector":
        return Vector(tuple(-a for a in self.coords))

    def scale(self, c: ScalarLike) -> "Vector":
        c = to_scalar(c)
        return Vector(tuple(c * a for a in self.coords))

    def __mul__(self, c):
        # Hadamard products go through hadamard_mul, never through '*'
        if isinstance(c, (Vector, FloatVector)):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __truediv__(self, c: ScalarLike) -> "Vector":
        return self.scale(1 / to_scalar(c))

    def dot(self, other: "Vector") -> Fraction:
        self._check(other)
        return sum((a * b for a, b in zip(self.coords, other.coords)), Fraction(0))

    def norm_squared(self) -> Fraction:
        return self.dot(self)

    def norm(self) -> float:
        return math.sqrt(float(self.norm_squared()))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def has_zero_coordinate(self) -> bool:
        return any(c == 0 for c in self.coords)

    def to_float(self) -> "FloatVector":
        return FloatVector(tuple(float(c) for c in self.coords))

    def to_strings(self) -> List[str]:
        return [scalar_to_str(c) for c in self.coords]

    def __repr__(self) -> str:
        return f"Vector({', '.join(self.to_strings())})"


@dataclass(frozen=True)
class FloatVector:
    """Double-precision vector

    Entries are finite unless ``overflowed`` is set. ``inexact`` marks values
    that stand in for an irrational exact result.
    """

    coords: Tuple[float, ...]
    inexact: bool = False
    overflowed: bool = False

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if not self.overflowed and not all(math.isfinite(c) for c in coords):
            raise PreconditionViolated("FloatVector holds non-finite entries without the overflow flag")

    @classmethod
    def from_array(cls, values, inexact: bool = False) -> "FloatVector":
        arr = np.asarray(values, dtype=float)
        return cls(tuple(arr.tolist()), inexact=inexact, overflowed=not bool(np.all(np.isfinite(arr))))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self) -> Iterator[float]:
        return iter(self.coords)

    def __getitem__(self, i: int) -> float:
        return self.coords[i]

    def as_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=float)

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))


AnyVector = Union[Vector, FloatVector]


def as_array(x: AnyVector) -> np.ndarray:
    """Numeric view of an exact or float vector"""
    if isinstance(x, Vector):
        return np.array([float(c) for c in x.coords], dtype=float)
    return x.as_array()


@dataclass(frozen=True)
class Matrix:
    """Immutable exact square matrix"""

    rows: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(to_scalar(c) for c in row) for row in self.rows)
        if not rows:
            raise PreconditionViolated("Matrix must have at least one row")
        m = len(rows)
        for row in rows:
            if len(row) != m:
                raise DimensionMismatch(f"Matrix must be square; got a row of length {len(row)} in a {m}-row matrix")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[ScalarLike]]) -> "Matrix":
        return cls(tuple(tuple(row) for row in rows))

    @classmethod
    def from_columns(cls, columns: Sequence[Vector]) -> "Matrix":
        m = len(columns)
        return cls(tuple(tuple(columns[j][i] for j in range(m)) for i in range(m)))

    @classmethod
    def identity(cls, m: int) -> "Matrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(m)) for i in range(m)))

    @classmethod
    def zeros(cls, m: int) -> "Matrix":
        return cls(tuple((0,) * m for _ in range(m)))

    @property
    def size(self) -> int:
        return len(self.rows)

    def row(self, i: int) -> Vector:
        return Vector(self.rows[i])

    def column(self, j: int) -> Vector:
        return Vector(tuple(row[j] for row in self.rows))

    def transpose(self) -> "Matrix":
        return Matrix(tuple(zip(*self.rows)))

    def __matmul__(self, other):
        if isinstance(other, Vector):
            if len(other) != self.size:
                raise DimensionMismatch(f"Cannot apply a {self.size}x{self.size} matrix to a {len(other)}-vector")
            return Vector(tuple(
                sum((a * b for a, b in zip(row, other.coords)), Fraction(0)) for row in self.rows
            ))
        if isinstance(other, Matrix):
            if other.size != self.size:
                raise DimensionMismatch(f"Matrix sizes differ: {self.size} vs {other.size}")
            cols = list(zip(*other.rows))
            return Matrix(tuple(
                tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols)
                for row in self.rows
            ))
        return NotImplemented

    def __add__(self, other: "Matrix") -> "Matrix":
        if other.size != self.size:
            raise DimensionMismatch(f"Matrix sizes differ: {self.size} vs {other.size}")
        return Matrix(tuple(
            tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.rows, other.rows)
        ))

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def scale(self, c: ScalarLike) -> "Matrix":
        c = to_scalar(c)
        return Matrix(tuple(tuple(c * a for a in row) for row in self.rows))

    def power(self, k: int) -> "Matrix":
        if k < 0:
            raise PreconditionViolated("Only non-negative matrix powers are supported")
        result = Matrix.identity(self.size)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def trace(self) -> Fraction:
        return sum((self.rows[i][i] for i in range(self.size)), Fraction(0))

    def det(self) -> Fraction:
        return to_scalar(self.to_sympy().det(method="bareiss"))

    def is_zero(self) -> bool:
        return all(c == 0 for row in self.rows for c in row)

    def is_nilpotent(self) -> bool:
        """M is nilpotent iff M^m = 0"""
        return self.power(self.size).is_zero()

    def to_sympy(self) -> sympy.Matrix:
        return sympy.Matrix([[sympy.Rational(c.numerator, c.denominator) for c in row] for row in self.rows])

    def to_float(self) -> np.ndarray:
        return np.array([[float(c) for c in row] for row in self.rows], dtype=float)

    def to_strings(self) -> List[List[str]]:
        return [[scalar_to_str(c) for c in row] for row in self.rows]

    def __repr__(self) -> str:
        return f"Matrix({self.to_strings()})"


def hadamard_mul(x: Vector, y: Vector) -> Vector:
    """Coordinatewise product x*y

    Raises:
        DimensionMismatch: If the vectors differ in length
    """
    if len(x) != len(y):
        raise DimensionMismatch(f"Vector lengths differ: {len(x)} vs {len(y)}")
    return Vector(tuple(a * b for a, b in zip(x.coords, y.coords)))


def _exact_root(c: Fraction, q: int):
    """Signed q-th root of c when it is rational, else None"""
    if c == 0:
        return Fraction(0)
    num_root, num_exact = integer_nthroot(abs(c.numerator), q)
    den_root, den_exact = integer_nthroot(c.denominator, q)
    if not (num_exact and den_exact):
        return None
    root = Fraction(int(num_root), int(den_root))
    return -root if c < 0 else root


def hadamard_pow(x: Vector, p: int, q: int = 1) -> AnyVector:
    """Coordinatewise signed power x^(p/q)

    Args:
        x: Exact vector
        p: Integer numerator of the exponent
        q: Odd positive denominator of the exponent

    Returns:
        An exact ``Vector`` when every coordinate has a rational q-th root,
        otherwise a ``FloatVector`` flagged ``inexact``

    Raises:
        EvenRootRequested: If q is even
        ZeroToNegativePower: If p < 0 and some coordinate is zero
    """
    if q % 2 == 0:
        raise EvenRootRequested(f"Signed roots need an odd denominator, got q={q}")
    if q < 0:
        raise PreconditionViolated(f"Root denominator must be positive, got q={q}")
    if p < 0 and x.has_zero_coordinate():
        raise ZeroToNegativePower("Cannot raise a zero coordinate to a negative power")

    roots = []
    for c in x.coords:
        root = _exact_root(c, q)
        if root is None:
            break
        roots.append(root)
    else:
        return Vector(tuple(r ** p for r in roots))

    arr = np.array([float(c) for c in x.coords], dtype=float)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        root = np.sign(arr) * np.abs(arr) ** (1.0 / q)
        values = root ** p
    return FloatVector.from_array(values, inexact=True)


def diag(x: Vector) -> Matrix:
    """Diagonal matrix with x on the diagonal"""
    m = len(x)
    return Matrix(tuple(tuple(x[i] if i == j else 0 for j in range(m)) for i in range(m)))
