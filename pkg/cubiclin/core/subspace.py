#!/usr/bin/env python3
"""
subspace.py - Exact subspace computations for cubiclin

Kernel, row space and column space bases, the kernel/row-space orthogonal
decomposition, membership tests and minimum-norm solves restricted to a
subspace. Elimination is done by sympy's reduced row echelon form over the
rationals, so basis ordering follows the pivot order and is reproducible.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from ..errors import DimensionMismatch, PreconditionViolated
from .exact import AnyVector, FloatVector, Matrix, Vector, as_array, to_scalar

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-9

Rows = List[List[Fraction]]


class SubspaceLabel(str, Enum):
    KERNEL = "kernel"
    ROWSPACE = "rowspace"
    COLSPACE = "colspace"
    CUSTOM = "custom"


class MembershipMode(str, Enum):
    EXACT = "exact"
    TOLERANCE = "tol"


class MembershipResult(NamedTuple):
    member: bool
    residual: float


def rref(rows: Sequence[Sequence[Fraction]]) -> Tuple[Rows, Tuple[int, ...]]:
    """Reduced row echelon form of a rational matrix given as rows

    Returns:
        Tuple of (reduced rows, pivot column indices)
    """
    if not rows or not rows[0]:
        return [list(r) for r in rows], ()
    mat = sympy.Matrix([[sympy.Rational(c.numerator, c.denominator) for c in row] for row in rows])
    reduced, pivots = mat.rref()
    out = [[to_scalar(reduced[i, j]) for j in range(mat.cols)] for i in range(mat.rows)]
    return out, tuple(pivots)


def rank_of_rows(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(rref(rows)[1])


def rank(A: Matrix) -> int:
    """Exact rank of a matrix"""
    return rank_of_rows(A.rows)


def _columns_to_rows(vectors: Sequence[Vector], m: int) -> Rows:
    """m x k row layout of the matrix whose columns are ``vectors``"""
    return [[v[i] for v in vectors] for i in range(m)]


def _combine(vectors: Sequence[Vector], coeffs: Sequence[Fraction], m: int) -> Vector:
    total = [Fraction(0)] * m
    for v, c in zip(vectors, coeffs):
        if c:
            for i in range(m):
                total[i] += c * v[i]
    return Vector(tuple(total))


def _nullspace_from_rref(reduced: Rows, pivots: Tuple[int, ...], ncols: int) -> List[List[Fraction]]:
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for i, p in enumerate(pivots):
            vec[p] = -reduced[i][f]
        basis.append(vec)
    return basis


def solve_linear(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]):
    """Solve rows . c = rhs exactly

    Returns:
        Tuple of (particular solution with free variables at zero,
        nullspace basis), or None when the system is inconsistent
    """
    ncols = len(rows[0]) if rows else 0
    augmented = [list(r) + [b] for r, b in zip(rows, rhs)]
    reduced, pivots = rref(augmented)
    if ncols in pivots:
        return None
    particular = [Fraction(0)] * ncols
    for i, p in enumerate(pivots):
        particular[p] = reduced[i][ncols]
    coeff_rows = [row[:ncols] for row in reduced]
    return particular, _nullspace_from_rref(coeff_rows, pivots, ncols)


@dataclass(frozen=True)
class SubspaceBasis:
    """Ordered, linearly independent exact basis of a subspace of Q^m"""

    ambient_dim: int
    vectors: Tuple[Vector, ...]
    label: SubspaceLabel = SubspaceLabel.CUSTOM

    def __post_init__(self):
        vectors = tuple(self.vectors)
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "label", SubspaceLabel(self.label))
        for v in vectors:
            if len(v) != self.ambient_dim:
                raise DimensionMismatch(f"Basis vector of length {len(v)} in ambient dimension {self.ambient_dim}")
            if v.is_zero():
                raise PreconditionViolated("Basis vectors must be nonzero")
        if vectors and rank_of_rows([list(v.coords) for v in vectors]) != len(vectors):
            raise PreconditionViolated("Basis vectors must be linearly independent")

    @classmethod
    def span(cls, ambient_dim: int, vectors: Sequence[Vector],
             label: SubspaceLabel = SubspaceLabel.CUSTOM) -> "SubspaceBasis":
        """Basis of the span of arbitrary vectors (dependent ones dropped)"""
        vectors = [v for v in vectors if not v.is_zero()]
        if not vectors:
            return cls(ambient_dim, (), label)
        _, pivots = rref(_columns_to_rows(vectors, ambient_dim))
        return cls(ambient_dim, tuple(vectors[j] for j in pivots), label)

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def column_rows(self) -> Rows:
        return _columns_to_rows(self.vectors, self.ambient_dim)

    def combine(self, coeffs: Sequence[Fraction]) -> Vector:
        return _combine(self.vectors, coeffs, self.ambient_dim)

    def contains(self, x: Vector) -> bool:
        return in_subspace(x, self).member

    def gram(self) -> Rows:
        return [[a.dot(b) for b in self.vectors] for a in self.vectors]


def kernel_basis(A: Matrix) -> SubspaceBasis:
    """Exact basis of Ker(A), one vector per free column of rref(A)"""
    reduced, pivots = rref(A.rows)
    vectors = tuple(Vector(tuple(v)) for v in _nullspace_from_rref(reduced, pivots, A.size))
    return SubspaceBasis(A.size, vectors, SubspaceLabel.KERNEL)


def rowspace_basis(A: Matrix) -> SubspaceBasis:
    """Basis of Im(A^T): the rows of A at the pivot positions of rref(A^T)"""
    _, pivots = rref(A.transpose().rows)
    return SubspaceBasis(A.size, tuple(A.row(i) for i in pivots), SubspaceLabel.ROWSPACE)


def colspace_basis(A: Matrix) -> SubspaceBasis:
    """Basis of Im(A): the columns of A at the pivot positions of rref(A)"""
    _, pivots = rref(A.rows)
    return SubspaceBasis(A.size, tuple(A.column(j) for j in pivots), SubspaceLabel.COLSPACE)


def project_onto(x: Vector, basis: SubspaceBasis) -> Vector:
    """Exact orthogonal projection of x onto span(basis)"""
    if len(x) != basis.ambient_dim:
        raise DimensionMismatch(f"Vector of length {len(x)} against ambient dimension {basis.ambient_dim}")
    if basis.dim == 0:
        return Vector.zeros(basis.ambient_dim)
    rhs = [b.dot(x) for b in basis.vectors]
    particular, _ = solve_linear(basis.gram(), rhs)
    return basis.combine(particular)


def decompose(x: Vector, A: Matrix) -> Tuple[Vector, Vector]:
    """Split x = z + u with z in Ker(A), u in Im(A^T), <z,u> = 0

    Returns:
        Tuple of (z, u)
    """
    u = project_onto(x, rowspace_basis(A))
    return x - u, u


def in_subspace(x: AnyVector, basis: SubspaceBasis,
                mode: Union[MembershipMode, str] = MembershipMode.EXACT,
                tolerance: float = DEFAULT_TOLERANCE) -> MembershipResult:
    """Decide whether x lies in span(basis)

    Float vectors are always tested in tolerance mode. In tolerance mode the
    least-squares residual is compared against ``tolerance * max(1, ||x||)``.

    Returns:
        MembershipResult(member, residual)
    """
    mode = MembershipMode(mode)
    if len(x) != basis.ambient_dim:
        raise DimensionMismatch(f"Vector of length {len(x)} against ambient dimension {basis.ambient_dim}")

    if isinstance(x, FloatVector) or mode is MembershipMode.TOLERANCE:
        if tolerance <= 0:
            raise PreconditionViolated("Tolerance must be positive")
        xf = as_array(x)
        if basis.dim == 0:
            residual = float(np.linalg.norm(xf))
        else:
            B = np.array([[float(c) for c in row] for row in basis.column_rows()], dtype=float)
            coeffs, *_ = np.linalg.lstsq(B, xf, rcond=None)
            residual = float(np.linalg.norm(xf - B @ coeffs))
        scale = max(1.0, float(np.linalg.norm(xf)))
        return MembershipResult(residual <= tolerance * scale, residual)

    if basis.dim == 0:
        return MembershipResult(x.is_zero(), x.norm())
    if solve_linear(basis.column_rows(), list(x.coords)) is not None:
        return MembershipResult(True, 0.0)
    return MembershipResult(False, (x - project_onto(x, basis)).norm())


def solve_in_subspace(M: Matrix, V: SubspaceBasis, target: Vector) -> Optional[Vector]:
    """Minimum-norm v in V with M.v = target

    Returns:
        The unique solution of least Euclidean norm within V, or None when
        target is not in M(V)
    """
    m = M.size
    if V.ambient_dim != m or len(target) != m:
        raise DimensionMismatch("Matrix, subspace and target must share a dimension")
    if V.dim == 0:
        return Vector.zeros(m) if target.is_zero() else None

    images = [M @ v for v in V.vectors]
    solved = solve_linear(_columns_to_rows(images, m), list(target.coords))
    if solved is None:
        return None
    particular, null = solved
    base = V.combine(particular)
    if not null:
        return base

    # Minimize ||base + sum t_i d_i|| over the directions that M sends to zero
    directions = [V.combine(n) for n in null]
    gram = [[a.dot(b) for b in directions] for a in directions]
    rhs = [-d.dot(base) for d in directions]
    t, _ = solve_linear(gram, rhs)
    return base + _combine(directions, t, m)


def restricted_solve_matrix(M: Matrix, V: SubspaceBasis) -> Optional[Matrix]:
    """Square system solved when inverting M on V

    Columns are M applied to the basis of V, restricted to the first rows
    that are linearly independent. Returns None if M is not injective on V.
    """
    k = V.dim
    if k == 0:
        return None
    rows = _columns_to_rows([M @ v for v in V.vectors], M.size)
    _, pivots = rref([list(col) for col in zip(*rows)])
    if len(pivots) != k:
        return None
    return Matrix(tuple(tuple(rows[i]) for i in pivots))
