"""Tests for kernel/image bases, decomposition and restricted solves"""

from fractions import Fraction

import pytest

from cubiclin.core.exact import FloatVector, Matrix, Vector
from cubiclin.core.subspace import (
    MembershipMode,
    SubspaceBasis,
    SubspaceLabel,
    colspace_basis,
    decompose,
    in_subspace,
    kernel_basis,
    project_onto,
    rank,
    restricted_solve_matrix,
    rowspace_basis,
    solve_in_subspace,
)
from cubiclin.errors import DimensionMismatch, PreconditionViolated
from cubiclin.family.construct import sample_family


class TestBases:
    """Exact bases and rank-nullity"""

    def test_reference_matrix(self, ref_matrix):
        assert rank(ref_matrix) == 2
        kernel = kernel_basis(ref_matrix)
        assert kernel.label is SubspaceLabel.KERNEL
        assert list(kernel) == [Vector.of(1, 1, 1)]
        rows = rowspace_basis(ref_matrix)
        assert list(rows) == [Vector.of(1, -5, 4), Vector.of(2, -5, 3)]
        cols = colspace_basis(ref_matrix)
        assert cols.dim == 2
        assert cols.contains(Vector.of(1, 0, 1))
        assert not cols.contains(Vector.of(1, 0, 0))

    @pytest.mark.parametrize("rows", [
        [[1, 2], [2, 4]],
        [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
        [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        [[3, 1, 4], [1, 5, 9], [2, 6, 5]],
        [[1, 2, 3, 4], [2, 4, 6, 8], [0, 1, 0, 1], [1, 3, 3, 5]],
    ])
    def test_rank_nullity(self, rows):
        A = Matrix.from_rows(rows)
        kernel = kernel_basis(A)
        assert rank(A) + kernel.dim == A.size
        for k in kernel:
            assert (A @ k).is_zero()
        assert rowspace_basis(A).dim == colspace_basis(A).dim == rank(A)

    def test_rowspace_meets_kernel_only_at_zero(self, ref_matrix, rng):
        matrices = [ref_matrix, Matrix.identity(3)] + [s.matrix for s in sample_family(4, seed=5)]
        for _ in range(4):
            r1 = [rng.randint(-9, 9) for _ in range(4)]
            r2 = [rng.randint(-9, 9) for _ in range(4)]
            matrices.append(Matrix.from_rows([r1, r2, [a + b for a, b in zip(r1, r2)], [a - b for a, b in zip(r1, r2)]]))
        for A in matrices:
            rows = rowspace_basis(A)
            for _ in range(20):
                z = rows.combine([Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(rows.dim)])
                if not z.is_zero():
                    assert not (A @ z).is_zero()

    def test_dependent_vectors_refused(self):
        with pytest.raises(PreconditionViolated):
            SubspaceBasis(2, (Vector.of(1, 2), Vector.of(2, 4)))
        with pytest.raises(PreconditionViolated):
            SubspaceBasis(2, (Vector.of(0, 0),))
        with pytest.raises(DimensionMismatch):
            SubspaceBasis(2, (Vector.of(1, 2, 3),))

    def test_span_drops_dependent(self):
        V = SubspaceBasis.span(3, [Vector.of(1, 0, 0), Vector.of(2, 0, 0), Vector.of(0, 1, 1)])
        assert V.dim == 2


class TestDecomposition:
    def test_orthogonal_split(self, ref_matrix):
        x = Vector.of(3, "-1/2", 7)
        z, u = decompose(x, ref_matrix)
        assert z + u == x
        assert (ref_matrix @ z).is_zero()
        assert z.dot(u) == 0
        assert rowspace_basis(ref_matrix).contains(u)

    def test_projection_of_member_is_identity(self, ref_matrix):
        rows = rowspace_basis(ref_matrix)
        x = Vector.of(1, -2, 1)
        assert project_onto(x, rows) == x


class TestMembership:
    """Exact and tolerance membership tests"""

    def test_exact(self, ref_matrix):
        image = colspace_basis(ref_matrix)
        assert in_subspace(Vector.of(2, 9, 2), image).member
        result = in_subspace(Vector.of(1, 0, 0), image)
        assert not result.member
        assert result.residual > 0

    def test_tolerance(self, ref_matrix):
        image = colspace_basis(ref_matrix)
        near = FloatVector((1.0, 3.0, 1.0 + 1e-13))
        assert in_subspace(near, image).member
        far = FloatVector((1.0, 3.0, 1.1))
        assert not in_subspace(far, image).member
        assert in_subspace(Vector.of(1, 3, 1), image, MembershipMode.TOLERANCE).member

    def test_empty_basis(self):
        empty = SubspaceBasis(3, ())
        assert in_subspace(Vector.zeros(3), empty).member
        assert not in_subspace(Vector.of(0, 1, 0), empty).member

    def test_bad_tolerance(self, ref_matrix):
        with pytest.raises(PreconditionViolated):
            in_subspace(Vector.of(1, 0, 1), colspace_basis(ref_matrix), "tol", tolerance=0)


class TestRestrictedSolve:
    def test_min_norm_in_rowspace(self, ref_matrix):
        rows = rowspace_basis(ref_matrix)
        y = solve_in_subspace(ref_matrix, rows, Vector.ones(3))
        assert y == Vector.of(1, -2, 1).scale(Fraction(1, 15))
        ya = solve_in_subspace(ref_matrix, rows, Vector.of(1, 0, 1).scale(Fraction(1, 5)))
        assert ya == Vector.of(-8, 1, 7).scale(Fraction(1, 75))

    def test_min_norm_in_image(self, ref_matrix):
        # A is singular on Im(A); the solution is the one orthogonal to (1,1,1)
        v = solve_in_subspace(ref_matrix, colspace_basis(ref_matrix), -Vector.ones(3))
        assert v == Vector.of(-1, 2, -1).scale(Fraction(1, 15))

    def test_no_shorter_solution_in_subspace(self, ref_matrix, rng):
        # Both subspaces meet Ker(M) in a line, so solutions in V form v0 + t k
        zero = Fraction(0)
        padded = Matrix(tuple(row + (zero,) for row in ref_matrix.rows) + ((zero, zero, zero, Fraction(1)),))
        cases = [
            (ref_matrix, SubspaceBasis(3, tuple(Vector.unit(3, i) for i in range(3))), Vector.ones(3)),
            (padded, SubspaceBasis(4, tuple(Vector.unit(4, i) for i in range(3))), Vector.of(1, 1, 1, 0)),
        ]
        for M, V, k in cases:
            for _ in range(10):
                y = V.combine([Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(V.dim)])
                target = M @ y
                v0 = solve_in_subspace(M, V, target)
                assert V.contains(v0) and M @ v0 == target
                for _ in range(10):
                    other = v0 + k.scale(Fraction(rng.randint(-50, 50), rng.randint(1, 10)))
                    assert M @ other == target
                    assert v0.norm_squared() <= other.norm_squared()

    def test_no_solution(self, ref_matrix):
        rows = rowspace_basis(ref_matrix)
        assert solve_in_subspace(ref_matrix, rows, Vector.of(1, 0, 0)) is None

    def test_solve_matrix(self, ref_matrix):
        M = restricted_solve_matrix(ref_matrix, rowspace_basis(ref_matrix))
        assert M == Matrix.from_rows([[42, 39], [39, 38]])
        assert restricted_solve_matrix(Matrix.zeros(2), rowspace_basis(Matrix.zeros(2))) is None
