"""Tests for non-proper value certification and line sampling"""

import numpy as np
import pytest

from cubiclin.core.exact import FloatVector, Matrix, Vector
from cubiclin.errors import CertificateInvalid, NonConvergent, NotInKernel, PreconditionViolated
from cubiclin.properness.criterion import PropernessCertificate, Refusal, RefusalReason
from cubiclin.properness.structure import (
    LineSign,
    NonProperLine,
    NonProperValueReport,
    certify_zero_nonproper,
    find_certificate,
    nonproper_line,
    sample_lines,
    shift_lifted_witness,
)
from cubiclin.properness.witness import WitnessSequence, lift_witness


def block_diagonal(a, b):
    m, n = a.size, b.size
    return Matrix.from_rows([list(row) + [0] * n for row in a.rows] + [[0] * m + list(row) for row in b.rows])


@pytest.fixture
def report(ref_matrix):
    return certify_zero_nonproper(ref_matrix)


class TestFindCertificate:
    def test_reference(self, ref_matrix):
        cert = find_certificate(ref_matrix)
        assert isinstance(cert, PropernessCertificate)
        assert cert.x_inf == Vector.ones(3)

    @pytest.mark.parametrize("matrix", [Matrix.identity(3), Matrix.zeros(3)])
    def test_negative_controls(self, matrix):
        outcome = find_certificate(matrix)
        assert isinstance(outcome, Refusal)
        assert outcome.reason is RefusalReason.INCONCLUSIVE
        assert outcome.detail.startswith("0 candidates")

    @pytest.mark.parametrize("seed", range(10))
    def test_corank_two_any_seed(self, ref_matrix, seed):
        # Ker(A) = {(a,a,a,b,b,b)}, a plane with no exact candidate among its basis vectors
        A = block_diagonal(ref_matrix, ref_matrix)
        cert = find_certificate(A, seed=seed)
        assert isinstance(cert, PropernessCertificate)
        x = cert.x_inf
        assert x[0] == x[1] == x[2] and x[3] == x[4] == x[5]

    def test_irrational_candidates_skipped(self):
        A = Matrix.from_rows([[2, -1, 0], [0, 1, -1], [0, 1, -1]])
        outcome = find_certificate(A)
        assert isinstance(outcome, Refusal)
        assert "irrational candidate" in outcome.detail


class TestZeroIsNonProper:
    """0 is a non-proper value of F_A for the worked instance"""

    def test_report(self, report, ref_matrix):
        assert isinstance(report, NonProperValueReport)
        assert report.zero_is_nonproper
        assert report.lifted.anchor == Vector.zeros(3)
        distances = report.lifted.anchor_distances()
        assert distances == sorted(distances, reverse=True)
        # Ker(A) is the line through (1,1,1), parallel to -x_inf^3
        assert len(report.lines) == 1
        assert report.lines[0].direction == -Vector.ones(3)

    def test_json(self, report):
        data = report.to_dict()
        assert data["zero_is_nonproper"] is True
        assert data["kernel_basis"] == [["1", "1", "1"]]
        assert data["certificate"]["x_inf"] == {"coords": ["1", "1", "1"]}
        assert len(data["lifted"]["records"]) == 4

    def test_kernel_plane_without_rational_direction(self):
        # Ker(A) = span(e2 - e1, e3 - e1) misses the cube of every direction in Im(A) = span(1,1,1)
        A = Matrix.from_rows([[1, 1, 1], [1, 1, 1], [1, 1, 1]])
        outcome = certify_zero_nonproper(A, gammas=(10, 100), count=32)
        assert isinstance(outcome, Refusal)
        assert outcome.reason is RefusalReason.INCONCLUSIVE

    def test_refusal_for_identity(self, identity3):
        assert isinstance(certify_zero_nonproper(identity3), Refusal)

    def test_monotone_anchor_required(self, report):
        reversed_lw = type(report.lifted)(report.lifted.A, tuple(reversed(report.lifted.records)))
        with pytest.raises(CertificateInvalid):
            NonProperValueReport(report.lines, report.kernel_basis, report.certificate, reversed_lw)


class TestLines:
    """Limits of F_A((1 - t/||z||) z) lie on anchor + R direction"""

    @pytest.mark.parametrize("t", [-2, -1, 1, 2])
    def test_line_contract(self, report, ref_matrix, t):
        sample = nonproper_line(ref_matrix, report.lifted, t)
        assert sample.fit_residual <= 0.05
        assert sample.collinearity_residual <= 0.05
        assert abs(sample.magnitude_ratio - 1.0) <= 0.05
        expected = 2 * t * np.ones(3) / np.sqrt(3)
        # z/||z|| tends to -(1,1,1)/sqrt(3) and the limit is +2t along it
        np.testing.assert_allclose(sample.limit.as_array(), -expected, atol=0.1)
        assert sample.line.empirical_sign is LineSign.PLUS

    def test_signs_consistent(self, report, ref_matrix):
        samples = sample_lines(ref_matrix, report.lifted, (-2, -1, 1, 2))
        assert {s.line.empirical_sign for s in samples} == {LineSign.PLUS}
        assert samples[0].to_dict()["line"]["empirical_sign"] == "+2"

    def test_t_zero_returns_anchor(self, report, ref_matrix):
        sample = nonproper_line(ref_matrix, report.lifted, 0)
        assert np.linalg.norm(sample.limit.as_array()) < 0.05
        assert sample.line.empirical_sign is LineSign.UNDETERMINED

    def test_too_few_records(self, report, ref_matrix):
        with pytest.raises(PreconditionViolated):
            nonproper_line(ref_matrix, report.lifted, 1, n_points=0)

    def test_short_witness_does_not_converge(self, ref_cert, ref_matrix):
        lw = lift_witness(ref_matrix, WitnessSequence(ref_cert, (1,)))
        with pytest.raises(NonConvergent):
            nonproper_line(ref_matrix, lw, 2)

    def test_zero_direction_refused(self):
        with pytest.raises(PreconditionViolated):
            NonProperLine(Vector.zeros(2), FloatVector((0.0, 0.0)))


class TestKernelShift:
    def test_anchor_moves(self, report, ref_matrix):
        w = Vector.of(2, 2, 2)
        shifted = shift_lifted_witness(ref_matrix, report.lifted, w)
        assert shifted.anchor == w
        for old, new in zip(report.lifted.records, shifted.records):
            assert new.z == old.z + w
            assert new.v_small == old.v_small + w
        distances = shifted.anchor_distances()
        assert distances == report.lifted.anchor_distances()

    def test_shift_must_be_in_kernel(self, report, ref_matrix):
        with pytest.raises(NotInKernel):
            shift_lifted_witness(ref_matrix, report.lifted, Vector.of(1, 0, 0))

    def test_shifted_lines(self, report, ref_matrix):
        shifted = shift_lifted_witness(ref_matrix, report.lifted, Vector.of(-1, -1, -1))
        sample = nonproper_line(ref_matrix, shifted, 1)
        assert np.linalg.norm(sample.limit.as_array() - np.array([-1.0, -1.0, -1.0])) == pytest.approx(2.0, rel=0.05)
