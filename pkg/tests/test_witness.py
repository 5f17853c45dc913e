"""Tests for witness sequences, kernel pairs, the lift and decay tables"""

import csv
import io
from fractions import Fraction

import pytest

from cubiclin.core.exact import FloatVector, Matrix, Vector
from cubiclin.errors import CertificateInvalid, DimensionMismatch, NotInImage, PreconditionViolated
from cubiclin.family.construct import reference_lift_closed_form
from cubiclin.maps.cubic import cube
from cubiclin.properness.witness import (
    CSV_HEADER,
    KernelPairRow,
    LiftedWitness,
    LiftRecord,
    WitnessSequence,
    build_dual_witness,
    check_gammas,
    decay_csv,
    decay_slope,
    decay_table,
    dual_to_kernel_pair,
    gram_matrix,
    kernel_pair_to_dual,
    kernel_pair_value,
    kernel_pair_values,
    kernel_pair_witness,
    lift_points,
    lift_witness,
    recover_criterion_pair,
)


class TestGammas:
    def test_checked(self):
        assert check_gammas([1, "10", 100]) == (1, 10, 100)
        for bad in ([], [0, 1], [10, 10], [10, 1], [-1]):
            with pytest.raises(PreconditionViolated):
                check_gammas(bad)


class TestDualWitness:
    """Points g x_inf + v/(3g) and their dual-map values"""

    def test_points(self, ref_cert):
        ws = WitnessSequence(ref_cert, (1, 10))
        assert ws.point(1) == Vector.of("14/15", 1, "14/15")
        assert len(ws.points()) == 2

    def test_values_decay(self, minnorm_cert):
        _, rows = build_dual_witness(minnorm_cert, (10, 100, 1000))
        norms = [row.norm_value for row in rows]
        assert norms[0] > norms[1] > norms[2] > 0
        assert norms[1] * 100 == pytest.approx(norms[2] * 1000, rel=0.01)
        assert rows[0].to_dict()["gamma"] == "10"

    def test_needs_certificate(self, ref_matrix):
        with pytest.raises(PreconditionViolated):
            WitnessSequence(ref_matrix, (1,))


class TestKernelPairs:
    """z(g) = g^3 x_inf^3 with companion v/g"""

    @pytest.mark.parametrize("cert_name", ["ref_cert", "minnorm_cert"])
    def test_identity_is_exact(self, request, cert_name):
        cert = request.getfixturevalue(cert_name)
        rows = kernel_pair_witness(cert, (1, 10, 100))
        for row, g in zip(rows, (1, 10, 100)):
            assert row.value == Vector.zeros(3)
            assert row.z == Vector.ones(3).scale(g ** 3)
            assert (cert.A @ row.z).is_zero()

    def test_invalid_pair_grows(self, ref_matrix):
        rows = kernel_pair_values(ref_matrix, Vector.ones(3), Vector.zeros(3), (1, 10))
        assert rows[0].value == Vector.ones(3)
        assert rows[1].value == Vector.ones(3).scale(10)

    def test_dimension_mismatch(self, ref_matrix):
        with pytest.raises(DimensionMismatch):
            kernel_pair_values(ref_matrix, Vector.ones(2), Vector.ones(3))

    def test_pair_to_dual_regenerates_sequence(self, ref_cert):
        ws = WitnessSequence(ref_cert, (2, 10))
        for row, x in zip(kernel_pair_witness(ref_cert, (2, 10)), ws.points()):
            assert kernel_pair_to_dual(ref_cert.A, row.z, row.v_n) == x

    def test_dual_to_pair_is_bounded(self, ref_cert):
        ws = WitnessSequence(ref_cert, (10, 100, 1000))
        rows = dual_to_kernel_pair(ref_cert.A, ws.points())
        for row in rows:
            assert (ref_cert.A @ row.z).is_zero()
            assert row.v_n.scale(Fraction(1, 3)) in ws.points()
        values = [r.value.norm() for r in rows]
        assert max(values) < 10

    def test_recover_pair(self, minnorm_cert):
        rows = kernel_pair_witness(minnorm_cert, (10, 1000))
        recovered = recover_criterion_pair(minnorm_cert.A, rows)
        assert recovered.residual < 1e-9
        assert list(recovered.x_unit.coords) == pytest.approx([3 ** -0.5] * 3)
        with pytest.raises(PreconditionViolated):
            recover_criterion_pair(minnorm_cert.A, [])


class TestLift:
    """Exact lift to points z with F_A(z) = v_small"""

    def test_lift_is_exact(self, minnorm_cert):
        ws = WitnessSequence(minnorm_cert, (1, 10, 100))
        lw = lift_witness(minnorm_cert.A, ws)
        A = minnorm_cert.A
        for rec in lw.records:
            assert rec.z + cube(A @ rec.z) == rec.v_small
            assert (A @ rec.x_ker).is_zero()
        norms_z = [rec.z.norm() for rec in lw.records]
        norms_v = [rec.v_small.norm() for rec in lw.records]
        assert norms_z == sorted(norms_z)
        assert norms_v == sorted(norms_v, reverse=True)
        assert lw.anchor == Vector.zeros(3)
        assert lw.gram_matrix == Matrix.from_rows([[42, 39], [39, 38]])

    def test_gram_matrix(self, ref_matrix):
        assert gram_matrix(ref_matrix) == Matrix.from_rows([[42, 39], [39, 38]])

    def test_closed_form_matches_generic(self, ref_cert):
        gammas = (1, 10, 100)
        generic = lift_witness(ref_cert.A, WitnessSequence(ref_cert, gammas))
        closed = reference_lift_closed_form(gammas=gammas)
        assert generic.records == closed.records

    def test_records_reverified(self, ref_cert):
        lw = lift_witness(ref_cert.A, WitnessSequence(ref_cert, (10,)))
        rec = lw.records[0]
        broken = LiftRecord(rec.gamma, rec.u, rec.y, rec.v_small + Vector.of(1, 0, 0), rec.x_ker, rec.z)
        with pytest.raises(CertificateInvalid):
            LiftedWitness(ref_cert.A, (broken,))
        assert LiftRecord.from_dict(rec.to_dict()) == rec

    def test_points_outside_image(self, ref_matrix):
        with pytest.raises(NotInImage):
            lift_points(ref_matrix, (1,), [Vector.of(1, 0, 0)])

    def test_threaded_lift_matches(self, ref_cert):
        ws = WitnessSequence(ref_cert, (10, 100, 1000))
        assert lift_witness(ref_cert.A, ws, workers=3).records == lift_witness(ref_cert.A, ws).records


class TestDecay:
    def test_slope(self, minnorm_cert):
        rows = decay_table(minnorm_cert)
        assert [row.gamma for row in rows] == [1e2, 1e3, 1e4, 1e5]
        slope = decay_slope([r.gamma for r in rows], [r.norm_fhat for r in rows])
        assert -1.05 <= slope <= -0.95
        assert all(r.norm_z > r.norm_x for r in rows)
        fa = [r.norm_FA_z for r in rows]
        assert fa == sorted(fa, reverse=True)

    def test_csv(self, ref_cert):
        text = decay_csv(decay_table(ref_cert, (10, 100)))
        parsed = list(csv.reader(io.StringIO(text)))
        assert tuple(parsed[0]) == CSV_HEADER
        assert len(parsed) == 3
        assert float(parsed[1][0]) == 10.0
        assert text.endswith("\n") and "\r" not in text

    def test_slope_needs_two_points(self):
        with pytest.raises(PreconditionViolated):
            decay_slope([10], [1.0])
        assert decay_slope([1, 10, 100], [1.0, 0.1, 0.01]) == pytest.approx(-1.0)


def test_kernel_pair_row_json(ref_cert):
    row = kernel_pair_witness(ref_cert, (2,))[0]
    data = row.to_dict()
    assert data["exact"] is True
    assert data["value"] == ["0", "0", "0"]
    assert data["z"] == ["8", "8", "8"]


def test_irrational_kernel_pair_is_inexact(ref_matrix):
    z = Vector.of(2, 2, 2)
    value = kernel_pair_value(ref_matrix, z, Vector.zeros(3))
    assert isinstance(value, FloatVector)
    assert value.inexact
    assert KernelPairRow(z, Vector.zeros(3), value).to_dict()["exact"] is False
