"""Tests for JSON encoding and output files"""

import json
import os

import pytest

from cubiclin.core.exact import Matrix, Vector
from cubiclin.core.subspace import kernel_basis
from cubiclin.errors import DimensionMismatch, MalformedInput
from cubiclin.utils.serialization import (
    atomic_write,
    basis_from_dict,
    basis_to_dict,
    dump_json,
    load_matrix,
    matrix_digest,
    matrix_from_dict,
    matrix_to_dict,
    vector_from_dict,
    vector_to_dict,
)


class TestEncoding:
    def test_matrix(self, ref_matrix):
        data = matrix_to_dict(ref_matrix)
        assert data == {"rows": [["1", "-5", "4"], ["2", "-5", "3"], ["1", "-5", "4"]]}
        assert matrix_from_dict(data) == ref_matrix

    def test_rationals_stay_exact(self):
        x = Vector.of("1/3", -2, "0.25")
        assert vector_to_dict(x) == {"coords": ["1/3", "-2", "1/4"]}
        assert vector_from_dict(vector_to_dict(x)) == x

    def test_basis(self, ref_matrix):
        K = kernel_basis(ref_matrix)
        data = basis_to_dict(K)
        assert data["label"] == "kernel"
        assert basis_from_dict(data) == K
        with pytest.raises(MalformedInput):
            basis_from_dict({"vectors": []})

    @pytest.mark.parametrize("data", [[[1, 2], [3, 4]], {"rows": []}, {"rows": [1, 2]}, {"coords": [1]}])
    def test_malformed_matrix(self, data):
        with pytest.raises(MalformedInput):
            matrix_from_dict(data)

    def test_non_square(self):
        with pytest.raises(DimensionMismatch):
            matrix_from_dict({"rows": [["1", "2"]]})


class TestFiles:
    def test_load_matrix(self, matrix_file, ref_matrix):
        assert load_matrix(matrix_file) == ref_matrix

    def test_load_errors(self, tmp_path):
        with pytest.raises(MalformedInput):
            load_matrix(str(tmp_path / "missing.json"))
        bad = tmp_path / "bad.json"
        bad.write_text("{rows:")
        with pytest.raises(MalformedInput):
            load_matrix(str(bad))

    def test_atomic_write(self, tmp_path):
        path = str(tmp_path / "out.json")
        atomic_write(path, dump_json({"b": 1, "a": [1, 2]}))
        text = open(path).read()
        assert text.endswith("\n")
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"a": [1, 2], "b": 1}
        assert os.listdir(str(tmp_path)) == ["out.json"]


def test_digest_is_stable(ref_matrix):
    digest = matrix_digest(ref_matrix)
    assert len(digest) == 64
    assert matrix_digest(Matrix.from_rows(ref_matrix.to_strings())) == digest
    assert matrix_digest(Matrix.identity(3)) != digest
