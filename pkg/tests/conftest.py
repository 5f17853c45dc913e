"""Shared fixtures for the cubiclin tests"""

import random

import pytest

from cubiclin.core.exact import Matrix
from cubiclin.family.construct import reference_certificate, reference_instance
from cubiclin.properness.structure import find_certificate
from cubiclin.utils.config import SEED_ENV_VAR


@pytest.fixture(autouse=True)
def _no_seed_env(monkeypatch):
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)


@pytest.fixture
def ref_matrix():
    """The worked 3x3 instance with alpha = 5"""
    return reference_instance()[0]


@pytest.fixture
def ref_alpha():
    return reference_instance()[1]


@pytest.fixture
def ref_cert():
    """Closed-form certificate with v = -(1,0,1)/5"""
    return reference_certificate()


@pytest.fixture
def minnorm_cert(ref_matrix):
    """Certificate found by search, v of minimum norm"""
    return find_certificate(ref_matrix)


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def identity3():
    return Matrix.identity(3)


@pytest.fixture
def zero3():
    return Matrix.zeros(3)


@pytest.fixture
def matrix_file(tmp_path, ref_matrix):
    """Path of a JSON file holding the worked instance"""
    from cubiclin.utils.serialization import dump_json, matrix_to_dict
    path = tmp_path / "matrix.json"
    path.write_text(dump_json(matrix_to_dict(ref_matrix)))
    return str(path)
