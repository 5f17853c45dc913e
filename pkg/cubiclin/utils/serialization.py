#!/usr/bin/env python3
"""
serialization.py - JSON encoding of exact objects

Matrices are {"rows": [["1","-5","4"], ...]} and vectors are
{"coords": [...]}, every entry an exact rational string. Output files are
written through a temporary file and renamed into place.
"""

import hashlib
import json
import os
import tempfile
from typing import Any, Dict

from ..errors import MalformedInput
from ..core.exact import Matrix, Vector
from ..core.subspace import SubspaceBasis


def matrix_to_dict(A: Matrix) -> Dict[str, Any]:
    return {"rows": A.to_strings()}


def matrix_from_dict(data: Any) -> Matrix:
    """Matrix from its JSON form

    Raises:
        MalformedInput: If the structure is not {"rows": [[...], ...]}
        DimensionMismatch: If the matrix is not square
    """
    if not isinstance(data, dict) or not isinstance(data.get("rows"), list):
        raise MalformedInput('Matrix JSON must be an object with a "rows" list')
    rows = data["rows"]
    if not rows or not all(isinstance(row, list) for row in rows):
        raise MalformedInput('"rows" must be a non-empty list of lists')
    return Matrix.from_rows(rows)


def vector_to_dict(x: Vector) -> Dict[str, Any]:
    return {"coords": x.to_strings()}


def vector_from_dict(data: Any) -> Vector:
    if not isinstance(data, dict) or not isinstance(data.get("coords"), list):
        raise MalformedInput('Vector JSON must be an object with a "coords" list')
    return Vector(tuple(data["coords"]))


def basis_to_dict(V: SubspaceBasis) -> Dict[str, Any]:
    return {
        "ambient_dim": V.ambient_dim,
        "label": V.label.value,
        "vectors": [v.to_strings() for v in V],
    }


def basis_from_dict(data: Dict[str, Any]) -> SubspaceBasis:
    try:
        return SubspaceBasis(
            int(data["ambient_dim"]),
            tuple(Vector(tuple(v)) for v in data["vectors"]),
            data.get("label", "custom"),
        )
    except (KeyError, TypeError) as e:
        raise MalformedInput(f"Bad subspace basis: {e}")


def load_matrix(path: str) -> Matrix:
    """Read a matrix JSON file

    Raises:
        MalformedInput: If the file cannot be read or parsed
    """
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except OSError as e:
        raise MalformedInput(f"Cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise MalformedInput(f"Invalid JSON in {path}: {e}")
    return matrix_from_dict(data)


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def dump_json(data: Any, indent: int = 2) -> str:
    return json.dumps(data, indent=indent, sort_keys=True) + "\n"


def matrix_digest(A: Matrix) -> str:
    """SHA-256 of the canonical matrix JSON"""
    return hashlib.sha256(canonical_json(matrix_to_dict(A)).encode("utf-8")).hexdigest()


def atomic_write(path: str, text: str) -> str:
    """Write ``text`` to ``path`` so readers never see a partial file"""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".cubiclin-", suffix=".tmp")
    try:
        with os.fdopen(fd, 'w') as f:
            f.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
    return path
