#!/usr/bin/env python3
"""
criterion.py - Non-properness certificates for cubic-linear maps

A certificate is a pair (x_inf, v) in a subspace V containing Im(A) with

    x_inf has no zero coordinate,
    x_inf^3 in Ker(A),
    x_inf + A(x_inf^2 * v) = 0.

Such a pair yields explicit unbounded sequences along which the dual map
x + A(x^3) tends to zero, so F_A(x) = x + (Ax)^3 is not proper. The search
for x_inf is heuristic: an empty candidate list proves nothing.
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from enum import Enum
from typing import Any, Dict, List, Union

import numpy as np

from ..errors import CertificateInvalid, DimensionMismatch, PreconditionViolated
from ..core.exact import AnyVector, FloatVector, Matrix, Vector, as_array, diag, hadamard_mul, hadamard_pow
from ..core.subspace import (
    DEFAULT_TOLERANCE,
    MembershipMode,
    SubspaceBasis,
    colspace_basis,
    in_subspace,
    kernel_basis,
    solve_in_subspace,
)
from ..maps.cubic import cube

logger = logging.getLogger(__name__)

# Nonzero cubes drawn as random kernel coefficients
CUBE_COEFFICIENTS = tuple(s ** 3 for s in (-4, -3, -2, -1, 1, 2, 3, 4))
SNAP_DENOMINATOR = 10 ** 6


class RefusalReason(str, Enum):
    ZERO_COORDINATE = "zero_coordinate"
    CUBE_NOT_IN_KERNEL = "cube_not_in_kernel"
    NO_SOLUTION_V = "no_solution_v"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Refusal:
    """An operation declined to produce a certificate"""

    reason: str
    detail: str = ""

    def to_dict(self) -> Dict[str, str]:
        return {"refusal": str(self.reason.value if isinstance(self.reason, Enum) else self.reason),
                "detail": self.detail}


class CandidateSearch(str, Enum):
    KERNEL_ROOTS = "kernel_roots"
    RANDOMIZED = "randomized"


def criterion_residual(A: Matrix, x_inf: Vector, v: Vector) -> Vector:
    """x_inf + A(x_inf^2 * v), zero exactly for a valid pair"""
    return x_inf + A @ hadamard_mul(hadamard_mul(x_inf, x_inf), v)


@dataclass(frozen=True)
class PropernessCertificate:
    """Exact certificate that F_A is not proper

    Both defining identities are re-verified on construction, so a
    certificate read back from JSON is checked the same way.
    """

    A: Matrix
    V: SubspaceBasis
    x_inf: Vector
    v: Vector
    provenance: str = "criterion_check"

    def __post_init__(self):
        m = self.A.size
        if self.V.ambient_dim != m or len(self.x_inf) != m or len(self.v) != m:
            raise CertificateInvalid("Certificate parts do not share a dimension")
        if self.x_inf.has_zero_coordinate():
            raise CertificateInvalid("x_inf has a zero coordinate")
        for col in colspace_basis(self.A):
            if not self.V.contains(col):
                raise CertificateInvalid("Im(A) is not contained in V")
        if not self.V.contains(self.x_inf):
            raise CertificateInvalid("x_inf is not in V")
        if not self.V.contains(self.v):
            raise CertificateInvalid("v is not in V")
        if not (self.A @ cube(self.x_inf)).is_zero():
            raise CertificateInvalid("x_inf^3 is not in Ker(A)")
        if not criterion_residual(self.A, self.x_inf, self.v).is_zero():
            raise CertificateInvalid("x_inf + A(x_inf^2 * v) is not zero")

    def to_dict(self) -> Dict[str, Any]:
        from ..utils.serialization import basis_to_dict, matrix_to_dict, vector_to_dict
        return {
            "matrix": matrix_to_dict(self.A),
            "V": basis_to_dict(self.V),
            "x_inf": vector_to_dict(self.x_inf),
            "v": vector_to_dict(self.v),
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PropernessCertificate":
        from ..utils.serialization import basis_from_dict, matrix_from_dict, vector_from_dict
        return cls(
            A=matrix_from_dict(data["matrix"]),
            V=basis_from_dict(data["V"]),
            x_inf=vector_from_dict(data["x_inf"]),
            v=vector_from_dict(data["v"]),
            provenance=data.get("provenance", "criterion_check"),
        )


def criterion_check(A: Matrix, V: SubspaceBasis, x_inf: Vector) -> Union[PropernessCertificate, Refusal]:
    """Try to certify x_inf as a non-proper direction

    The returned v is the minimum-norm solution in V of
    A diag(x_inf^2) v = -x_inf.

    Raises:
        PreconditionViolated: If Im(A) is not inside V or x_inf is not in V
    """
    m = A.size
    if V.ambient_dim != m or len(x_inf) != m:
        raise DimensionMismatch("Matrix, subspace and x_inf must share a dimension")
    for col in colspace_basis(A):
        if not V.contains(col):
            raise PreconditionViolated("Im(A) is not contained in V")
    if not V.contains(x_inf):
        raise PreconditionViolated("x_inf is not in V")

    if x_inf.has_zero_coordinate():
        return Refusal(RefusalReason.ZERO_COORDINATE, "x_inf must have all coordinates nonzero")
    if not (A @ cube(x_inf)).is_zero():
        return Refusal(RefusalReason.CUBE_NOT_IN_KERNEL, "A(x_inf^3) is not zero")

    M = A @ diag(hadamard_mul(x_inf, x_inf))
    v = solve_in_subspace(M, V, -x_inf)
    if v is None:
        return Refusal(RefusalReason.NO_SOLUTION_V, "-x_inf is not in A diag(x_inf^2) V")
    return PropernessCertificate(A, V, x_inf, v)


def _negate(x: AnyVector) -> AnyVector:
    if isinstance(x, Vector):
        return -x
    return FloatVector.from_array(-x.as_array(), inexact=x.inexact)


def _snap_kernel_root(A: Matrix, root: AnyVector) -> AnyVector:
    """Rational vector near ``root`` whose cube lies exactly in Ker(A), else ``root``"""
    if isinstance(root, Vector):
        return root
    snapped = Vector(tuple(Fraction(c).limit_denominator(SNAP_DENOMINATOR) for c in root.coords))
    if snapped.has_zero_coordinate() or not (A @ cube(snapped)).is_zero():
        return root
    return snapped


def _same_direction(a: AnyVector, b: AnyVector) -> bool:
    fa, fb = as_array(a), as_array(b)
    return bool(np.allclose(fa / np.linalg.norm(fa), fb / np.linalg.norm(fb), rtol=0, atol=1e-9))


def candidate_directions(A: Matrix, search: Union[CandidateSearch, str] = CandidateSearch.KERNEL_ROOTS,
                         count: int = 16, seed: int = 0,
                         tolerance: float = DEFAULT_TOLERANCE) -> List[AnyVector]:
    """Candidate x_inf: cube roots of kernel vectors lying in Im(A)

    ``kernel_roots`` tries plus and minus the cube root of each kernel basis
    vector without zero coordinates; it is complete for a line kernel.
    ``randomized`` cube-roots ``count`` kernel combinations with nonzero cube
    coefficients. A float root is rounded to small denominators and kept
    exact when the rounded cube is still in Ker(A); otherwise it comes back
    as an inexact float vector, tested against Im(A) within ``tolerance``.
    """
    search = CandidateSearch(search)
    kernel = kernel_basis(A)
    image = colspace_basis(A)
    candidates: List[AnyVector] = []

    def consider(z: Vector, both_signs: bool) -> None:
        if z.is_zero() or z.has_zero_coordinate():
            return
        root = _snap_kernel_root(A, hadamard_pow(z, 1, 3))
        for r in ((root, _negate(root)) if both_signs else (root,)):
            if not in_subspace(r, image, MembershipMode.EXACT, tolerance).member:
                continue
            if any(_same_direction(r, c) for c in candidates):
                continue
            candidates.append(r)

    if search is CandidateSearch.KERNEL_ROOTS:
        for z in kernel:
            consider(z, both_signs=True)
    elif kernel.dim:
        rng = random.Random(seed)
        for _ in range(count):
            coeffs = [rng.choice(CUBE_COEFFICIENTS) for _ in range(kernel.dim)]
            consider(kernel.combine(coeffs), both_signs=False)

    logger.debug("%d candidate directions from %s search", len(candidates), search.value)
    return candidates


def kernel_root_inclusion(A: Matrix, tolerance: float = DEFAULT_TOLERANCE) -> bool:
    """Whether the cube root of every kernel basis vector lies in Im(A)

    This is the stronger hypothesis that the criterion relaxes. It is
    reported for information only; a False result does not block a
    certificate. An empty kernel gives True.
    """
    image = colspace_basis(A)
    for z in kernel_basis(A):
        root = hadamard_pow(z, 1, 3)
        if not in_subspace(root, image, MembershipMode.EXACT, tolerance).member:
            return False
    return True
