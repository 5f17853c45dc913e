#!/usr/bin/env python3
"""
cubic.py - Cubic-linear maps for cubiclin

The standard map F_A(x) = x + (Ax)^3 and its dual x + A(x^3), evaluated
exactly on rational vectors and in double precision on float vectors.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from ..errors import DimensionMismatch, NotInKernel
from ..core.exact import AnyVector, FloatVector, Matrix, Vector, diag, hadamard_mul, hadamard_pow


class MapVariant(str, Enum):
    STANDARD = "standard"  # x + (Ax)^3
    DUAL = "dual"          # x + A(x^3)


@dataclass(frozen=True)
class CubicMap:
    """A cubic-linear map attached to a square matrix"""

    A: Matrix
    variant: MapVariant = MapVariant.STANDARD

    def __post_init__(self):
        object.__setattr__(self, "variant", MapVariant(self.variant))

    @property
    def dim(self) -> int:
        return self.A.size

    def __call__(self, x: AnyVector) -> AnyVector:
        return eval_map(self, x)


def cube(x: Vector) -> Vector:
    return hadamard_pow(x, 3)


def eval_map(F: CubicMap, x: AnyVector) -> AnyVector:
    """Evaluate F at x

    Exact vectors give exact values. Float vectors are evaluated in IEEE
    doubles; the result carries the overflow flag if any entry is not finite.
    """
    if len(x) != F.dim:
        raise DimensionMismatch(f"Map of dimension {F.dim} applied to a {len(x)}-vector")

    if isinstance(x, Vector):
        if F.variant is MapVariant.STANDARD:
            return x + cube(F.A @ x)
        return x + F.A @ cube(x)

    A = F.A.to_float()
    xf = x.as_array()
    with np.errstate(over="ignore", invalid="ignore"):
        if F.variant is MapVariant.STANDARD:
            values = xf + (A @ xf) ** 3
        else:
            values = xf + A @ xf ** 3
    return FloatVector.from_array(values, inexact=x.inexact)


def jacobian(F: CubicMap, x: Vector) -> Matrix:
    """Exact Jacobian matrix of F at x

    Standard variant: I + 3 diag((Ax)^2) A. Dual variant: I + 3 A diag(x^2).
    """
    if len(x) != F.dim:
        raise DimensionMismatch(f"Map of dimension {F.dim} applied to a {len(x)}-vector")
    identity = Matrix.identity(F.dim)
    if F.variant is MapVariant.STANDARD:
        Ax = F.A @ x
        return identity + (diag(hadamard_mul(Ax, Ax)) @ F.A).scale(3)
    return identity + (F.A @ diag(hadamard_mul(x, x))).scale(3)


def jacobian_numeric(A: np.ndarray, x: np.ndarray, lam: float = 1.0) -> np.ndarray:
    """Jacobian of x + lam (Ax)^3 in doubles"""
    Ax = A @ x
    return np.eye(len(x)) + 3.0 * lam * (Ax ** 2)[:, None] * A


def kernel_shift_check(A: Matrix, x: Vector, w: Vector) -> bool:
    """Check F_A(x + w) = F_A(x) + w exactly for w in Ker(A)

    Raises:
        NotInKernel: If A.w != 0
    """
    if not (A @ w).is_zero():
        raise NotInKernel(f"Shift vector {w!r} is not in the kernel")
    F = CubicMap(A)
    return eval_map(F, x + w) == eval_map(F, x) + w
