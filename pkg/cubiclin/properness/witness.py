#!/usr/bin/env python3
"""
witness.py - Explicit non-properness witnesses

From a certificate (x_inf, v) the module builds:

- the dual-map sequence x(g) = g x_inf + v/(3g), along which
  x + A(x^3) decays like 1/g;
- the kernel pair z(g) = g^3 x_inf^3, v_n = v/g, for which
  z^(1/3) + A(z^(2/3) * v_n) vanishes identically;
- the lift of x(g) to points z with F_A(z) = v_small -> 0 and ||z|| -> inf.

The conversions between the dual-map and kernel-pair forms are also
provided, together with the decay table and its CSV export.
"""

import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import CertificateInvalid, DimensionMismatch, NotInImage, PreconditionViolated
from ..core.exact import (
    AnyVector,
    FloatVector,
    Matrix,
    Vector,
    as_array,
    hadamard_mul,
    hadamard_pow,
    to_scalar,
)
from ..core.subspace import (
    colspace_basis,
    decompose,
    in_subspace,
    restricted_solve_matrix,
    rowspace_basis,
    solve_in_subspace,
)
from ..maps.cubic import CubicMap, MapVariant, cube, eval_map
from .criterion import PropernessCertificate

logger = logging.getLogger(__name__)

DEFAULT_GAMMAS = (10, 100, 1000, 10000)
DEFAULT_DECAY_GAMMAS = (100, 1000, 10000, 100000)
CSV_HEADER = ("gamma", "norm_x", "norm_fhat", "norm_z", "norm_FA_z")


def check_gammas(gammas: Sequence) -> Tuple[Fraction, ...]:
    """Exact gammas, checked positive and strictly increasing"""
    values = tuple(to_scalar(g) for g in gammas)
    if not values:
        raise PreconditionViolated("At least one gamma is required")
    if any(g <= 0 for g in values):
        raise PreconditionViolated("Gammas must be positive")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise PreconditionViolated("Gammas must be strictly increasing")
    return values


@dataclass(frozen=True)
class WitnessSequence:
    """Points g x_inf + v/(3g) for an increasing list of g"""

    cert: PropernessCertificate
    gammas: Tuple[Fraction, ...]

    def __post_init__(self):
        if not isinstance(self.cert, PropernessCertificate):
            raise PreconditionViolated("Witness sequences need a verified certificate")
        object.__setattr__(self, "gammas", check_gammas(self.gammas))

    def point(self, gamma) -> Vector:
        gamma = to_scalar(gamma)
        return self.cert.x_inf.scale(gamma) + self.cert.v.scale(1 / (3 * gamma))

    def points(self) -> List[Vector]:
        return [self.point(g) for g in self.gammas]


@dataclass(frozen=True)
class DualWitnessRow:
    gamma: Fraction
    x: Vector
    value: Vector

    @property
    def norm_x(self) -> float:
        return self.x.norm()

    @property
    def norm_value(self) -> float:
        return self.value.norm()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gamma": str(self.gamma),
            "x": self.x.to_strings(),
            "value": self.value.to_strings(),
            "norm_x": self.norm_x,
            "norm_value": self.norm_value,
        }


def build_dual_witness(cert: PropernessCertificate, gammas: Sequence = DEFAULT_GAMMAS
                       ) -> Tuple[WitnessSequence, List[DualWitnessRow]]:
    """Witness sequence for the dual map together with its exact values

    Returns:
        Tuple of (WitnessSequence, one DualWitnessRow per gamma)
    """
    ws = WitnessSequence(cert, gammas)
    dual = CubicMap(cert.A, MapVariant.DUAL)
    rows = [DualWitnessRow(g, x, eval_map(dual, x)) for g, x in zip(ws.gammas, ws.points())]
    return ws, rows


def decay_slope(gammas: Sequence, norms: Sequence[float]) -> float:
    """Least-squares slope of log(norm) against log(gamma)"""
    if len(gammas) < 2:
        raise PreconditionViolated("A slope needs at least two points")
    g = np.log10([float(x) for x in gammas])
    n = np.log10([float(x) for x in norms])
    return float(np.polyfit(g, n, 1)[0])


# --------------------------------------------------------------------------
# Kernel pairs
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelPairRow:
    """A kernel vector z, a companion v_n and z^(1/3) + A(z^(2/3) * v_n)"""

    z: Vector
    v_n: Vector
    value: AnyVector
    gamma: Optional[Fraction] = None

    def to_dict(self) -> Dict[str, Any]:
        exact = isinstance(self.value, Vector)
        return {
            "gamma": None if self.gamma is None else str(self.gamma),
            "z": self.z.to_strings(),
            "v_n": self.v_n.to_strings(),
            "value": self.value.to_strings() if exact else list(self.value.coords),
            "exact": exact,
        }


def kernel_pair_value(A: Matrix, z: Vector, v_n: Vector) -> AnyVector:
    """z^(1/3) + A(z^(2/3) * v_n), exact when z is a coordinatewise cube"""
    root = hadamard_pow(z, 1, 3)
    root_sq = hadamard_pow(z, 2, 3)
    if isinstance(root, Vector) and isinstance(root_sq, Vector):
        return root + A @ hadamard_mul(root_sq, v_n)
    values = as_array(root) + A.to_float() @ (as_array(root_sq) * as_array(v_n))
    return FloatVector.from_array(values, inexact=True)


def kernel_pair_values(A: Matrix, x_inf: Vector, v: Vector, gammas: Sequence = DEFAULT_GAMMAS
                       ) -> List[KernelPairRow]:
    """Kernel-pair rows z = g^3 x_inf^3, v_n = v/g for an arbitrary pair

    For a pair with residual r = x_inf + A(x_inf^2 * v) every value equals
    g r, so anything but a valid certificate grows without bound.
    """
    if len(x_inf) != A.size or len(v) != A.size:
        raise DimensionMismatch("x_inf and v must match the matrix dimension")
    x_cube = cube(x_inf)
    rows = []
    for g in check_gammas(gammas):
        z = x_cube.scale(g ** 3)
        v_n = v.scale(1 / g)
        rows.append(KernelPairRow(z, v_n, kernel_pair_value(A, z, v_n), g))
    return rows


def kernel_pair_witness(cert: PropernessCertificate, gammas: Sequence = DEFAULT_GAMMAS) -> List[KernelPairRow]:
    """Kernel-pair witness of a certificate; every value is exactly zero

    Raises:
        CertificateInvalid: If some value is not the zero vector
    """
    rows = kernel_pair_values(cert.A, cert.x_inf, cert.v, gammas)
    for row in rows:
        if not (isinstance(row.value, Vector) and row.value.is_zero()):
            raise CertificateInvalid(f"Kernel pair value is not zero at gamma={row.gamma}")
    return rows


def kernel_pair_to_dual(A: Matrix, z: Vector, v_n: Vector) -> AnyVector:
    """Dual-map point x = -A(z^(2/3) * v_n) + v_n / 3 of a kernel pair"""
    root_sq = hadamard_pow(z, 2, 3)
    if isinstance(root_sq, Vector):
        return -(A @ hadamard_mul(root_sq, v_n)) + v_n.scale(Fraction(1, 3))
    values = -(A.to_float() @ (as_array(root_sq) * as_array(v_n))) + as_array(v_n) / 3.0
    return FloatVector.from_array(values, inexact=True)


def dual_to_kernel_pair(A: Matrix, xs: Sequence[Vector]) -> List[KernelPairRow]:
    """Kernel pairs of a dual-map sequence

    Each x is split as x^3 = z + u with z in Ker(A) and u in Im(A^T);
    the companion is v_n = 3x.
    """
    rows = []
    for x in xs:
        z, _ = decompose(cube(x), A)
        v_n = x.scale(3)
        rows.append(KernelPairRow(z, v_n, kernel_pair_value(A, z, v_n)))
    return rows


@dataclass(frozen=True)
class RecoveredPair:
    """Criterion data read off a kernel pair at large scale"""

    x_unit: FloatVector
    v: FloatVector
    residual: float

    def to_dict(self) -> Dict[str, Any]:
        return {"x_unit": list(self.x_unit.coords), "v": list(self.v.coords), "residual": self.residual}


def recover_criterion_pair(A: Matrix, rows: Sequence[KernelPairRow]) -> RecoveredPair:
    """Estimate (x_inf, v) from the last kernel pair of a sequence

    The direction is z^(1/3) normalized and v is ||z^(1/3)|| v_n. The
    residual of x_unit + A(x_unit^2 * v) tends to zero along a valid
    kernel-pair sequence.
    """
    if not rows:
        raise PreconditionViolated("No kernel pairs to recover from")
    last = rows[-1]
    root = as_array(hadamard_pow(last.z, 1, 3))
    scale = float(np.linalg.norm(root))
    if scale == 0:
        raise PreconditionViolated("Kernel vector is zero")
    x_unit = root / scale
    v = scale * as_array(last.v_n)
    residual = float(np.linalg.norm(x_unit + A.to_float() @ (x_unit ** 2 * v)))
    return RecoveredPair(FloatVector.from_array(x_unit, inexact=True), FloatVector.from_array(v, inexact=True),
                         residual)


# --------------------------------------------------------------------------
# Lift to the standard map
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LiftRecord:
    gamma: Fraction
    u: Vector
    y: Vector
    v_small: Vector
    x_ker: Vector
    z: Vector

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gamma": str(self.gamma),
            "u": self.u.to_strings(),
            "y": self.y.to_strings(),
            "v_small": self.v_small.to_strings(),
            "x_ker": self.x_ker.to_strings(),
            "z": self.z.to_strings(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LiftRecord":
        return cls(
            gamma=to_scalar(data["gamma"]),
            **{key: Vector(tuple(data[key])) for key in ("u", "y", "v_small", "x_ker", "z")},
        )


@dataclass(frozen=True)
class LiftedWitness:
    """Points z with ||z|| growing and F_A(z) = v_small tending to ``anchor``

    For certificate-derived witnesses the anchor is 0. Every record is
    re-verified exactly on construction.
    """

    A: Matrix
    records: Tuple[LiftRecord, ...]
    anchor: Optional[Vector] = None
    gram_matrix: Optional[Matrix] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        if self.anchor is None:
            object.__setattr__(self, "anchor", Vector.zeros(self.A.size))
        for rec in self.records:
            if not (self.A @ rec.x_ker).is_zero():
                raise CertificateInvalid(f"x_ker is not in the kernel at gamma={rec.gamma}")
            if rec.z + cube(self.A @ rec.z) != rec.v_small:
                raise CertificateInvalid(f"F_A(z) != v_small at gamma={rec.gamma}")
            if rec.z.norm_squared() < rec.y.norm_squared():
                raise CertificateInvalid(f"||z|| < ||y|| at gamma={rec.gamma}")

    @property
    def gammas(self) -> List[Fraction]:
        return [rec.gamma for rec in self.records]

    def anchor_distances(self) -> List[float]:
        return [(rec.v_small - self.anchor).norm() for rec in self.records]

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "anchor": self.anchor.to_strings(),
            "records": [rec.to_dict() for rec in self.records],
        }
        if self.gram_matrix is not None:
            data["gram_matrix"] = self.gram_matrix.to_strings()
        return data


def gram_matrix(A: Matrix) -> Optional[Matrix]:
    """Square system inverted by the lift: A on the row-space basis

    Equal to the Gram matrix of the row-space basis when that basis is made
    of rows of A. None for the zero matrix.
    """
    return restricted_solve_matrix(A, rowspace_basis(A))


def _lift_one(A: Matrix, rows, gamma: Fraction, u: Vector) -> LiftRecord:
    y = solve_in_subspace(A, rows, u)
    v_small = solve_in_subspace(A, rows, u + A @ cube(u))
    if y is None or v_small is None:
        raise NotInImage(f"No preimage in Im(A^T) at gamma={gamma}")
    x_ker = v_small - y - cube(u)
    return LiftRecord(gamma, u, y, v_small, x_ker, x_ker + y)


def lift_points(A: Matrix, gammas: Sequence, points: Sequence[Vector], workers: int = 1) -> LiftedWitness:
    """Lift dual-map points u in Im(A) to the standard map

    Raises:
        NotInImage: If some point is not in Im(A)
    """
    gammas = check_gammas(gammas)
    if len(gammas) != len(points):
        raise DimensionMismatch("One gamma per point is required")
    image = colspace_basis(A)
    for g, u in zip(gammas, points):
        if not in_subspace(u, image).member:
            raise NotInImage(f"Witness point at gamma={g} is not in Im(A)")

    rows = rowspace_basis(A)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            records = list(executor.map(lambda gu: _lift_one(A, rows, *gu), zip(gammas, points)))
    else:
        records = [_lift_one(A, rows, g, u) for g, u in zip(gammas, points)]
    return LiftedWitness(A, tuple(records), gram_matrix=restricted_solve_matrix(A, rows))


def lift_witness(A: Matrix, ws: WitnessSequence, workers: int = 1) -> LiftedWitness:
    """Lift a dual-map witness sequence to a standard-map witness"""
    if ws.cert.A != A:
        raise PreconditionViolated("Witness sequence belongs to another matrix")
    return lift_points(A, ws.gammas, ws.points(), workers)


# --------------------------------------------------------------------------
# Decay table
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayRow:
    gamma: float
    norm_x: float
    norm_fhat: float
    norm_z: float
    norm_FA_z: float

    def as_tuple(self) -> Tuple[float, ...]:
        return (self.gamma, self.norm_x, self.norm_fhat, self.norm_z, self.norm_FA_z)


def decay_table(cert: PropernessCertificate, gammas: Sequence = DEFAULT_DECAY_GAMMAS,
                workers: int = 1) -> List[DecayRow]:
    """Norms along the dual-map witness and its lift

    Values are computed exactly and converted to doubles only at the end.
    """
    ws, dual_rows = build_dual_witness(cert, gammas)
    lifted = lift_witness(cert.A, ws, workers)
    table = [
        DecayRow(float(d.gamma), d.norm_x, d.norm_value, rec.z.norm(), rec.v_small.norm())
        for d, rec in zip(dual_rows, lifted.records)
    ]
    logger.debug("Decay table over %d gammas", len(table))
    return table


def decay_csv(rows: Sequence[DecayRow]) -> str:
    """CSV text of a decay table, 17 significant digits"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([format(value, ".17g") for value in row.as_tuple()])
    return buffer.getvalue()
