#!/usr/bin/env python3
"""
classz.py - Class-Z certificates for the special family

For a 3x3 matrix with row3 = row1, zero row sums, alpha = a11 + a13 =
a21 + a23 != 0 and rank 2, the two exact identities

    A (1,0,1) = alpha (1,1,1)
    A (0,1,0) = -alpha (1,1,1)

give A x = alpha (x1 - x2) (1,1,1) whenever x1 = x3. A root of
x + lam (Ax)^3 = 0 has (Ax)1 = (Ax)3, hence x1 = x3, hence all coordinates
of Ax agree, hence x1 = x2, hence Ax = 0 and x = 0. So only the zero root
exists, for every real lam.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .. import __version__
from ..errors import CertificateInvalid
from ..core.exact import Matrix, Vector, to_scalar
from ..core.subspace import rank
from ..maps.classes import (
    ClassZOutcome,
    ClassZVerdict,
    DruzkowskiVerdict,
    ProbeSettings,
    class_z_probe,
    druzkowski_test,
)
from ..properness.criterion import Refusal
from ..properness.structure import LineSample, NonProperValueReport, certify_zero_nonproper, sample_lines
from ..properness.witness import DEFAULT_DECAY_GAMMAS, DEFAULT_GAMMAS, decay_csv, decay_slope, decay_table
from ..utils.serialization import matrix_from_dict, matrix_to_dict
from .construct import reference_instance

logger = logging.getLogger(__name__)

ONES = Vector.ones(3)
CHECK_1_POINT = Vector((1, 0, 1))
CHECK_2_POINT = Vector((0, 1, 0))

REDUCTION_ARGUMENT = (
    "(Ax)_1 = (Ax)_3 => x_1 = x_3 => Ax = alpha(x_1 - x_2)(1,1,1) "
    "=> x_1 = x_2 => Ax = 0 => x = 0"
)


def _structural_failures(M: Matrix) -> List[Tuple[str, str]]:
    """Failed structural checks as (reason, detail), in checking order"""
    if M.size != 3:
        return [("not_3x3", f"matrix is {M.size}x{M.size}")]
    failures = []
    if M.row(2) != M.row(0):
        failures.append(("row3_not_row1", "third row must repeat the first"))
    for i in range(3):
        if sum(M.rows[i], Fraction(0)) != 0:
            failures.append(("row_sum_nonzero", f"row {i + 1} does not sum to zero"))
            break
    alpha1 = M.rows[0][0] + M.rows[0][2]
    alpha2 = M.rows[1][0] + M.rows[1][2]
    if alpha1 != alpha2:
        failures.append(("alpha_mismatch", f"a11 + a13 = {alpha1} but a21 + a23 = {alpha2}"))
    elif alpha1 == 0:
        failures.append(("alpha_zero", "alpha = a11 + a13 is zero"))
    if rank(M) != 2:
        failures.append(("rank_not_2", f"rank is {rank(M)}"))
    return failures


def _permuted(M: Matrix, perm: Sequence[int]) -> Matrix:
    """P M P^T for the coordinate permutation ``perm``"""
    return Matrix(tuple(tuple(M.rows[perm[i]][perm[j]] for j in range(3)) for i in range(3)))


@dataclass(frozen=True)
class ClassZCertificate:
    """Exact class-Z certificate of a special-family matrix"""

    matrix: Matrix
    alpha: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", to_scalar(self.alpha))
        failures = _structural_failures(self.matrix)
        if failures:
            raise CertificateInvalid(f"Structural check failed: {failures[0][0]}")
        if self.matrix.rows[0][0] + self.matrix.rows[0][2] != self.alpha:
            raise CertificateInvalid("alpha does not match the matrix")
        if self.matrix @ CHECK_1_POINT != ONES.scale(self.alpha):
            raise CertificateInvalid("A(1,0,1) != alpha(1,1,1)")
        if self.matrix @ CHECK_2_POINT != ONES.scale(-self.alpha):
            raise CertificateInvalid("A(0,1,0) != -alpha(1,1,1)")

    def reduce(self, x1, x2) -> Vector:
        """A(x1, x2, x1) as alpha (x1 - x2) (1,1,1)"""
        return ONES.scale(self.alpha * (to_scalar(x1) - to_scalar(x2)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "matrix": matrix_to_dict(self.matrix),
            "alpha": str(self.alpha),
            "check_1": {"x": CHECK_1_POINT.to_strings(), "Ax": (self.matrix @ CHECK_1_POINT).to_strings()},
            "check_2": {"x": CHECK_2_POINT.to_strings(), "Ax": (self.matrix @ CHECK_2_POINT).to_strings()},
            "corank_check": {"rank": 2},
            "argument": REDUCTION_ARGUMENT,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ClassZCertificate":
        return cls(matrix_from_dict(data["matrix"]), data["alpha"])


def certify_class_z(M: Matrix) -> Union[ClassZCertificate, Refusal]:
    """Class-Z certificate for a special-family matrix, or a refusal

    Coordinates are never permuted; when a permutation would make the
    checks pass the refusal says so.
    """
    failures = _structural_failures(M)
    if not failures:
        return ClassZCertificate(M, M.rows[0][0] + M.rows[0][2])

    reason, detail = failures[0]
    if M.size == 3:
        for perm in itertools.permutations(range(3)):
            if perm != (0, 1, 2) and not _structural_failures(_permuted(M, perm)):
                detail += f"; permuting coordinates as {list(perm)} would pass"
                break
    logger.info("Class-Z certification refused: %s (%s)", reason, detail)
    return Refusal(reason, detail)


def certify_batch(matrices: Sequence[Matrix], workers: int = 1) -> List[Union[ClassZCertificate, Refusal]]:
    """certify_class_z over many matrices, results in input order"""
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(certify_class_z, matrices))
    return [certify_class_z(M) for M in matrices]


def class_z_verdict(M: Matrix) -> Optional[ClassZVerdict]:
    """certified_yes verdict when a certificate exists, else None"""
    cert = certify_class_z(M)
    if isinstance(cert, Refusal):
        return None
    return ClassZVerdict(ClassZOutcome.CERTIFIED_YES, M, certificate=cert)


@dataclass(frozen=True)
class RefutationReport:
    """A class-Z matrix whose cubic-linear map is not proper"""

    matrix: Matrix
    alpha: Fraction
    class_z: ClassZCertificate
    nonproper: NonProperValueReport
    decay_csv: str
    decay_slope: float
    druzkowski: DruzkowskiVerdict
    probe: Optional[ClassZVerdict] = None
    lines: Tuple[LineSample, ...] = field(default_factory=tuple)

    @property
    def refuted(self) -> bool:
        return self.nonproper.zero_is_nonproper

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "version": __version__,
            "verdict": {"in_class_z": True, "nonproper": self.refuted},
            "matrix": matrix_to_dict(self.matrix),
            "alpha": str(self.alpha),
            "certificates": {
                "classZ": self.class_z.to_dict(),
                "nonproperness": self.nonproper.to_dict(),
            },
            "decay": {"csv": self.decay_csv, "slope": self.decay_slope},
            "lines": [s.to_dict() for s in self.lines],
            "druzkowski": self.druzkowski.to_dict(),
        }
        if self.probe is not None:
            data["probe"] = self.probe.to_dict()
        return data


def refute_classz_properness(gammas: Sequence = DEFAULT_GAMMAS, decay_gammas: Sequence = DEFAULT_DECAY_GAMMAS,
                             line_ts: Sequence[float] = (-2, -1, 1, 2), trials: int = 50, seed: int = 0,
                             probe_settings: Optional[ProbeSettings] = None,
                             workers: int = 1) -> RefutationReport:
    """Exhibit a class-Z matrix with a non-proper cubic-linear map

    Every part is checked on the fixed worked instance; a failure here is a
    bug, reported as CertificateInvalid.
    """
    A, alpha = reference_instance()
    cz = certify_class_z(A)
    if isinstance(cz, Refusal):
        raise CertificateInvalid(f"Worked instance is not certified in class Z: {cz.detail}")
    nonproper = certify_zero_nonproper(A, gammas, seed=seed, workers=workers)
    if isinstance(nonproper, Refusal):
        raise CertificateInvalid(f"Worked instance has no non-properness certificate: {nonproper.detail}")

    rows = decay_table(nonproper.certificate, decay_gammas, workers)
    slope = decay_slope([r.gamma for r in rows], [r.norm_fhat for r in rows])
    samples = tuple(sample_lines(A, nonproper.lifted, line_ts)) if line_ts else ()
    report = NonProperValueReport(nonproper.lines, nonproper.kernel_basis, nonproper.certificate,
                                  nonproper.lifted, samples)

    probe = None
    if probe_settings is not None:
        probe = class_z_probe(A, seed=seed, starts_per_lambda=probe_settings.starts_per_lambda,
                              settings=probe_settings)
        if probe.outcome is ClassZOutcome.COUNTEREXAMPLE:
            raise CertificateInvalid("Probe found a nonzero root for a certified class-Z matrix")

    logger.info("Refutation assembled: alpha=%s, decay slope %.4f", alpha, slope)
    return RefutationReport(A, alpha, cz, report, decay_csv(rows), slope,
                            druzkowski_test(A, trials, seed), probe, samples)
