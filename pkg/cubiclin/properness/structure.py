#!/usr/bin/env python3
"""
structure.py - Non-proper values of F_A

Certifies that 0 is a non-proper value, samples the lines of non-proper
values through an anchor, and moves lifted witnesses along Ker(A).
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import CertificateInvalid, NonConvergent, NotInKernel, PreconditionViolated
from ..core.exact import AnyVector, FloatVector, Matrix, Vector, as_array, to_scalar
from ..core.subspace import DEFAULT_TOLERANCE, SubspaceBasis, colspace_basis, kernel_basis
from ..maps.cubic import CubicMap, cube, eval_map
from .criterion import (
    CandidateSearch,
    PropernessCertificate,
    Refusal,
    RefusalReason,
    candidate_directions,
    criterion_check,
)
from .witness import DEFAULT_GAMMAS, LiftedWitness, LiftRecord, build_dual_witness, lift_witness

logger = logging.getLogger(__name__)

LINE_TOLERANCE = 0.05


class LineSign(str, Enum):
    PLUS = "+2"
    MINUS = "-2"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class NonProperLine:
    """anchor + R direction, a line of non-proper values"""

    anchor: AnyVector
    direction: AnyVector
    empirical_sign: LineSign = LineSign.UNDETERMINED

    def __post_init__(self):
        object.__setattr__(self, "empirical_sign", LineSign(self.empirical_sign))
        if not np.any(as_array(self.direction)):
            raise PreconditionViolated("Line direction must be nonzero")

    def to_dict(self) -> Dict[str, Any]:
        def coords(x):
            return x.to_strings() if isinstance(x, Vector) else list(x.coords)
        return {
            "anchor": coords(self.anchor),
            "direction": coords(self.direction),
            "empirical_sign": self.empirical_sign.value,
        }


@dataclass(frozen=True)
class LineSample:
    """Fitted limit of F_A((1 - t/||z||) z) along a lifted witness"""

    line: NonProperLine
    t: float
    limit: FloatVector
    fit_residual: float
    collinearity_residual: float
    magnitude_ratio: float
    values: Tuple[FloatVector, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "line": self.line.to_dict(),
            "limit": list(self.limit.coords),
            "fit_residual": self.fit_residual,
            "collinearity_residual": self.collinearity_residual,
            "magnitude_ratio": self.magnitude_ratio,
        }


@dataclass(frozen=True)
class NonProperValueReport:
    """Lines of non-proper values found for F_A

    Every anchor is backed by a lifted witness whose values approach it
    monotonically. The full set contains each anchor plus Ker(A).
    """

    lines: Tuple[NonProperLine, ...]
    kernel_basis: SubspaceBasis
    certificate: PropernessCertificate
    lifted: LiftedWitness
    samples: Tuple[LineSample, ...] = ()
    note: str = "non-proper values contain every anchor + Ker(A)"

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))
        distances = self.lifted.anchor_distances()
        if any(b >= a for a, b in zip(distances, distances[1:])):
            raise CertificateInvalid("Witness values do not approach the anchor monotonically")
        for line in self.lines:
            if isinstance(line.anchor, Vector) and line.anchor != self.lifted.anchor:
                raise CertificateInvalid("Line anchor is not backed by the lifted witness")

    @property
    def zero_is_nonproper(self) -> bool:
        return self.lifted.anchor.is_zero()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "zero_is_nonproper": self.zero_is_nonproper,
            "note": self.note,
            "kernel_basis": [v.to_strings() for v in self.kernel_basis],
            "lines": [line.to_dict() for line in self.lines],
            "certificate": self.certificate.to_dict(),
            "lifted": self.lifted.to_dict(),
            "samples": [s.to_dict() for s in self.samples],
        }


def _parallel(a: Vector, b: Vector) -> bool:
    return a.dot(b) ** 2 == a.norm_squared() * b.norm_squared()


def find_certificate(A: Matrix, search: Union[CandidateSearch, str] = CandidateSearch.KERNEL_ROOTS,
                     count: int = 16, seed: int = 0,
                     tolerance: float = DEFAULT_TOLERANCE) -> Union[PropernessCertificate, Refusal]:
    """First certificate with V = Im(A) among the candidate directions

    Inexact candidates cannot be certified and are skipped. A refusal is
    inconclusive; it does not show that F_A is proper.
    """
    image = colspace_basis(A)
    candidates = candidate_directions(A, search, count, seed, tolerance)
    if search == CandidateSearch.KERNEL_ROOTS and not candidates:
        candidates = candidate_directions(A, CandidateSearch.RANDOMIZED, count, seed, tolerance)
    refusals = []
    for x_inf in candidates:
        if not isinstance(x_inf, Vector):
            logger.info("Skipping irrational candidate direction %s", list(x_inf.coords))
            refusals.append("irrational candidate")
            continue
        outcome = criterion_check(A, image, x_inf)
        if isinstance(outcome, PropernessCertificate):
            logger.info("Certificate found with x_inf=%s", x_inf.to_strings())
            return outcome
        refusals.append(outcome.reason.value)
    detail = f"{len(candidates)} candidates"
    if refusals:
        detail += ": " + ", ".join(refusals)
    logger.info("No certificate: %s", detail)
    return Refusal(RefusalReason.INCONCLUSIVE, detail)


def certify_zero_nonproper(A: Matrix, gammas: Sequence = DEFAULT_GAMMAS, count: int = 16, seed: int = 0,
                           tolerance: float = DEFAULT_TOLERANCE,
                           workers: int = 1) -> Union[NonProperValueReport, Refusal]:
    """Show that 0 is a non-proper value of F_A

    On success the report carries the certificate, an exact lifted witness
    over ``gammas`` anchored at 0 and the lines through 0: the limiting
    direction -x_inf^3 of z/||z|| and each independent kernel direction.
    """
    cert = find_certificate(A, CandidateSearch.KERNEL_ROOTS, count, seed, tolerance)
    if isinstance(cert, Refusal):
        return cert

    ws, _ = build_dual_witness(cert, gammas)
    lifted = lift_witness(A, ws, workers)
    kernel = kernel_basis(A)

    leading = -cube(cert.x_inf)
    lines = [NonProperLine(lifted.anchor, leading)]
    for k in kernel:
        if not _parallel(k, leading):
            lines.append(NonProperLine(lifted.anchor, k))
    return NonProperValueReport(tuple(lines), kernel, cert, lifted)


def nonproper_line(A: Matrix, lw: LiftedWitness, t: float, n_points: Optional[int] = None) -> LineSample:
    """Limit of F_A((1 - t/||z||) z) along a lifted witness

    The limit is fitted linearly in 1/gamma. It must differ from the
    anchor by 2|t| along the limiting direction of z/||z||, within 5%.

    Raises:
        NonConvergent: If the fit or the line checks miss the tolerance
    """
    records: Sequence[LiftRecord] = lw.records
    if not records:
        raise PreconditionViolated("Lifted witness has no records")
    if n_points is not None:
        if n_points < 1:
            raise PreconditionViolated("n_points must be positive")
        records = records[-n_points:]

    F = CubicMap(A)
    t_exact = to_scalar(float(t))
    eps = []
    values = []
    for rec in records:
        scale = 1 - t_exact * Fraction(1.0 / rec.z.norm())
        values.append(as_array(eval_map(F, rec.z.scale(scale))))
        eps.append(float(1 / rec.gamma))
    values = np.array(values)
    eps = np.array(eps)

    if len(records) >= 2:
        coeffs = np.polyfit(eps, values, 1)
        limit = coeffs[1]
        fitted = np.outer(eps, coeffs[0]) + coeffs[1]
        fit_error = float(np.sqrt(np.mean(np.sum((values - fitted) ** 2, axis=1))))
    else:
        limit = values[-1]
        fit_error = 0.0

    anchor = as_array(lw.anchor)
    diff = limit - anchor
    z_last = as_array(records[-1].z)
    direction = z_last / np.linalg.norm(z_last)
    diff_norm = float(np.linalg.norm(diff))
    fit_residual = fit_error / max(1.0, diff_norm)
    if fit_residual > LINE_TOLERANCE:
        raise NonConvergent(f"Limit fit residual {fit_residual:.3g} exceeds {LINE_TOLERANCE}")

    if t == 0:
        if diff_norm > LINE_TOLERANCE:
            raise NonConvergent(f"Limit at t=0 is {diff_norm:.3g} away from the anchor")
        sign, collinearity, ratio = LineSign.UNDETERMINED, 0.0, 1.0
    else:
        projection = float(diff @ direction)
        collinearity = float(np.linalg.norm(diff - projection * direction)) / diff_norm if diff_norm else 1.0
        ratio = diff_norm / (2.0 * abs(t))
        if collinearity > LINE_TOLERANCE or abs(ratio - 1.0) > LINE_TOLERANCE:
            raise NonConvergent(f"Limit is off the line: collinearity {collinearity:.3g}, magnitude ratio {ratio:.3g}")
        sign = LineSign.PLUS if projection * t > 0 else LineSign.MINUS

    line = NonProperLine(lw.anchor, FloatVector.from_array(direction), sign)
    logger.debug("Line sample t=%g: limit %s, sign %s", t, limit, sign.value)
    return LineSample(
        line=line,
        t=float(t),
        limit=FloatVector.from_array(limit),
        fit_residual=fit_residual,
        collinearity_residual=collinearity,
        magnitude_ratio=ratio,
        values=tuple(FloatVector.from_array(v) for v in values),
    )


def sample_lines(A: Matrix, lw: LiftedWitness, ts: Sequence[float]) -> List[LineSample]:
    """Line samples for several t; the recorded signs must agree"""
    samples = [nonproper_line(A, lw, t) for t in ts]
    signs = {s.line.empirical_sign for s in samples if s.line.empirical_sign is not LineSign.UNDETERMINED}
    if len(signs) > 1:
        raise NonConvergent("Line samples disagree on the sign of the limit")
    return samples


def shift_lifted_witness(A: Matrix, lw: LiftedWitness, w: Vector) -> LiftedWitness:
    """Move a lifted witness by w in Ker(A); the anchor moves to anchor + w

    Raises:
        NotInKernel: If A.w != 0
    """
    if not (A @ w).is_zero():
        raise NotInKernel(f"Shift vector {w!r} is not in the kernel")
    records = tuple(
        LiftRecord(rec.gamma, rec.u, rec.y, rec.v_small + w, rec.x_ker + w, rec.z + w)
        for rec in lw.records
    )
    return LiftedWitness(A, records, anchor=lw.anchor + w, gram_matrix=lw.gram_matrix)
