#!/usr/bin/env python3
"""
construct.py - The constructible family of 3x3 matrices with non-proper F_A

Rows one and two sum to zero and row three is lam * row1 + mu * row2 with
lam + mu = 1. Then (1,1,1) spans the kernel direction, lies in Im(A), and
x + (Ax)^3 is not proper. The special members (lam = 1, mu = 0) repeat the
first row and are the ones certified to be in class Z.

Note on alpha: with zero row sums, a11 + a13 = -a12, so the special
family's alpha is -a12 = -a22.
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from ..errors import ConstraintViolated, PreconditionViolated, SamplingExhausted
from ..core.exact import Matrix, Vector, to_scalar
from ..core.subspace import colspace_basis, rank, rowspace_basis, solve_in_subspace
from ..maps.cubic import cube
from ..properness.criterion import PropernessCertificate
from ..properness.witness import DEFAULT_GAMMAS, LiftedWitness, LiftRecord, check_gammas
from ..utils.serialization import matrix_to_dict

logger = logging.getLogger(__name__)

DEFAULT_SAMPLE_BOUND = 100
DEFAULT_MAX_RETRIES = 100

X_INF = Vector.ones(3)


@dataclass(frozen=True)
class FamilyParams:
    """General member: row3 = lam * row1 + mu * row2"""

    a11: Fraction
    a12: Fraction
    a13: Fraction
    a21: Fraction
    a22: Fraction
    a23: Fraction
    lam: Fraction
    mu: Fraction

    def __post_init__(self):
        for name in ("a11", "a12", "a13", "a21", "a22", "a23", "lam", "mu"):
            object.__setattr__(self, name, to_scalar(getattr(self, name)))

    @property
    def pivot(self) -> Fraction:
        """a11 + a13 lam, which must equal a21 + a23 lam"""
        return self.a11 + self.a13 * self.lam

    def violations(self) -> List[str]:
        broken = []
        if self.a11 + self.a12 + self.a13 != 0:
            broken.append("row1_sum")
        if self.a21 + self.a22 + self.a23 != 0:
            broken.append("row2_sum")
        if self.lam + self.mu != 1:
            broken.append("lambda_mu")
        if self.pivot != self.a21 + self.a23 * self.lam:
            broken.append("alpha_consistency")
        elif self.pivot == 0:
            broken.append("alpha_nonzero")
        return broken

    def preimage(self) -> Vector:
        """(c, 0, lam c) with A applied to it equal to (1,1,1)"""
        c = 1 / self.pivot
        return Vector((c, 0, self.lam * c))

    def to_dict(self) -> Dict[str, str]:
        return {key: str(value) for key, value in self.__dict__.items()}


@dataclass(frozen=True)
class SpecialFamilyParams:
    """Special member: row3 = row1"""

    a11: Fraction
    a12: Fraction
    a13: Fraction
    a21: Fraction
    a22: Fraction
    a23: Fraction

    def __post_init__(self):
        for name in ("a11", "a12", "a13", "a21", "a22", "a23"):
            object.__setattr__(self, name, to_scalar(getattr(self, name)))

    @property
    def alpha(self) -> Fraction:
        return self.a11 + self.a13

    def violations(self) -> List[str]:
        broken = []
        if self.a11 + self.a12 + self.a13 != 0:
            broken.append("row1_sum")
        if self.a21 + self.a22 + self.a23 != 0:
            broken.append("row2_sum")
        if self.alpha != self.a21 + self.a23:
            broken.append("alpha_consistency")
        elif self.alpha == 0:
            broken.append("alpha_nonzero")
        if self.a11 * self.a23 - self.a13 * self.a21 == 0:
            broken.append("corank")
        return broken

    def general(self) -> FamilyParams:
        return FamilyParams(self.a11, self.a12, self.a13, self.a21, self.a22, self.a23, 1, 0)

    def to_dict(self) -> Dict[str, str]:
        data = {key: str(value) for key, value in self.__dict__.items()}
        data["alpha"] = str(self.alpha)
        return data


AnyParams = Union[FamilyParams, SpecialFamilyParams]


def build_family_matrix(p: AnyParams) -> Matrix:
    """Matrix of a family member

    Raises:
        ConstraintViolated: Naming the first broken constraint
    """
    broken = p.violations()
    if broken:
        raise ConstraintViolated(broken[0], f"Family constraint violated: {', '.join(broken)}")
    if isinstance(p, SpecialFamilyParams):
        p = p.general()
    row1 = (p.a11, p.a12, p.a13)
    row2 = (p.a21, p.a22, p.a23)
    row3 = tuple(p.lam * a + p.mu * b for a, b in zip(row1, row2))
    return Matrix((row1, row2, row3))


@dataclass(frozen=True)
class FamilySample:
    params: AnyParams
    matrix: Matrix

    def to_dict(self) -> Dict[str, Any]:
        return {"params": self.params.to_dict(), "matrix": matrix_to_dict(self.matrix)}


def _random_rational(rng: random.Random, bound: int) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def _draw_special(rng: random.Random, bound: int) -> SpecialFamilyParams:
    a11, a13, a21 = (_random_rational(rng, bound) for _ in range(3))
    a23 = a11 + a13 - a21
    return SpecialFamilyParams(a11, -a11 - a13, a13, a21, -a21 - a23, a23)


def _draw_general(rng: random.Random, bound: int):
    a11, a13, a21, lam = (_random_rational(rng, bound) for _ in range(4))
    if lam == 0:
        return None
    a23 = (a11 + a13 * lam - a21) / lam
    return FamilyParams(a11, -a11 - a13, a13, a21, -a21 - a23, a23, lam, 1 - lam)


def sample_family(count: int, seed: int = 0, special_only: bool = False,
                  bound: int = DEFAULT_SAMPLE_BOUND, max_retries: int = DEFAULT_MAX_RETRIES) -> List[FamilySample]:
    """Random rank-2 family members with rational parameters

    Free parameters are rationals with numerator and denominator at most
    ``bound`` in absolute value; the rest are solved from the constraints.

    Raises:
        PreconditionViolated: If count < 1
        SamplingExhausted: If a sample fails ``max_retries`` draws in a row
    """
    if count < 1:
        raise PreconditionViolated("count must be at least 1")
    if seed < 0:
        raise PreconditionViolated("seed must be non-negative")
    rng = random.Random(seed)
    samples = []
    for index in range(count):
        for attempt in range(max_retries):
            params = _draw_special(rng, bound) if special_only else _draw_general(rng, bound)
            if params is None or params.violations():
                continue
            matrix = build_family_matrix(params)
            if rank(matrix) != 2:
                continue
            samples.append(FamilySample(params, matrix))
            if attempt:
                logger.debug("Sample %d accepted after %d rejections", index, attempt)
            break
        else:
            raise SamplingExhausted(f"Sample {index} rejected {max_retries} times")
    return samples


def reference_params() -> SpecialFamilyParams:
    return SpecialFamilyParams(1, -5, 4, 2, -5, 3)


def reference_instance() -> Tuple[Matrix, Fraction]:
    """The worked instance [[1,-5,4],[2,-5,3],[1,-5,4]] with alpha = 5"""
    p = reference_params()
    return build_family_matrix(p), p.alpha


def special_certificate(p: SpecialFamilyParams) -> PropernessCertificate:
    """Certificate x_inf = (1,1,1), v = -x_alpha with x_alpha = (1,0,1)/alpha

    A x_alpha = (1,1,1), so x_inf + A(x_inf^2 * v) = x_inf - A x_alpha = 0.
    """
    A = build_family_matrix(p)
    x_alpha = Vector((1, 0, 1)).scale(1 / p.alpha)
    return PropernessCertificate(A, colspace_basis(A), X_INF, -x_alpha, provenance="closed_form")


def reference_certificate() -> PropernessCertificate:
    return special_certificate(reference_params())


def reference_lift_closed_form(p: Optional[SpecialFamilyParams] = None, gammas: Sequence = DEFAULT_GAMMAS) -> LiftedWitness:
    """Lift of the closed-form certificate written out by hand

    With x_alpha = (1,0,1)/alpha, x* and xa* the row-space preimages of
    (1,1,1) and x_alpha, and k(g) = g - 1/(3 alpha g) + 1/(27 alpha^2 g^3):

        u^3     = g^3 x_inf - k x_alpha
        y       = g x* - xa*/(3g)
        v_small = -xa*/(3g) + (g - k) x*
        x_ker   = -g^3 x_inf - k (x* - x_alpha)

    The records agree exactly with the generic lift of the same witness.
    """
    p = p or reference_params()
    A = build_family_matrix(p)
    alpha = p.alpha
    rows = rowspace_basis(A)
    x_alpha = Vector((1, 0, 1)).scale(1 / alpha)
    x_star = solve_in_subspace(A, rows, X_INF)
    xa_star = solve_in_subspace(A, rows, x_alpha)

    records = []
    for g in check_gammas(gammas):
        k = g - 1 / (3 * alpha * g) + 1 / (27 * alpha ** 2 * g ** 3)
        u = X_INF.scale(g) - x_alpha.scale(1 / (3 * g))
        u_cubed = X_INF.scale(g ** 3) - x_alpha.scale(k)
        if u_cubed != cube(u):
            raise ConstraintViolated("closed_form", f"Closed-form cube disagrees at gamma={g}")
        y = x_star.scale(g) - xa_star.scale(1 / (3 * g))
        v_small = -xa_star.scale(1 / (3 * g)) + x_star.scale(g - k)
        x_ker = -X_INF.scale(g ** 3) - (x_star - x_alpha).scale(k)
        records.append(LiftRecord(g, u, y, v_small, x_ker, x_ker + y))
    return LiftedWitness(A, tuple(records))
