#!/usr/bin/env python3
"""
classes.py - Matrix class tests for cubiclin

Druzkowski membership is tested by exact evaluation at random integer
points: diag((Ax)^2) A must be nilpotent for every x, and that is a
polynomial identity in x, so a single failing point is a proof of
non-membership while passing points only give Schwartz-Zippel confidence.

Class-Z membership (x + lam (Ax)^3 = 0 only at x = 0 for every real lam)
is probed with damped Newton from random starts. A nonzero root is a
counterexample; finding none is evidence, not proof.
"""

import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import CertificateInvalid, IterationBudgetExceeded, PreconditionViolated
from ..core.exact import FloatVector, Matrix, Vector, as_array, diag, hadamard_mul, hadamard_pow
from .cubic import CubicMap, jacobian, jacobian_numeric
from .newton import NewtonSettings, NewtonStatus, damped_newton

logger = logging.getLogger(__name__)

DEFAULT_SAMPLE_BOUND = 10 ** 6
DEFAULT_LAMBDAS: Tuple[float, ...] = tuple(
    sorted([-(10.0 ** k) for k in range(-2, 4)] + [0.0] + [10.0 ** k for k in range(-2, 4)])
)
DEFAULT_RADII: Tuple[float, ...] = (1.0, 10.0, 100.0)
DEFAULT_MIN_ROOT_NORM = 1e-6
DEFAULT_ESCAPE_RADIUS = 1e6
DRIFT_STEPS = 5
DRIFT_FACTOR = 2.0


def _check_seed(seed: int) -> int:
    if seed < 0:
        raise PreconditionViolated(f"Seeds must be non-negative, got {seed}")
    return int(seed)


def nilpotency_operator(A: Matrix, x: Vector) -> Matrix:
    """diag((Ax)^2) . A"""
    Ax = A @ x
    return diag(hadamard_mul(Ax, Ax)) @ A


def first_nonzero_power_trace(M: Matrix) -> Optional[Tuple[int, Fraction]]:
    """First k in 1..m with trace(M^k) != 0, or None when all vanish

    Over the rationals all these traces vanish exactly when M is nilpotent.
    """
    power = Matrix.identity(M.size)
    for k in range(1, M.size + 1):
        power = power @ M
        tr = power.trace()
        if tr != 0:
            return k, tr
    return None


# --------------------------------------------------------------------------
# Druzkowski test
# --------------------------------------------------------------------------

class DruzkowskiOutcome(str, Enum):
    CERTIFIED_NO = "certified_no"
    PROBABLY_YES = "probably_yes"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class DruzkowskiVerdict:
    """Outcome of the randomized-exact Druzkowski test

    A ``certified_no`` verdict re-verifies its witness on construction.
    """

    outcome: DruzkowskiOutcome
    A: Matrix
    trials: int
    seed: int
    sample_bound: int
    witness: Optional[Vector] = None
    trace_power: Optional[int] = None
    trace_value: Optional[Fraction] = None
    jacobian_det: Optional[Fraction] = None
    per_trial_bound: Optional[float] = None
    note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "outcome", DruzkowskiOutcome(self.outcome))
        if self.outcome is not DruzkowskiOutcome.CERTIFIED_NO:
            return
        if self.witness is None:
            raise CertificateInvalid("certified_no verdict without a witness")
        M = nilpotency_operator(self.A, self.witness)
        if M.is_nilpotent():
            raise CertificateInvalid(f"Witness {self.witness!r} gives a nilpotent operator")
        found = first_nonzero_power_trace(M)
        if found is None or (self.trace_power, self.trace_value) != (found[0], Fraction(found[1])):
            raise CertificateInvalid("Stored power trace does not match the witness")
        if self.jacobian_det is not None and jacobian(CubicMap(self.A), self.witness).det() != self.jacobian_det:
            raise CertificateInvalid("Stored Jacobian determinant does not match the witness")

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "verdict": self.outcome.value,
            "trials": self.trials,
            "seed": self.seed,
            "tolerances": {"sample_bound": self.sample_bound, "per_trial_bound": self.per_trial_bound},
            "note": self.note,
        }
        if self.witness is not None:
            data["witness"] = {"coords": self.witness.to_strings()}
            data["trace_power"] = self.trace_power
            data["trace_value"] = str(self.trace_value)
            data["jacobian_det"] = None if self.jacobian_det is None else str(self.jacobian_det)
        return data


def _certified_no(A: Matrix, x: Vector, trials: int, seed: int, bound: int) -> DruzkowskiVerdict:
    m = A.size
    # A standard basis vector is the most readable witness when one works
    for i in range(m):
        e = Vector.unit(m, i)
        if not nilpotency_operator(A, e).is_nilpotent():
            x = e
            break
    k, tr = first_nonzero_power_trace(nilpotency_operator(A, x))
    return DruzkowskiVerdict(
        outcome=DruzkowskiOutcome.CERTIFIED_NO,
        A=A,
        trials=trials,
        seed=seed,
        sample_bound=bound,
        witness=x,
        trace_power=k,
        trace_value=tr,
        jacobian_det=jacobian(CubicMap(A), x).det(),
        note=f"trace of the {k}-th power of diag((Ax)^2)A is {tr} at the witness, so it is not nilpotent",
    )


def druzkowski_test(A: Matrix, trials: int = 50, seed: int = 0,
                    sample_bound: int = DEFAULT_SAMPLE_BOUND) -> DruzkowskiVerdict:
    """Randomized-exact test of det JF_A = 1 via nilpotency of diag((Ax)^2)A

    Args:
        A: Square matrix
        trials: Number of random integer points, at least 1
        seed: Seed for the point sampler
        sample_bound: Coordinates are drawn uniformly from [-bound, bound]

    Returns:
        DruzkowskiVerdict
    """
    if trials < 1:
        raise PreconditionViolated("Druzkowski test needs at least one trial")
    seed = _check_seed(seed)
    m = A.size
    rng = random.Random(seed)

    for trial in range(trials):
        x = Vector(tuple(rng.randint(-sample_bound, sample_bound) for _ in range(m)))
        if not nilpotency_operator(A, x).is_nilpotent():
            logger.debug("Druzkowski test failed at trial %d", trial)
            return _certified_no(A, x, trials, seed, sample_bound)

    # Entries of (diag((Ax)^2)A)^m have degree 2m in x
    per_trial = 2 * m / (2 * sample_bound + 1)
    outcome = DruzkowskiOutcome.PROBABLY_YES if per_trial < 1 else DruzkowskiOutcome.UNDETERMINED
    note = (f"nilpotent at {trials} random points; a non-identity escapes one point "
            f"with probability at most {per_trial:.3g} (Schwartz-Zippel)")
    return DruzkowskiVerdict(outcome, A, trials, seed, sample_bound, per_trial_bound=per_trial, note=note)


# --------------------------------------------------------------------------
# Class-Z probe
# --------------------------------------------------------------------------

class ClassZOutcome(str, Enum):
    CERTIFIED_YES = "certified_yes"
    COUNTEREXAMPLE = "counterexample"
    NO_COUNTEREXAMPLE_FOUND = "no_counterexample_found"


@dataclass(frozen=True)
class ProbeSettings:
    starts_per_lambda: int = 6
    radii: Tuple[float, ...] = DEFAULT_RADII
    newton: NewtonSettings = NewtonSettings()
    min_root_norm: float = DEFAULT_MIN_ROOT_NORM
    escape_radius: float = DEFAULT_ESCAPE_RADIUS
    workers: int = 1


@dataclass(frozen=True)
class ProbeStats:
    starts: int = 0
    converged_to_zero: int = 0
    diverged: int = 0
    escaped: int = 0
    stalled: int = 0
    budget_exceeded: int = 0

    def to_dict(self) -> Dict[str, int]:
        return dict(self.__dict__)


def probe_residual(A: Matrix, lam: Union[float, Fraction], x: Union[Vector, FloatVector]) -> float:
    """||x + lam (Ax)^3||, exact for exact inputs"""
    if isinstance(x, Vector):
        lam = Fraction(lam)
        Ax = A @ x
        return (x + hadamard_pow(Ax, 3).scale(lam)).norm()
    xf = as_array(x)
    return float(np.linalg.norm(xf + float(lam) * (A.to_float() @ xf) ** 3))


@dataclass(frozen=True)
class ClassZVerdict:
    """Outcome of a class-Z check

    ``certified_yes`` carries an exact certificate (see the family module);
    ``counterexample`` carries a nonzero root that is re-checked here.
    """

    outcome: ClassZOutcome
    A: Matrix
    seed: Optional[int] = None
    lambdas: Tuple[float, ...] = ()
    settings: ProbeSettings = field(default_factory=ProbeSettings)
    stats: Optional[ProbeStats] = None
    lam: Optional[float] = None
    root: Optional[Union[Vector, FloatVector]] = None
    residual: Optional[float] = None
    certificate: Any = None

    def __post_init__(self):
        object.__setattr__(self, "outcome", ClassZOutcome(self.outcome))
        if self.outcome is ClassZOutcome.COUNTEREXAMPLE:
            if self.root is None or self.lam is None:
                raise CertificateInvalid("Counterexample verdict without a root")
            norm = self.root.norm()
            residual = probe_residual(self.A, self.lam, self.root)
            tolerance = self.settings.newton.residual_tolerance * max(1.0, norm)
            if norm < self.settings.min_root_norm or residual > tolerance:
                raise CertificateInvalid(f"Root fails re-check: norm {norm:.3g}, residual {residual:.3g}")
        if self.outcome is ClassZOutcome.CERTIFIED_YES and self.certificate is None:
            raise CertificateInvalid("certified_yes verdict without a certificate")

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "verdict": self.outcome.value,
            "seed": self.seed,
            "trials": len(self.lambdas) * self.settings.starts_per_lambda,
            "lambdas": list(self.lambdas),
            "tolerances": {
                "residual": self.settings.newton.residual_tolerance,
                "min_root_norm": self.settings.min_root_norm,
                "escape_radius": self.settings.escape_radius,
            },
        }
        if self.stats is not None:
            data["stats"] = self.stats.to_dict()
        if self.outcome is ClassZOutcome.COUNTEREXAMPLE:
            exact = isinstance(self.root, Vector)
            data["witness"] = {
                "lambda": self.lam,
                "coords": self.root.to_strings() if exact else list(self.root.coords),
                "exact": exact,
                "residual": self.residual,
            }
        if self.certificate is not None:
            data["certificate"] = self.certificate.to_dict()
        return data


def _drifts(Af: np.ndarray, lam: float, x: np.ndarray, newton: NewtonSettings) -> bool:
    """Whether further Newton steps keep pushing x outward

    A genuine root is a fixed point of the iteration. A zero at infinity is
    not: along a non-proper direction every step multiplies ||x||.
    """
    settings = replace(newton, max_iterations=DRIFT_STEPS, residual_tolerance=0.0)
    result = damped_newton(
        lambda y: y + lam * (Af @ y) ** 3,
        lambda y: jacobian_numeric(Af, y, lam),
        x,
        settings,
    )
    return float(np.linalg.norm(result.x)) > DRIFT_FACTOR * float(np.linalg.norm(x))


def _snap_root(A: Matrix, lam: float, x: np.ndarray) -> Union[Vector, FloatVector]:
    """Exact root if rounding to small denominators gives one"""
    candidate = Vector(tuple(Fraction(float(c)).limit_denominator(10 ** 6) for c in x))
    if probe_residual(A, Fraction(lam), candidate) == 0:
        return candidate
    return FloatVector.from_array(x, inexact=True)


def class_z_probe(A: Matrix, lambdas: Sequence[float] = DEFAULT_LAMBDAS, starts_per_lambda: int = 6,
                  seed: int = 0, settings: Optional[ProbeSettings] = None) -> ClassZVerdict:
    """Search for nonzero roots of x + lam (Ax)^3 = 0

    Every (lambda, start) pair runs damped Newton from a random unit vector
    scaled by one of the radii, with its own generator seeded from
    (seed, lambda index, start index). Roots farther out than the escape
    radius, or that keep moving outward under a few more Newton steps, are
    counted as escapes: their residual is small relative to ||x|| only
    because x runs off to infinity.

    Returns:
        ClassZVerdict with outcome ``counterexample`` or
        ``no_counterexample_found``

    Raises:
        IterationBudgetExceeded: If every start ran out of iterations, so
            the probe saw nothing at all
    """
    if starts_per_lambda < 1:
        raise PreconditionViolated("Class-Z probe needs at least one start per lambda")
    seed = _check_seed(seed)
    settings = settings or ProbeSettings()
    if settings.starts_per_lambda != starts_per_lambda:
        settings = replace(settings, starts_per_lambda=starts_per_lambda)
    lambdas = tuple(float(lam) for lam in lambdas)
    Af = A.to_float()
    m = A.size

    def run(task):
        li, si = task
        lam = lambdas[li]
        rng = np.random.default_rng([seed, li, si])
        direction = rng.standard_normal(m)
        direction /= np.linalg.norm(direction)
        x0 = settings.radii[si % len(settings.radii)] * direction
        result = damped_newton(
            lambda x: x + lam * (Af @ x) ** 3,
            lambda x: jacobian_numeric(Af, x, lam),
            x0,
            settings.newton,
        )
        return li, result

    tasks = [(li, si) for li in range(len(lambdas)) for si in range(starts_per_lambda)]
    if settings.workers > 1:
        with ThreadPoolExecutor(max_workers=settings.workers) as executor:
            results = list(executor.map(run, tasks))
    else:
        results = [run(task) for task in tasks]

    counts = {"converged_to_zero": 0, "diverged": 0, "escaped": 0, "stalled": 0, "budget_exceeded": 0}
    for li, result in results:
        norm = float(np.linalg.norm(result.x))
        if result.status is NewtonStatus.CONVERGED:
            if norm < settings.min_root_norm:
                counts["converged_to_zero"] += 1
            elif norm > settings.escape_radius or _drifts(Af, lambdas[li], result.x, settings.newton):
                counts["escaped"] += 1
            else:
                root = _snap_root(A, lambdas[li], result.x)
                logger.info("Nonzero root found for lambda=%g", lambdas[li])
                return ClassZVerdict(
                    outcome=ClassZOutcome.COUNTEREXAMPLE,
                    A=A,
                    seed=seed,
                    lambdas=lambdas,
                    settings=settings,
                    stats=ProbeStats(starts=len(tasks), **counts),
                    lam=lambdas[li],
                    root=root,
                    residual=probe_residual(A, lambdas[li], root),
                )
        elif result.status is NewtonStatus.DIVERGED:
            counts["diverged"] += 1
        elif result.status is NewtonStatus.STALLED:
            counts["stalled"] += 1
        else:
            counts["budget_exceeded"] += 1

    stats = ProbeStats(starts=len(tasks), **counts)
    if stats.budget_exceeded == stats.starts:
        raise IterationBudgetExceeded(
            f"All {stats.starts} probe starts ran out of Newton iterations (max_iterations={settings.newton.max_iterations})")
    logger.debug("Class-Z probe finished without roots: %s", stats)
    return ClassZVerdict(
        outcome=ClassZOutcome.NO_COUNTEREXAMPLE_FOUND,
        A=A,
        seed=seed,
        lambdas=lambdas,
        settings=settings,
        stats=stats,
    )
