#!/usr/bin/env python3
"""
errors.py - Exception types for cubiclin

Expected negative outcomes (a criterion that does not apply, a matrix that
fails a structural check) are returned as values. The exceptions below are
for malformed input and broken invariants.
"""


class CubicLinError(ValueError):
    """Base class for all cubiclin errors"""


class DimensionMismatch(CubicLinError):
    """Operands do not share an ambient dimension"""


class ZeroToNegativePower(CubicLinError):
    """A zero coordinate was raised to a negative power"""


class EvenRootRequested(CubicLinError):
    """Signed coordinatewise roots are only defined for odd denominators"""


class NotInKernel(CubicLinError):
    """A vector that must lie in Ker(A) does not"""


class NotInImage(CubicLinError):
    """A vector that must lie in Im(A) does not"""


class PreconditionViolated(CubicLinError):
    """An operation was called outside its domain"""


class ConstraintViolated(CubicLinError):
    """Family parameters break one of the defining constraints"""

    def __init__(self, which: str, message: str = ""):
        self.which = which
        super().__init__(message or f"constraint violated: {which}")


class SamplingExhausted(CubicLinError):
    """Rejection sampling ran out of retries"""


class NonConvergent(CubicLinError):
    """A numeric limit could not be fitted within tolerance"""


class IterationBudgetExceeded(CubicLinError):
    """An iteration ran out of steps before converging"""


class CertificateInvalid(CubicLinError):
    """A certificate or verdict failed exact re-verification"""


class MalformedInput(CubicLinError):
    """Input data could not be parsed"""
