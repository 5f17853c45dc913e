#!/usr/bin/env python3
"""
newton.py - Damped Newton iteration for cubiclin probes

Used to search for nonzero roots of x + lam (Ax)^3. The step is halved
until the residual norm decreases; the run ends as converged, diverged,
stalled (no decreasing step) or out of budget.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

VectorFunc = Callable[[np.ndarray], np.ndarray]
MatrixFunc = Callable[[np.ndarray], np.ndarray]


class NewtonStatus(str, Enum):
    CONVERGED = "converged"
    DIVERGED = "diverged"
    STALLED = "stalled"
    BUDGET_EXCEEDED = "budget_exceeded"


@dataclass(frozen=True)
class NewtonSettings:
    max_iterations: int = 200
    max_halvings: int = 40
    divergence_radius: float = 1e12
    residual_tolerance: float = 1e-12


@dataclass
class NewtonResult:
    x: np.ndarray
    status: NewtonStatus
    iterations: int
    residual: float


def _norm(v: np.ndarray) -> float:
    return float(np.linalg.norm(v))


def damped_newton(fun: VectorFunc, jac: MatrixFunc, x0: np.ndarray,
                  settings: NewtonSettings = NewtonSettings()) -> NewtonResult:
    """Find a root of ``fun`` starting from ``x0``

    Convergence means ``||fun(x)|| <= residual_tolerance * max(1, ||x||)``.

    Args:
        fun: Vector function
        jac: Its Jacobian
        x0: Starting point
        settings: Iteration limits and tolerances

    Returns:
        NewtonResult with the last iterate and how the run ended
    """
    x = np.array(x0, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        fx = fun(x)
        residual = _norm(fx)
        for iteration in range(settings.max_iterations):
            if residual <= settings.residual_tolerance * max(1.0, _norm(x)):
                return NewtonResult(x, NewtonStatus.CONVERGED, iteration, residual)
            if not np.isfinite(residual) or _norm(x) > settings.divergence_radius:
                return NewtonResult(x, NewtonStatus.DIVERGED, iteration, residual)

            J = jac(x)
            try:
                step = np.linalg.solve(J, -fx)
            except np.linalg.LinAlgError:
                step, *_ = np.linalg.lstsq(J, -fx, rcond=None)

            t = 1.0
            for _ in range(settings.max_halvings + 1):
                candidate = x + t * step
                f_candidate = fun(candidate)
                r_candidate = _norm(f_candidate)
                if np.isfinite(r_candidate) and r_candidate < residual:
                    break
                t *= 0.5
            else:
                return NewtonResult(x, NewtonStatus.STALLED, iteration, residual)

            x, fx, residual = candidate, f_candidate, r_candidate

        if residual <= settings.residual_tolerance * max(1.0, _norm(x)):
            return NewtonResult(x, NewtonStatus.CONVERGED, settings.max_iterations, residual)
        return NewtonResult(x, NewtonStatus.BUDGET_EXCEEDED, settings.max_iterations, residual)
