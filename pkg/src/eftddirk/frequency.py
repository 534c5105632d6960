"""Fitting-frequency estimation by golden-section search over a bracket."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .integrator import Problem, StepConfig, integrate
from .tableau import SchemeSpec

__all__ = [
    "INV_PHI",
    "FreqSearch",
    "SearchResult",
    "NonFiniteObjective",
    "golden_section",
    "estimate_omega",
    "OBJECTIVES",
]

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = 1.0 - INV_PHI

OBJECTIVES = ("global-error", "invariant-drift")


class NonFiniteObjective(ValueError):
    def __init__(self, omega: float, value: float):
        super().__init__(f"objective is not finite at omega = {omega!r} (value {value!r})")
        self.omega = omega


@dataclass
class SearchResult:
    omega: float
    value: float
    iterations: int
    width: float
    probes: list[tuple[int, float, float]] = field(default_factory=list)


def golden_section(objective: Callable[[float], float], bracket, tol: float = 1e-6) -> SearchResult:
    """Minimize ``objective`` on ``bracket`` until the bracket is narrower than ``tol``.

    Each iteration shrinks the bracket by 1/phi and costs one new evaluation,
    so the probe count is ``iterations + 2``.  No unimodality check is made;
    a multimodal objective yields some local minimum.
    """
    lo, hi = (float(x) for x in bracket)
    if not lo < hi:
        raise ValueError(f"bracket must satisfy lo < hi, got {bracket}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    probes: list[tuple[int, float, float]] = []

    def evaluate(x, it):
        y = float(objective(x))
        if not math.isfinite(y):
            raise NonFiniteObjective(x, y)
        probes.append((it, x, y))
        return y

    a, b = lo, hi
    x1 = a + INV_PHI2 * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1 = evaluate(x1, 0)
    f2 = evaluate(x2, 0)
    it = 0
    while b - a > tol:
        it += 1
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = a + INV_PHI2 * (b - a)
            f1 = evaluate(x1, it)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = evaluate(x2, it)
    best = min(probes, key=lambda p: p[2])
    # the minimum of a monotone objective sits on the bracket edge
    omega = best[1]
    if omega - lo <= tol:
        omega = lo
    elif hi - omega <= tol:
        omega = hi
    return SearchResult(omega=omega, value=best[2], iterations=it, width=b - a, probes=probes)


@dataclass(frozen=True)
class FreqSearch:
    bracket: tuple[float, float]
    tol: float = 1e-6
    objective: str = "global-error"

    def __post_init__(self):
        lo, hi = self.bracket
        if not 0 < lo < hi:
            raise ValueError(f"bracket must satisfy 0 < lo < hi, got {self.bracket}")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")


def run_objective(spec: SchemeSpec, problem: Problem, h: float, omega: float, objective: str, reference=None) -> float:
    rep = integrate(spec, problem, StepConfig(h=h, omega=omega), reference=reference).report
    if objective == "global-error":
        return rep.max_global_error
    return rep.max_drift


def estimate_omega(
    spec: SchemeSpec,
    problem: Problem,
    h: float,
    search: FreqSearch,
    reference=None,
) -> SearchResult:
    """Fitting frequency minimizing the run-level error over ``search.bracket``.

    Every probe is one full ``integrate`` run at the probed frequency.
    Integrator failures are re-raised with the offending frequency attached.
    """
    if search.objective == "global-error" and problem.exact is None and reference is None:
        raise ValueError(f"problem {problem.name!r} has no exact solution; pass a reference")
    if search.objective == "invariant-drift" and problem.invariant is None:
        raise ValueError(f"problem {problem.name!r} has no invariant")

    def objective(omega):
        try:
            return run_objective(spec, problem, h, omega, search.objective, reference)
        except (RuntimeError, ValueError) as exc:
            raise type(exc)(f"probe at omega = {omega!r}: {exc}") from exc

    return golden_section(objective, search.bracket, search.tol)


def dense_scan(spec: SchemeSpec, problem: Problem, h: float, omegas, objective: str = "global-error", reference=None):
    """Objective on a grid of frequencies; the brute-force check for :func:`estimate_omega`."""
    return np.array([run_objective(spec, problem, h, w, objective, reference) for w in omegas])
