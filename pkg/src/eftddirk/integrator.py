"""Fixed-step driver for the fitted two-derivative DIRK schemes.

Stages are solved one after the other by fixed-point iteration::

    Y_i^(0)   = y_n + c_i h f_n + (c_i h)^2 / 2 g_n
    Y_i^(r+1) = y_n + xi_i c_i h f_n + h^2 (sum_{j<i} a_ij g(Y_j) + a_ii g(Y_i^(r)))

stopping once ``||Y_i^(r+1) - Y_i^(r)||_2 < fp_tol``.  A stage with
``a_ii == 0`` is explicit and costs no iteration.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .tableau import NumericTableau, SchemeSpec, eval_tableau

__all__ = [
    "Problem",
    "StepConfig",
    "RunReport",
    "RunResult",
    "StageResult",
    "ConvergenceError",
    "solve_stage",
    "step",
    "integrate",
    "stage_residual",
]


@dataclass(frozen=True)
class Problem:
    """Autonomous system y' = f(y) with its second derivative g(y) = f'(y) f(y)."""

    name: str
    f: Callable[[np.ndarray], np.ndarray]
    g: Callable[[np.ndarray], np.ndarray]
    y0: np.ndarray
    t_span: tuple[float, float]
    omega_hint: Optional[float] = None
    exact: Optional[Callable[[float], np.ndarray]] = None
    invariant: Optional[Callable[[np.ndarray], float]] = None
    params: dict = field(default_factory=dict, compare=False)

    @property
    def dim(self) -> int:
        return len(self.y0)

    def with_span(self, t0: float, t_end: float) -> "Problem":
        return Problem(
            self.name, self.f, self.g, self.y0, (float(t0), float(t_end)),
            self.omega_hint, self.exact, self.invariant, self.params,
        )


@dataclass(frozen=True)
class StepConfig:
    h: float
    omega: float
    fp_tol: float = 1e-12
    fp_max_iter: int = 100

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"h must be positive, got {self.h}")
        if not self.fp_tol > 0:
            raise ValueError(f"fp_tol must be positive, got {self.fp_tol}")
        if self.fp_max_iter < 1:
            raise ValueError("fp_max_iter must be >= 1")


class ConvergenceError(RuntimeError):
    """Fixed-point stage iteration failed (no convergence, divergence or NaN)."""

    def __init__(self, msg: str, step_index: Optional[int] = None, stage: Optional[int] = None):
        super().__init__(msg if step_index is None else f"step {step_index}: {msg}")
        self.step_index = step_index
        self.stage = stage


@dataclass
class StageResult:
    Y: np.ndarray
    gY: np.ndarray
    iterations: int
    g_evals: int


def solve_stage(
    tab: NumericTableau,
    problem: Problem,
    y_n: np.ndarray,
    f_n: np.ndarray,
    g_n: np.ndarray,
    i: int,
    prior_g,
    h: float,
    fp_tol: float = 1e-12,
    fp_max_iter: int = 100,
) -> StageResult:
    """Solve internal stage ``i`` (0-based) given g(Y_j) for j < i."""
    ci = tab.c[i]
    base = y_n + (h * tab.xi[i] * ci) * f_n
    for j in range(i):
        base = base + (h * h * tab.A[i, j]) * prior_g[j]
    aii = h * h * tab.A[i, i]
    if aii == 0.0:
        return StageResult(base, problem.g(base), 0, 1)

    blowup = 1e8 * max(np.linalg.norm(y_n), 1.0)
    Y = y_n + (ci * h) * f_n + (0.5 * (ci * h) ** 2) * g_n
    g_evals = 0
    for it in range(1, fp_max_iter + 1):
        Y_new = base + aii * problem.g(Y)
        g_evals += 1
        if not np.all(np.isfinite(Y_new)):
            raise ConvergenceError(f"NaN/inf in stage {i + 1} at iteration {it}", stage=i)
        delta = np.linalg.norm(Y_new - Y)
        Y = Y_new
        if delta < fp_tol:
            return StageResult(Y, problem.g(Y), it, g_evals + 1)
        if np.linalg.norm(Y) > blowup:
            raise ConvergenceError(f"stage {i + 1} diverged at iteration {it}", stage=i)
    raise ConvergenceError(
        f"stage {i + 1} did not converge in {fp_max_iter} iterations (last update {delta:.3e})",
        stage=i,
    )


def stage_residual(tab: NumericTableau, problem: Problem, y_n, Ys, h: float) -> np.ndarray:
    """2-norm residual of every stage equation at the given stage vectors."""
    f_n = problem.f(y_n)
    gs = [problem.g(Y) for Y in Ys]
    out = []
    for i, Y in enumerate(Ys):
        rhs = y_n + h * tab.xi[i] * tab.c[i] * f_n
        for j in range(i + 1):
            rhs = rhs + h * h * tab.A[i, j] * gs[j]
        out.append(np.linalg.norm(Y - rhs))
    return np.array(out)


def _step(tab, problem, y_n, h, fp_tol, fp_max_iter):
    f_n = problem.f(y_n)
    g_n = problem.g(y_n)
    gs = []
    Ys = []
    iters = 0
    g_evals = 1
    for i in range(tab.s):
        st = solve_stage(tab, problem, y_n, f_n, g_n, i, gs, h, fp_tol, fp_max_iter)
        gs.append(st.gY)
        Ys.append(st.Y)
        iters += st.iterations
        g_evals += st.g_evals
    y_next = y_n + h * f_n
    for bi, gi in zip(tab.b, gs):
        y_next = y_next + (h * h * bi) * gi
    return y_next, Ys, iters, g_evals


def step(tab: NumericTableau, problem: Problem, y_n, cfg: StepConfig) -> np.ndarray:
    """One step y_n -> y_{n+1}; ``tab`` must be evaluated at ``cfg.omega * cfg.h``."""
    y_n = np.asarray(y_n, dtype=float)
    return _step(tab, problem, y_n, cfg.h, cfg.fp_tol, cfg.fp_max_iter)[0]


@dataclass
class RunReport:
    scheme: str
    h: float
    steps: int
    max_global_error: Optional[float]
    invariant_drift: Optional[np.ndarray]
    wall_seconds: float
    fp_iterations: int
    f_evals: int
    g_evals: int

    @property
    def max_drift(self) -> Optional[float]:
        if self.invariant_drift is None:
            return None
        return float(np.max(self.invariant_drift))


@dataclass
class RunResult:
    report: RunReport
    t: np.ndarray
    y: np.ndarray

    def at(self, t: float, tol: float = 1e-9) -> np.ndarray:
        """State at an output time (exact grid lookup, no interpolation)."""
        k = int(np.searchsorted(self.t, t))
        for j in (k - 1, k):
            if 0 <= j < len(self.t) and abs(self.t[j] - t) <= tol * max(1.0, abs(t)):
                return self.y[j]
        raise KeyError(f"t = {t!r} is not an output time of this run")


def _grid(t0: float, t_end: float, h: float) -> list[float]:
    span = t_end - t0
    n = span / h
    n_full = round(n)
    if abs(n - n_full) <= 1e-9 * max(1.0, n):
        return [h] * int(n_full)
    n_full = math.floor(n)
    last = span - n_full * h
    return [h] * n_full + ([last] if last > 0 else [])


def integrate(
    spec: SchemeSpec,
    problem: Problem,
    cfg: StepConfig,
    reference: Optional[Callable[[float], np.ndarray]] = None,
    stride: int = 1,
) -> RunResult:
    """March ``problem`` over its ``t_span`` with fixed stepsize ``cfg.h``.

    The global error is measured in the max-norm at every step against
    ``reference`` (or ``problem.exact``); the trajectory keeps every
    ``stride``-th step plus the endpoint.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    t0, t_end = (float(x) for x in problem.t_span)
    if not (math.isfinite(t0) and math.isfinite(t_end)) or t_end <= t0:
        raise ValueError(f"bad t_span {problem.t_span}")
    exact = reference if reference is not None else problem.exact
    steps = _grid(t0, t_end, cfg.h)
    tabs = {}

    def tableau_for(h):
        if h not in tabs:
            tabs[h] = eval_tableau(spec, cfg.omega * h)
        return tabs[h]

    y = np.array(problem.y0, dtype=float)
    ts = [t0]
    ys = [y.copy()]
    mge = 0.0 if exact is not None else None
    drift = None
    if problem.invariant is not None:
        H0 = problem.invariant(y)
        drift = np.empty(len(steps) + 1)
        drift[0] = 0.0
    fp_iters = 0
    g_evals = 0
    start = time.perf_counter()
    n_steps = len(steps)
    for n, hn in enumerate(steps):
        tab = tableau_for(hn)
        try:
            y, _, it, ge = _step(tab, problem, y, hn, cfg.fp_tol, cfg.fp_max_iter)
        except ConvergenceError as exc:
            raise ConvergenceError(str(exc), step_index=n, stage=exc.stage) from exc
        fp_iters += it
        g_evals += ge
        t = t_end if n + 1 == n_steps else t0 + (n + 1) * cfg.h
        if exact is not None:
            mge = max(mge, float(np.max(np.abs(y - exact(t)))))
        if drift is not None:
            drift[n + 1] = abs(problem.invariant(y) - H0)
        if (n + 1) % stride == 0 or n + 1 == n_steps:
            ts.append(t)
            ys.append(y.copy())
    wall = time.perf_counter() - start
    report = RunReport(
        scheme=str(spec),
        h=cfg.h,
        steps=n_steps,
        max_global_error=mge,
        invariant_drift=drift,
        wall_seconds=wall,
        fp_iterations=fp_iters,
        f_evals=n_steps,
        g_evals=g_evals,
    )
    return RunResult(report, np.array(ts), np.array(ys))
