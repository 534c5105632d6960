"""Linear stability and phase analysis on the test equation y' = i*Lambda*y.

With theta = Lambda*h and v = omega*h one step multiplies y_n by

    R(theta, v) = 1 + i*theta - theta^2 b^T Y,   (I + theta^2 A) Y = e + i*theta (xi*c)

which is what the integrator does on the rotation system x' = -Lambda y,
y' = Lambda x.  Dispersion and dissipation are ``theta - arg R`` and
``1 - |R|``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .tableau import NumericTableau, PoleError, SchemeSpec, eval_tableau

__all__ = [
    "StabilitySample",
    "StabilityRegion",
    "PhaseReport",
    "SingularStageError",
    "stability_R",
    "stability_R_split",
    "stability_R_batch",
    "stability_region",
    "phase_curves",
    "phase_leading_terms",
    "leading_dispersion",
    "leading_dissipation",
    "LEADING_PHASE_TERMS",
    "ROUNDOFF_FLOOR",
]

STABLE_TOL = 1e-12
ROUNDOFF_FLOOR = 1e-13


class SingularStageError(ValueError):
    """I + theta^2 A(v) is singular (tableau pole or resonance)."""


@dataclass(frozen=True)
class StabilitySample:
    theta: float
    v: float
    R: complex


def _stage_rhs(tab: NumericTableau, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    return np.ones(tab.s) + 1j * theta[..., None] * (tab.xi * tab.c)


def stability_R_batch(tab: NumericTableau, theta) -> np.ndarray:
    """R for an array of theta at the single v of ``tab``.

    Entries where the stage system is singular come back as NaN.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    s = tab.s
    M = np.eye(s) + theta[:, None, None] ** 2 * tab.A
    rhs = _stage_rhs(tab, theta)
    out = np.full(theta.shape, np.nan + 0j)
    cond = np.linalg.cond(M)
    ok = np.isfinite(cond) & (cond < 1e14)
    if ok.any():
        Y = np.linalg.solve(M[ok].astype(complex), rhs[ok][..., None])[..., 0]
        out[ok] = 1.0 + 1j * theta[ok] - theta[ok] ** 2 * (Y @ tab.b)
    return out


def stability_R(spec: SchemeSpec, theta: float, v: float) -> complex:
    """Amplification factor of one step on y' = i*Lambda*y, theta = Lambda*h, v = omega*h."""
    tab = eval_tableau(spec, v)
    R = stability_R_batch(tab, [theta])[0]
    if not np.isfinite(R):
        raise SingularStageError(f"{spec}: stage system singular at theta = {theta!r}, v = {v!r}")
    return complex(R)


def stability_R_split(spec: SchemeSpec, theta: float, v: float) -> complex:
    """The alternative grouping theta*(1 - theta^2) b^T (I + theta^2 A)^-1 (xi*c) for the imaginary part.

    Kept only for comparison with :func:`stability_R`; it is not the amplification
    factor of the scheme.
    """
    tab = eval_tableau(spec, v)
    M = np.eye(tab.s) + theta**2 * tab.A
    try:
        u = np.linalg.solve(M, np.ones(tab.s))
        w = np.linalg.solve(M, tab.xi * tab.c)
    except np.linalg.LinAlgError as exc:
        raise SingularStageError(str(exc)) from exc
    return complex(1.0 - theta**2 * (tab.b @ u), theta * (1.0 - theta**2) * (tab.b @ w))


@dataclass
class StabilityRegion:
    """|R| on a (v, theta) grid; ``abs_R[i, j]`` belongs to ``theta[i]``, ``v[j]``."""

    scheme: str
    theta: np.ndarray
    v: np.ndarray
    abs_R: np.ndarray
    mask: np.ndarray
    pole: np.ndarray

    @property
    def stable_cells(self) -> int:
        return int(self.mask.sum())

    def to_csv(self, fh=None) -> Optional[str]:
        """Rows ``theta, omega_h, abs_R, in_region`` in (theta, v) index order."""
        own = fh is None
        fh = io.StringIO() if own else fh
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["theta", "omega_h", "abs_R", "in_region"])
        for i, th in enumerate(self.theta):
            for j, v in enumerate(self.v):
                w.writerow([f"{th:.17g}", f"{v:.17g}", f"{self.abs_R[i, j]:.17g}", int(self.mask[i, j])])
        return fh.getvalue() if own else None


def stability_region(
    spec: SchemeSpec,
    theta_range=(0.0, 5.0),
    v_range=(0.0, 5.0),
    grid_n: int = 500,
) -> StabilityRegion:
    """Scan |R| on a ``grid_n`` x ``grid_n`` grid.

    A cell is stable when |R| <= 1 + 1e-12.  Cells on a tableau pole or with a
    singular stage system count as unstable and are flagged in ``pole``.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be >= 2")
    theta = np.linspace(*theta_range, grid_n)
    v = np.linspace(*v_range, grid_n)
    abs_R = np.full((grid_n, grid_n), np.nan)
    for j, vj in enumerate(v):
        try:
            tab = eval_tableau(spec, vj)
        except PoleError:
            continue
        abs_R[:, j] = np.abs(stability_R_batch(tab, theta))
    pole = ~np.isfinite(abs_R)
    mask = np.zeros_like(pole)
    mask[~pole] = abs_R[~pole] <= 1.0 + STABLE_TOL
    return StabilityRegion(str(spec), theta, v, abs_R, mask, pole)


def phase_curves(spec: SchemeSpec, r: float, theta_seq) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Disp(theta) and Dis(theta) along v = r*theta.

    arg R is unwrapped along a fine grid from theta = 0, so Disp -> 0 as
    theta -> 0 even once arg R passes pi.
    """
    theta_seq = np.asarray(theta_seq, dtype=float)
    if np.any(theta_seq <= 0):
        raise ValueError("theta values must be positive")
    order = np.argsort(theta_seq)
    ts = theta_seq[order]
    # fine path from 0 so unwrapping never skips a branch
    n_path = max(64, int(np.ceil(ts[-1] / 0.05)))
    path = np.union1d(np.linspace(0.0, ts[-1], n_path + 1), ts)
    R = np.array([stability_R(spec, t, r * t) for t in path])
    phase = np.unwrap(np.angle(R))
    idx = np.searchsorted(path, ts)
    disp = np.empty_like(ts)
    dis = np.empty_like(ts)
    disp[order] = ts - phase[idx]
    dis[order] = 1.0 - np.abs(R[idx])
    return theta_seq, disp, dis


@dataclass(frozen=True)
class PhaseReport:
    scheme: str
    r: float
    disp_order: Optional[int]
    disp_coeff: float
    dis_order: Optional[int]
    dis_coeff: float
    disp_slope: float = math.nan
    dis_slope: float = math.nan
    floor_limited: bool = False


def _leading_term(theta, err, floor, n_fit):
    """Integer power q and coefficient C of err ~ C theta^q.

    Uses the ``n_fit`` smallest theta whose residual clears ``floor``.  q is
    the rounded log-log slope; C is then refined by fitting
    err / theta^q = C + D theta^2 and reading off the intercept.
    """
    keep = np.flatnonzero(np.abs(err) > floor)
    if len(keep) < 3:
        return None, 0.0, math.nan
    keep = keep[np.argsort(theta[keep])][:n_fit]
    t, e = theta[keep], err[keep]
    slope = float(np.polyfit(np.log(t), np.log(np.abs(e)), 1)[0])
    q = int(round(slope))
    scaled = e / t**q
    C = float(np.polyfit(t**2, scaled, 1)[1])
    return q, C, slope


DEFAULT_THETA = 0.8 * 2.0 ** (-0.5 * np.arange(16))


def phase_leading_terms(
    spec: SchemeSpec,
    r: float,
    theta_seq=DEFAULT_THETA,
    floor: float = ROUNDOFF_FLOOR,
    n_fit: int = 5,
) -> PhaseReport:
    """Leading powers and coefficients of dispersion and dissipation at fixed r = v/theta.

    ``disp_order`` is the fitted power minus one.  Points with residual below
    ``floor`` are dropped and the ``n_fit`` smallest remaining theta are
    fitted; if fewer than three survive the order is ``None`` and
    ``floor_limited`` is set.
    """
    theta_seq = np.asarray(theta_seq, dtype=float)
    if len(theta_seq) < 5:
        raise ValueError("need at least 5 theta values")
    if np.any(np.diff(theta_seq) >= 0):
        raise ValueError("theta_seq must be strictly decreasing")
    if abs(abs(r) - 1.0) < 1e-14:
        raise ValueError("r = 1 makes both errors vanish identically")
    theta, disp, dis = phase_curves(spec, r, theta_seq)
    qp, Cp, sp = _leading_term(theta, disp, floor, n_fit)
    qd, Cd, sd = _leading_term(theta, dis, floor, n_fit)
    return PhaseReport(
        scheme=str(spec),
        r=float(r),
        disp_order=None if qp is None else qp - 1,
        disp_coeff=Cp,
        dis_order=None if qd is None else qd - 1,
        dis_coeff=Cd,
        disp_slope=sp,
        dis_slope=sd,
        floor_limited=qp is None or qd is None,
    )


_S5 = math.sqrt(5.0)
_S6 = math.sqrt(6.0)

# (dispersion power, coefficient(r, phi)), (dissipation power, coefficient(r, phi))
LEADING_PHASE_TERMS = {
    "2s4a": (
        (5, lambda r, phi: (-11 + 20 * phi) * (1 - r * r) / 480),
        (6, lambda r, phi: (-230 + 360 * phi - 7 * r * r) * (1 - r * r) / 23040),
    ),
    "2s4b": (
        (5, lambda r, phi: (-3 + 40 * phi) * (1 - r * r) / 240),
        (6, lambda r, phi: (-50 + 720 * phi - r * r) * (1 - r * r) / 5760),
    ),
    "2s5": (
        (7, lambda r, phi: (1 - r * r) * ((168 * _S6 - 379) * r * r + 84 * _S6 - 162) / 252000),
        (6, lambda r, phi: (r**4 + r * r - 2) / 14400),
    ),
    "3s6": (
        (7, lambda r, phi: (1 - r * r) * ((17 * _S5 - 10) * r * r - 4 * _S5 - 10) / (3780 * (5 + _S5) ** 3)),
        (
            8,
            lambda r, phi: (1 - r * r)
            * ((15 + _S5) * r**4 + 175 * (5 * _S5 - 9) * r * r - 175 * (1 + 3 * _S5))
            / (15120000 * (3 + _S5)),
        ),
    ),
}


def leading_dispersion(family: str, r: float, phi: float = 0.0) -> tuple[int, float]:
    """Closed-form leading dispersion term (power of theta, coefficient)."""
    q, fn = LEADING_PHASE_TERMS[family][0]
    return q, fn(r, phi)


def leading_dissipation(family: str, r: float, phi: float = 0.0) -> tuple[int, float]:
    """Closed-form leading dissipation term (power of theta, coefficient)."""
    q, fn = LEADING_PHASE_TERMS[family][1]
    return q, fn(r, phi)
