"""Exponential-fitting residuals of a tableau.

For ``y_k(x) = x**k * exp(lambda*x)`` the stage and update operators::

    L_i y(x) = y(x + c_i h) - y(x) - xi_i c_i h y'(x) - h^2 sum_j a_ij y''(x + c_j h)
    L   y(x) = y(x + h)     - y(x) -         h y'(x) - h^2 sum_i b_i  y''(x + c_i h)

vanish on ``span{x^k e^(lambda x)}`` iff ``L_i y_k(0) = L y_k(0) = 0`` for
each k.  The residuals returned here are the dimensionless "left minus right"
forms of those conditions, i.e. ``-L y_k(0) / h**k``.  They are computed in
complex arithmetic straight from the exponentials, never from series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tableau import NumericTableau

__all__ = [
    "FitProbe",
    "internal_fit_residual",
    "final_fit_residual",
    "oscillatory_probes",
    "max_fit_residual",
]


@dataclass(frozen=True)
class FitProbe:
    lam: complex
    h: float
    K: int = 0
    L: int = 1

    def __post_init__(self):
        if self.K < 0:
            raise ValueError("K must be nonnegative")
        if self.L < 1:
            raise ValueError("L must be positive")

    @property
    def z(self) -> complex:
        """lambda*h."""
        return complex(self.lam) * self.h


def oscillatory_probes(omega: float, h: float, K: int = 0, L: int = 1) -> list[FitProbe]:
    """Probes lambda = +-i*l*omega, l = 1..L."""
    return [FitProbe(s * 1j * l * omega, h, K, L) for l in range(1, L + 1) for s in (1, -1)]


def _kernel(k: int, c, z: complex) -> np.ndarray:
    """h^(2-k) * y_k''(c h) for y_k = x^k e^(lambda x), as a function of z = lambda h."""
    c = np.asarray(c, dtype=float)
    e = np.exp(c * z)
    out = z * z * c**k * e
    if k >= 1:
        out = out + 2 * k * z * c ** (k - 1) * e
    if k >= 2:
        out = out + k * (k - 1) * c ** (k - 2) * e
    return out


def _scaled_values(k: int, c: float, z: complex) -> complex:
    """h^-k * y_k(c h)."""
    return c**k * np.exp(c * z)


def internal_fit_residual(tab: NumericTableau, i: int, probe: FitProbe, k: int = 0) -> complex:
    """Residual of the degree-k fitting condition of internal stage ``i`` (0-based)."""
    if not 0 <= i < tab.s:
        raise IndexError(f"stage index {i} out of range for {tab.s} stages")
    if k < 0 or k > probe.K:
        raise ValueError(f"k must lie in [0, K={probe.K}]")
    z = probe.z
    ci = float(tab.c[i])
    lhs = complex(tab.A[i, : i + 1] @ _kernel(k, tab.c[: i + 1], z))
    # h^-k * (y_k(0) + xi_i c_i h y_k'(0))
    if k == 0:
        lhs += 1.0 + tab.xi[i] * ci * z
    elif k == 1:
        lhs += tab.xi[i] * ci
    return lhs - _scaled_values(k, ci, z)


def final_fit_residual(tab: NumericTableau, probe: FitProbe, k: int = 0) -> complex:
    """Residual of the degree-k fitting condition of the update stage."""
    if k < 0 or k > probe.K:
        raise ValueError(f"k must lie in [0, K={probe.K}]")
    z = probe.z
    lhs = complex(tab.b @ _kernel(k, tab.c, z))
    if k == 0:
        lhs += 1.0 + z
    elif k == 1:
        lhs += 1.0
    return lhs - _scaled_values(k, 1.0, z)


def max_fit_residual(tab: NumericTableau, omega: float, h: float) -> float:
    """Largest |residual| over all k=0 conditions at lambda = +-i*omega."""
    worst = 0.0
    for probe in oscillatory_probes(omega, h):
        for i in range(tab.s):
            worst = max(worst, abs(internal_fit_residual(tab, i, probe)))
        worst = max(worst, abs(final_fit_residual(tab, probe)))
    return worst if math.isfinite(worst) else math.inf
