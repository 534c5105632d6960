"""Coefficient families of the exponentially fitted two-derivative DIRK schemes.

A modified TDDIRK step reads::

    Y_i     = y_n + xi_i c_i h f(y_n) + h^2 sum_{j<=i} a_ij g(Y_j)
    y_{n+1} = y_n + h f(y_n) + h^2 sum_i b_i g(Y_i)

with g = f'f.  The coefficients a_ij, b_i, xi_i are even functions of
mu = i*omega*h; here they are always evaluated in real arithmetic through
v = omega*h (cos/sin of multiples of v).

Three families are provided:

* ``EFTDDIRK2s4(c1, c2, phi)`` -- two stages, order 4, requires
  ``2*(c1 + c2 - 3*c1*c2) == 1``.
* ``EFTDDIRK2s5`` -- two stages, order 5.
* ``EFTDDIRK3s6`` -- three stages, order 6.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "SchemeSpec",
    "NumericTableau",
    "SeriesTableau",
    "PoleError",
    "build_scheme",
    "eftddirk2s4",
    "eftddirk2s5",
    "eftddirk3s6",
    "eval_tableau",
    "taylor_tableau",
    "pole_free_radius",
    "PRESETS",
]

SERIES_SWITCH = 1e-3
POLE_TOL = 1e-8
CONSTRAINT_TOL = 1e-12

_SQRT5 = math.sqrt(5.0)
_SQRT6 = math.sqrt(6.0)


class PoleError(ValueError):
    """Raised when v = omega*h hits a denominator zero of the tableau."""


@dataclass(frozen=True)
class SchemeSpec:
    """Parameters that pin down one fitted scheme.

    ``lower`` holds the free strictly-lower-triangular entries a_ij (constant
    in v), ``fixed_b`` the free weights keyed by stage index; the remaining
    entries are solved from the fitting conditions.
    """

    name: str
    c: tuple[float, ...]
    order: int
    lower: tuple[tuple[float, ...], ...]
    fixed_b: tuple[tuple[int, float], ...] = ()
    params: tuple[tuple[str, float], ...] = field(default=(), compare=False)

    @property
    def stages(self) -> int:
        return len(self.c)

    @property
    def c_max(self) -> float:
        return max(abs(ci) for ci in self.c)

    def __str__(self) -> str:
        return self.name


def _fmt(x) -> str:
    fr = Fraction(x).limit_denominator(1000)
    if abs(float(fr) - x) < 1e-14:
        return str(fr)
    return f"{x:.6g}"


def eftddirk2s4(c1: float, c2: float | None = None, phi: float = 0.0) -> SchemeSpec:
    """Two-stage fourth-order family.

    If ``c2`` is omitted it is solved from ``2(c1 + c2 - 3 c1 c2) = 1``.
    """
    c1 = float(c1)
    if c2 is None:
        if abs(2.0 - 6.0 * c1) < 1e-14:
            raise ValueError("c1 = 1/3 admits no c2 satisfying the order-4 constraint")
        c2 = (1.0 - 2.0 * c1) / (2.0 - 6.0 * c1)
    c2 = float(c2)
    if abs(c1 - c2) < 1e-12:
        raise ValueError(f"abscissae must differ, got c1 = c2 = {c1}")
    defect = 2.0 * (c1 + c2 - 3.0 * c1 * c2) - 1.0
    if abs(defect) > CONSTRAINT_TOL:
        raise ValueError(
            f"(c1, c2) = ({c1}, {c2}) violates 2(c1 + c2 - 3 c1 c2) = 1 (defect {defect:.3e})"
        )
    name = f"EFTDDIRK2s4({_fmt(c1)},{_fmt(c2)},{_fmt(phi)})"
    return SchemeSpec(
        name=name,
        c=(c1, c2),
        order=4,
        lower=((), (float(phi),)),
        params=(("c1", c1), ("c2", c2), ("phi", float(phi))),
    )


def eftddirk2s5() -> SchemeSpec:
    c1 = (4.0 - _SQRT6) / 10.0
    c2 = (4.0 + _SQRT6) / 10.0
    phi = (2.0 + 3.0 * _SQRT6) / 50.0
    return SchemeSpec(
        name="EFTDDIRK2s5",
        c=(c1, c2),
        order=5,
        lower=((), (phi,)),
        params=(("c1", c1), ("c2", c2), ("phi", phi)),
    )


def eftddirk3s6() -> SchemeSpec:
    c = (0.0, (5.0 - _SQRT5) / 10.0, (5.0 + _SQRT5) / 10.0)
    chi = (3.0 - _SQRT5) / 30.0
    beta = (1.0 + _SQRT5) / 60.0
    delta = (5.0 + 3.0 * _SQRT5) / 60.0
    eta = (5.0 + _SQRT5) / 24.0
    return SchemeSpec(
        name="EFTDDIRK3s6",
        c=c,
        order=6,
        lower=((), (chi,), (beta, delta)),
        fixed_b=((1, eta),),
        params=(("chi", chi), ("beta", beta), ("delta", delta), ("eta", eta)),
    )


PRESETS = {
    "2s4a": lambda: eftddirk2s4(0.25, 1.0, 0.0),
    "2s4a-opt": lambda: eftddirk2s4(0.25, 1.0, 11.0 / 20.0),
    "2s4b": lambda: eftddirk2s4(0.0, 0.5, 0.0),
    "2s4b-opt": lambda: eftddirk2s4(0.0, 0.5, 3.0 / 40.0),
    "2s5": eftddirk2s5,
    "3s6": eftddirk3s6,
}
PRESETS["2s4opt"] = PRESETS["2s4a-opt"]


def build_scheme(ident: str, **params) -> SchemeSpec:
    """Build a scheme from an identifier.

    Accepted identifiers: ``"2s4"`` / ``"EFTDDIRK2s4"`` with keyword
    parameters ``c1``, ``c2`` (optional) and ``phi``; ``"2s5"``; ``"3s6"``;
    and the presets in :data:`PRESETS`.
    """
    key = ident.strip()
    if key.upper().startswith("EFTDDIRK"):
        key = key[len("EFTDDIRK"):]
    key = key.lower()
    if key == "2s4":
        if "c1" not in params:
            raise ValueError("EFTDDIRK2s4 needs c1 (and optionally c2, phi)")
        return eftddirk2s4(params["c1"], params.get("c2"), params.get("phi", 0.0))
    if params:
        raise ValueError(f"scheme {ident!r} takes no parameters")
    try:
        return PRESETS[key]()
    except KeyError:
        raise ValueError(f"unknown scheme {ident!r}") from None


@dataclass(frozen=True)
class NumericTableau:
    """Tableau evaluated at one value of v = omega*h."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    xi: np.ndarray
    v: float

    @property
    def s(self) -> int:
        return len(self.c)

    def dump(self) -> str:
        """Plain-text block: one row per stage ``c | xi | A-row``, then ``b``."""
        fmt = "{:.17g}".format
        lines = []
        for i in range(self.s):
            row = " ".join(fmt(a) for a in self.A[i])
            lines.append(f"{fmt(self.c[i])} | {fmt(self.xi[i])} | {row}")
        lines.append("b | " + " ".join(fmt(x) for x in self.b))
        return "\n".join(lines)


@dataclass(frozen=True)
class SeriesTableau:
    """Taylor coefficients in powers of mu^2 = -v^2.

    ``A[k]``, ``b[k]``, ``xi[k]`` hold the coefficient of mu^(2k), k = 0, 1, 2,
    so that e.g. ``b(v) = b[0] - b[1] v^2 + b[2] v^4 + O(v^6)``.
    """

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    xi: np.ndarray

    def evaluate(self, v: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        mu2 = -v * v
        w = np.array([1.0, mu2, mu2 * mu2])
        return (
            np.tensordot(w, self.A, axes=1),
            w @ self.b,
            w @ self.xi,
        )


def _closed_form(spec: SchemeSpec, v):
    """Fitted coefficients for scalar v (real or complex), no pole checks."""
    s = spec.stages
    c = spec.c
    dtype = complex if np.iscomplexobj(v) else float
    A = np.zeros((s, s), dtype=dtype)
    xi = np.ones(s, dtype=dtype)
    v2 = v * v
    for i in range(s):
        ci = c[i]
        cos_i = np.cos(ci * v)
        acc_cos = 0.0
        acc_sin = 0.0
        for j, aij in enumerate(spec.lower[i]):
            A[i, j] = aij
            acc_cos = acc_cos + aij * np.cos(c[j] * v)
            acc_sin = acc_sin + aij * np.sin((c[j] - ci) * v)
        A[i, i] = (1.0 - cos_i - v2 * acc_cos) / (v2 * cos_i)
        if ci != 0.0:
            xi[i] = (np.sin(ci * v) + v2 * acc_sin) / (ci * v * cos_i)

    b = np.zeros(s, dtype=dtype)
    fixed = dict(spec.fixed_b)
    p, q = [k for k in range(s) if k not in fixed]
    cp, cq = c[p], c[q]
    extra_p = 0.0
    extra_q = 0.0
    for k, bk in fixed.items():
        b[k] = bk
        extra_p = extra_p + bk * np.sin((c[k] - cq) * v)
        extra_q = extra_q + bk * np.sin((cp - c[k]) * v)
    den = v2 * np.sin((cp - cq) * v)
    b[p] = -(np.sin(cq * v) + np.sin((1.0 - cq) * v) - v * np.cos(cq * v) + v2 * extra_p) / den
    b[q] = -(v * np.cos(cp * v) - np.sin(cp * v) - np.sin((1.0 - cp) * v) + v2 * extra_q) / den
    return A, b, xi


def _weight_pair(spec: SchemeSpec) -> tuple[int, int]:
    fixed = dict(spec.fixed_b)
    p, q = [k for k in range(spec.stages) if k not in fixed]
    return p, q


def pole_free_radius(spec: SchemeSpec) -> float:
    """Smallest |v| > 0 at which a tableau denominator vanishes."""
    radii = [math.pi / (2.0 * abs(ci)) for ci in spec.c if ci != 0.0]
    p, q = _weight_pair(spec)
    radii.append(math.pi / abs(spec.c[p] - spec.c[q]))
    return min(radii)


def _check_poles(spec: SchemeSpec, v: float) -> None:
    for ci in spec.c:
        if ci != 0.0 and abs(math.cos(ci * v)) < POLE_TOL:
            raise PoleError(f"{spec}: cos({ci:.6g}*v) ~ 0 at v = {v:.17g}")
    p, q = _weight_pair(spec)
    if abs(math.sin((spec.c[p] - spec.c[q]) * v)) < POLE_TOL:
        raise PoleError(
            f"{spec}: sin(({spec.c[p]:.6g}-{spec.c[q]:.6g})*v) ~ 0 at v = {v:.17g}"
        )


def eval_tableau(spec: SchemeSpec, v: float) -> NumericTableau:
    """Evaluate the tableau at v = omega*h.

    For ``|v| * c_max < 1e-3`` the entries come from the series through v^4;
    otherwise from the closed forms.  Raises :class:`PoleError` near a
    denominator zero.
    """
    v = float(v)
    if not math.isfinite(v):
        raise ValueError(f"v must be finite, got {v}")
    c = np.asarray(spec.c, dtype=float)
    if abs(v) * max(spec.c_max, 1e-300) < SERIES_SWITCH:
        A, b, xi = _series(spec).evaluate(v)
    else:
        _check_poles(spec, v)
        A, b, xi = _closed_form(spec, v)
    for arr in (A, b, xi):
        arr.setflags(write=False)
    c.setflags(write=False)
    return NumericTableau(c=c, A=A, b=b, xi=xi, v=v)


@functools.lru_cache(maxsize=64)
def _series(spec: SchemeSpec) -> SeriesTableau:
    return taylor_tableau(spec)


def taylor_tableau(spec: SchemeSpec, v_probe: float = 0.5, n_probe: int = 64) -> SeriesTableau:
    """Series coefficients (sigma = 0, 2, 4) of every tableau entry.

    The closed forms are evaluated at ``n_probe`` points on the circle
    ``|v| = v_probe`` in the complex v-plane and the trigonometric
    interpolant is read off (a discrete Cauchy integral).  Away from the
    real axis near 0 the closed forms do not suffer cancellation, so the
    coefficients are accurate to ~1e-14 as long as ``v_probe`` sits well
    inside the pole-free disc.
    """
    v_probe = float(v_probe)
    r_pole = pole_free_radius(spec)
    if not (1e-4 <= v_probe <= 0.75 * r_pole):
        raise ValueError(
            f"probe radius {v_probe} ill-conditioned; need 1e-4 <= radius <= {0.75 * r_pole:.4g}"
        )
    if n_probe < 16:
        raise ValueError("need at least 16 probe points")
    k = np.arange(n_probe)
    z = v_probe * np.exp(2j * np.pi * (k + 0.5) / n_probe)
    s = spec.stages
    vals_A = np.empty((n_probe, s, s), dtype=complex)
    vals_b = np.empty((n_probe, s), dtype=complex)
    vals_xi = np.empty((n_probe, s), dtype=complex)
    for m, zm in enumerate(z):
        vals_A[m], vals_b[m], vals_xi[m] = _closed_form(spec, zm)

    def coeffs(vals):
        out = []
        for power, sign in ((0, 1.0), (2, -1.0), (4, 1.0)):
            w = z ** (-power)
            w = w.reshape((-1,) + (1,) * (vals.ndim - 1))
            out.append(sign * np.mean(vals * w, axis=0).real)
        return np.stack(out)

    return SeriesTableau(
        c=np.asarray(spec.c, dtype=float),
        A=coeffs(vals_A),
        b=coeffs(vals_b),
        xi=coeffs(vals_xi),
    )
