"""Benchmark problems with analytic first and second derivatives.

Each factory returns a :class:`~eftddirk.integrator.Problem` whose ``g`` is
the exact second derivative f'(y) f(y), written out by hand.
"""

from __future__ import annotations

import math

import numpy as np

from .integrator import Problem

__all__ = [
    "kepler",
    "fpu",
    "sine_gordon",
    "sine_gordon_matrix",
    "almost_periodic",
    "harmonic",
    "PROBLEMS",
    "get_problem",
]


def kepler(epsilon: float = 1e-2, omega: float = 5.0, t_end: float = 100.0) -> Problem:
    """Perturbed Kepler problem, state (q1, q2, p1, p2).

    H = |p|^2/2 + omega^2 |q|^2/2 + alpha |q|^6/6 with
    alpha = epsilon (2 omega + epsilon); the exact orbit is a circle traversed
    at angular speed omega + epsilon.
    """
    alpha = epsilon * (2.0 * omega + epsilon)
    w = omega + epsilon
    om2 = omega * omega

    def f(y):
        q, p = y[:2], y[2:]
        r4 = (q @ q) ** 2
        return np.concatenate((p, -(om2 + alpha * r4) * q))

    def g(y):
        q, p = y[:2], y[2:]
        r2 = q @ q
        force = -(om2 + alpha * r2 * r2) * q
        dforce = -(om2 + alpha * r2 * r2) * p - (4.0 * alpha * r2 * (q @ p)) * q
        return np.concatenate((force, dforce))

    def exact(t):
        c, s = math.cos(w * t), math.sin(w * t)
        return np.array([c, s, -w * s, w * c])

    def energy(y):
        q, p = y[:2], y[2:]
        r2 = q @ q
        return 0.5 * (p @ p) + 0.5 * om2 * r2 + alpha / 6.0 * r2**3

    return Problem(
        name="kepler",
        f=f,
        g=g,
        y0=np.array([1.0, 0.0, 0.0, w]),
        t_span=(0.0, float(t_end)),
        omega_hint=omega,
        exact=exact,
        invariant=energy,
        params={"epsilon": epsilon, "omega": omega, "alpha": alpha},
    )


def _fpu_coupling(m: int) -> np.ndarray:
    """Rows w_k with U(x) = sum_k (w_k . x)^4 / 4."""
    W = np.zeros((m + 1, 2 * m))
    W[0, 0], W[0, m] = 1.0, -1.0
    for j in range(1, m):
        # x_{j+1} - x_{m+j+1} - x_j - x_{m+j}, 1-based
        W[j, j] += 1.0
        W[j, m + j] -= 1.0
        W[j, j - 1] -= 1.0
        W[j, m + j - 1] -= 1.0
    W[m, m - 1], W[m, 2 * m - 1] = 1.0, 1.0
    return W


def fpu(m: int = 3, omega: float = 50.0, t_end: float = 100.0) -> Problem:
    """Fermi-Pasta-Ulam chain with m stiff springs, state (x, xdot) of length 4m."""
    n = 2 * m
    W = _fpu_coupling(m)
    om2 = np.zeros(n)
    om2[m:] = omega * omega

    def grad_u(x):
        return W.T @ (W @ x) ** 3

    def f(y):
        x, xd = y[:n], y[n:]
        return np.concatenate((xd, -om2 * x - grad_u(x)))

    def g(y):
        x, xd = y[:n], y[n:]
        wx = W @ x
        acc = -om2 * x - W.T @ wx**3
        jerk = -om2 * xd - W.T @ (3.0 * wx**2 * (W @ xd))
        return np.concatenate((acc, jerk))

    def energy(y):
        x, xd = y[:n], y[n:]
        return 0.5 * (xd @ xd) + 0.5 * (om2 * x) @ x + 0.25 * np.sum((W @ x) ** 4)

    y0 = np.zeros(2 * n)
    y0[0] = 1.0
    y0[n] = 1.0
    y0[m] = 1.0 / omega
    y0[n + m] = 1.0
    return Problem(
        name="fpu",
        f=f,
        g=g,
        y0=y0,
        t_span=(0.0, float(t_end)),
        omega_hint=omega,
        invariant=energy,
        params={"m": m, "omega": omega, "potential": lambda x: 0.25 * np.sum((W @ x) ** 4), "grad_u": grad_u},
    )


def sine_gordon_matrix(N: int) -> np.ndarray:
    """Periodic second-difference matrix (1/dx^2) circ(2, -1, ..., -1), dx = 2/N."""
    dx = 2.0 / N
    M = 2.0 * np.eye(N) - np.eye(N, k=1) - np.eye(N, k=-1)
    M[0, -1] -= 1.0
    M[-1, 0] -= 1.0
    return M / dx**2


def sine_gordon(N: int = 64, t_end: float = 10.0, omega_hint: float | None = None) -> Problem:
    """Method-of-lines sine-Gordon equation on (-1, 1) with periodic ends, state (U, V).

    The default fitting frequency is sqrt(lambda_max(M)), the fastest linear
    mode of the semi-discretization.
    """
    if N < 3:
        raise ValueError("need N >= 3 grid points")
    inv_dx2 = (N / 2.0) ** 2

    def lap(u):
        return inv_dx2 * (2.0 * u - np.roll(u, 1) - np.roll(u, -1))

    def f(y):
        U, V = y[:N], y[N:]
        return np.concatenate((V, -lap(U) - np.sin(U)))

    def g(y):
        U, V = y[:N], y[N:]
        return np.concatenate((-lap(U) - np.sin(U), -lap(V) - np.cos(U) * V))

    if omega_hint is None:
        k = N // 2
        omega_hint = 2.0 * math.sqrt(inv_dx2) * math.sin(math.pi * k / N)
    i = np.arange(1, N + 1)
    y0 = np.concatenate((np.full(N, math.pi), math.sqrt(N) * (0.01 + np.sin(2.0 * math.pi * i / N))))

    def energy(y):
        U, V = y[:N], y[N:]
        return 0.5 * V @ V + 0.5 * U @ lap(U) + np.sum(1.0 - np.cos(U))

    return Problem(
        name="sine-gordon",
        f=f,
        g=g,
        y0=y0,
        t_span=(0.0, float(t_end)),
        omega_hint=float(omega_hint),
        invariant=energy,
        params={"N": N},
    )


def almost_periodic(t_end: float = 1000.0) -> Problem:
    """y'' + y = 0.001 exp(i t) as a real autonomous system (Re y, Im y, Re y', Im y', t)."""
    eps = 1e-3

    def f(y):
        t = y[4]
        return np.array([y[2], y[3], -y[0] + eps * math.cos(t), -y[1] + eps * math.sin(t), 1.0])

    def g(y):
        t = y[4]
        ct, st = math.cos(t), math.sin(t)
        return np.array([
            -y[0] + eps * ct,
            -y[1] + eps * st,
            -y[2] - eps * st,
            -y[3] + eps * ct,
            0.0,
        ])

    def exact(t):
        c, s = math.cos(t), math.sin(t)
        return np.array([
            c + 0.0005 * t * s,
            s - 0.0005 * t * c,
            -s + 0.0005 * s + 0.0005 * t * c,
            c - 0.0005 * c + 0.0005 * t * s,
            t,
        ])

    return Problem(
        name="almost-periodic",
        f=f,
        g=g,
        y0=np.array([1.0, 0.0, 0.0, 0.9995, 0.0]),
        t_span=(0.0, float(t_end)),
        omega_hint=1.0,
        exact=exact,
    )


def harmonic(omega: float = 1.0, t_end: float = 10.0, y0=(1.0, 0.0)) -> Problem:
    """x'' + omega^2 x = 0, state (x, x')."""
    om2 = omega * omega
    x0, v0 = (float(a) for a in y0)

    def f(y):
        return np.array([y[1], -om2 * y[0]])

    def g(y):
        return -om2 * y

    def exact(t):
        c, s = math.cos(omega * t), math.sin(omega * t)
        return np.array([x0 * c + v0 / omega * s, -x0 * omega * s + v0 * c])

    def energy(y):
        return 0.5 * (y[1] ** 2 + om2 * y[0] ** 2)

    return Problem(
        name="harmonic",
        f=f,
        g=g,
        y0=np.array([x0, v0]),
        t_span=(0.0, float(t_end)),
        omega_hint=float(omega),
        exact=exact,
        invariant=energy,
        params={"omega": omega},
    )


PROBLEMS = {
    "kepler": kepler,
    "fpu": fpu,
    "sine-gordon": sine_gordon,
    "almost-periodic": almost_periodic,
    "harmonic": harmonic,
}


def get_problem(name: str, **kwargs) -> Problem:
    try:
        factory = PROBLEMS[name]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None
    return factory(**kwargs)
