"""
Sine-Gordon by the method of lines
==================================

N = 25 grid points on (-1, 1) with periodic ends.  The reference is a fine
3s6 run; the error of the h = 1/16 runs depends strongly on which omega the
schemes are fitted to.
"""

import numpy as np

from eftddirk import StepConfig, build_scheme, integrate, sine_gordon
from eftddirk.integrator import ConvergenceError

prob = sine_gordon(N=25, t_end=10.0)
ref = integrate(build_scheme("3s6"), prob, StepConfig(h=1 / 2048, omega=prob.omega_hint)).at
print(f"default omega (fastest linear mode) = {prob.omega_hint:.4f}")

for omega in (prob.omega_hint, 12.0, 4.0, 1.0):
    row = []
    for name in ("2s5", "3s6"):
        try:
            mge = integrate(build_scheme(name), prob, StepConfig(h=1 / 16, omega=omega), reference=ref).report.max_global_error
            row.append(f"{name} {mge:.2e}")
        except ConvergenceError:
            row.append(f"{name} diverged")
    print(f"omega {omega:8.4f}: " + "   ".join(row))
