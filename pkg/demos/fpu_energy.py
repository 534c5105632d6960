"""
Energy behaviour on the Fermi-Pasta-Ulam chain
==============================================

Three stiff springs (omega = 50) coupled by soft cubic ones.  The schemes
are fitted to the stiff frequency; we watch the energy error over time.
"""

from eftddirk import StepConfig, build_scheme, fpu, integrate

prob = fpu(t_end=20.0)
print(f"H(y0) = {prob.invariant(prob.y0):.12f}")

for name in ("2s4a", "2s5", "3s6"):
    rep = integrate(build_scheme(name), prob, StepConfig(h=1 / 200, omega=50.0)).report
    d = rep.invariant_drift
    print(f"{name:5s} drift at t=5,10,20: {d[1000]:.2e} {d[2000]:.2e} {d[-1]:.2e}  ({rep.wall_seconds:.1f} s)")
