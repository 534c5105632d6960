"""
Estimating the fitting frequency
================================

When the dominant frequency is only roughly known, search a bracket for the
omega that minimizes the global error.  Each probe is one full run.
"""

from eftddirk import FreqSearch, build_scheme, estimate_omega, kepler

prob = kepler(t_end=10.0)
res = estimate_omega(build_scheme("3s6"), prob, 1 / 16, FreqSearch((4.5, 5.5), tol=1e-6))
for it, w, val in res.probes[:6]:
    print(f"probe {it:2d}  omega {w:.6f}  MGE {val:.2e}")
print("...")
print(f"best omega {res.omega:.6f} (exact orbit frequency 5.01), MGE {res.value:.1e}, {len(res.probes)} runs")
