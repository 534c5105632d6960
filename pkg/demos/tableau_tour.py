"""
Fitted tableaux and what "fitted" buys
======================================

Every scheme's coefficients depend on v = omega*h.  We print one tableau,
then check that the fitting conditions hold at lambda = +-i*omega.
"""

import numpy as np

from eftddirk import build_scheme, eval_tableau
from eftddirk.fitting import max_fit_residual

# The three-stage, sixth-order scheme at v = 0.5
spec = build_scheme("3s6")
tab = eval_tableau(spec, 0.5)
print(spec)
print(tab.dump())

# Coefficients move smoothly towards their classical values as v -> 0
for v in (1.0, 0.1, 1e-4):
    print(f"v = {v:<6g} b = {np.array2string(eval_tableau(spec, v).b, precision=10)}")

# Fitting residuals for every preset at a few frequencies
print()
for name in ("2s4a", "2s4a-opt", "2s4b", "2s4b-opt", "2s5", "3s6"):
    res = [max_fit_residual(eval_tableau(build_scheme(name), v), 1.0, v) for v in (0.1, 0.5, 1.0, 2.0)]
    print(f"{name:9s} worst fit residual {max(res):.1e}")
