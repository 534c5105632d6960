"""
Stability regions and phase errors
==================================

On y' = i*Lambda*y one step multiplies by R(theta, v).  We count stable
cells on [0, 5]^2 and extract the leading dispersion and dissipation terms.
"""

from eftddirk import build_scheme, phase_leading_terms, stability_region

for name in ("2s4a", "2s4a-opt", "2s4b", "2s4b-opt", "2s5", "3s6"):
    reg = stability_region(build_scheme(name), grid_n=200)
    print(f"{name:9s} stable cells {reg.stable_cells:6d} / {reg.mask.size}")

# Phase errors at r = omega*h / theta = 1/2
print()
for name in ("2s4a", "2s4a-opt", "2s5", "3s6"):
    rep = phase_leading_terms(build_scheme(name), 0.5)
    print(
        f"{name:9s} dispersion order {rep.disp_order} coeff {rep.disp_coeff:+.4e}   "
        f"dissipation order {rep.dis_order} coeff {rep.dis_coeff:+.4e}"
    )

# To write the full full 500x500 grid for an external plotter:
#   eftddirk stability --scheme 3s6 --grid 500 -o region.csv
