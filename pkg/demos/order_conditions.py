"""
Order conditions on bi-coloured trees
=====================================

Thirteen trees carry the conditions up to order six.  For a fitted scheme
the conditions hold only as h -> 0, with residuals shrinking like
h^(p + 1 - rho).
"""

from eftddirk import ORDER_TREES, build_scheme, order_residuals

print(f"{'no':>2}  {'tree':16s} rho gamma alpha")
for no, t in enumerate(ORDER_TREES, start=1):
    print(f"{no:>2}  {str(t):16s} {t.rho:>3} {t.gamma:>5} {str(t.alpha):>5}")

h_list = [2.0**-k for k in range(1, 7)]
for name in ("2s4a", "2s5", "3s6"):
    rows = order_residuals(build_scheme(name), omega=1.0, h_list=h_list)
    print(f"\n{name}: fitted slope vs required rate")
    seen = set()
    for r in rows:
        if r.tree_no in seen:
            continue
        seen.add(r.tree_no)
        mark = "ok" if r.certified else "FAIL"
        print(f"  tree {r.tree_no:>2} {str(r.tree):16s} slope {r.slope:6.2f}  need {r.required}  {mark}")
