"""Tabulate competitor order terms across a (k, n, delta) grid.

All five published order terms are evaluated with unit constants; the
ratio column shows how each scales against the k/(delta sqrt(n)) term.
The kp ratio is exactly k in every cell, and quadrupling n halves the
sqrt(n) terms but quarters the 1/n term.
"""
from mbl.bounds import compare_bounds, table1_term

rows = compare_bounds(k_list=[2, 4, 8, 16], n_list=[10**4], delta_list=[0.1])

print(f"{'method':>15} {'k':>3} {'value':>12} {'ratio':>8}")
for row in rows:
    print(
        f"{row['method']:>15} {row['k']:>3} {row['value']:>12.5f} "
        f"{row['ratio_to_this_paper']:>8.2f}"
    )

print("\nsample-size scaling (k=4, delta=0.25):")
for method in ("kp", "this_paper", "crammer_singer"):
    a = table1_term(method, 4, 100, 0.25)
    b = table1_term(method, 4, 400, 0.25)
    print(f"  {method:>15}: value(n)/value(4n) = {a / b:.2f}")
