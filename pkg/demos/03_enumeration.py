"""Exhaustive search over small binary subdesigns.

Each two-replicate binary subdesign is the dual of a loop-free multigraph,
so searching subdesigns means listing multigraphs up to isomorphism.

Run:  python demos/03_enumeration.py
"""

from prepblock import FullDesignSpec, a_eff, k_thresholds
from prepblock.enumeration import best_binary, compare_criteria, enum_multigraphs, mv_min
from prepblock.reports import format_karow, table_karow

for b, u in [(3, 3), (4, 6), (5, 8), (6, 10)]:
    print(f"b={b}, u={u}: {len(enum_multigraphs(b, u))} non-isomorphic connected multigraphs")

res = best_binary(6, 4, 10)
print("\nA-optimal binary subdesign for u=6, b=4, k=10:", res.optimizer)
print("  thresholds", format_karow(table_karow(res.optimizer)))

res = best_binary(8, 9, 20)
print("\nwith u = b - 1 the subdesign is a tree; best of", res.n_classes, "trees at k=20:")
print("  ", res.optimizer, f"A_eff={a_eff(FullDesignSpec(res.optimizer, 20)):.3f}")

print("\nsmallest worst-pair variance among block-size-2 designs:")
for b, u in [(3, 3), (4, 3), (4, 6), (5, 10)]:
    print(f"  b={b}, u={u}: {mv_min(b, u):.4f}")

print("\ndoes the A-optimal subdesign also minimise the W-only and W-plus-UW sums?")
for u, b, k in [(6, 4, 4), (6, 4, 10), (8, 4, 5), (8, 4, 10)]:
    out = compare_criteria(u, b, k)
    print(f"  (u,b,k)=({u},{b},{k}): W-only {out['a1_agrees']}, W-plus-UW {out['a2_agrees']}")
