"""Worked small designs: how the choice of subdesign drives efficiency.

Run:  python demos/01_small_examples.py
"""

from prepblock import FullDesignSpec, a_eff, linked_block, modify, mv_eff, mv_value
from prepblock.reports import format_karow, load_fixture, table_karow

# A linked block design spreads the twice-replicated treatments evenly:
# every pair of blocks shares the same number of them.
d = linked_block(2, 4)
print("linked block design, lambda=2, b=4:", d)
for k in (7, 10, 20):
    print(f"  k={k:>2}  A_eff={a_eff(FullDesignSpec(d, k)):.4f}")

# The smallest one, three treatments in three blocks, is A-optimal for every k.
print("linked(1,3) at k=3..6:", [round(a_eff(FullDesignSpec(linked_block(1, 3), k)), 6) for k in range(3, 7)])

# Deleting two treatments from the 15-treatment design leaves blocks of sizes
# 4 and 5; efficiency dips at small k but recovers quickly.
base = load_fixture("example2a_linked15")
d2a = modify(base, [("delete_treatment", 1), ("delete_treatment", 15)])
print("\n13 treatments in 6 blocks, sizes", d2a.block_sizes)
print("  (k0, k.90, k.95, k.98) =", format_karow(table_karow(d2a)))
for k in (5, 6, 7, 8):
    print(f"  k={k}  A_eff={a_eff(FullDesignSpec(d2a, k)):.4f}")

# MV looks at the worst pair instead of the average. It does not change with k
# once every block has a singly replicated treatment.
for k in (6, 10, 20):
    mv = mv_value(FullDesignSpec(d2a, k))
    print(f"  k={k:>2}  MV={mv.total:.4f} (UU {mv.uu:.3f}, WW {mv.ww:.3f}, UW {mv.uw:.3f})"
          f"  MV_eff={mv_eff(FullDesignSpec(d2a, k)):.4f}")

# Lattice-type subdesigns.
for name in ("example4a", "example4b"):
    d = load_fixture(name)
    print(f"\n{name}: u={d.num_treatments}, b={d.num_blocks}, thresholds {format_karow(table_karow(d))}")
