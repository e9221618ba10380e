"""Large field trials: thousands of treatments, most of them replicated once.

Only the small subdesign is ever inverted, so a 2210-treatment full design
costs no more than a 190 x 190 and a 20 x 20 pseudoinverse.

Run:  python demos/02_large_designs.py
"""

import time

from prepblock import FullDesignSpec, egd_design, linked_block, modify
from prepblock.model import dual
from prepblock.reports import table3_row

cases = {
    "linked block, 14 blocks": (linked_block(1, 14), 105),
    "linked block, 20 blocks": (linked_block(1, 20), 120),
    "EGD(2,3,5) dual": (dual(egd_design((2, 3, 5))), 56),
    "EGD(3,3,3) + {1,18},{10,27}, dual": (
        dual(modify(egd_design((3, 3, 3)), [("add_block", 1, 18), ("add_block", 10, 27)])), 42),
    "EGD(3,4,4) - {1,2},{32,48}, dual": (
        dual(modify(egd_design((3, 4, 4)), [("remove_block", 1, 2), ("remove_block", 32, 48)])), 50),
}

print(f"{'subdesign':<38} {'u':>4} {'b':>3} {'k':>4} {'v':>5}   A_eff    MV_eff   seconds")
for label, (d, k) in cases.items():
    t = time.perf_counter()
    raw, _ = table3_row(d, k)
    spec = FullDesignSpec(d, k)
    print(f"{label:<38} {spec.u:>4} {spec.b:>3} {k:>4} {spec.v:>5}   {raw[0]:.4f}   {raw[1]:.4f}"
          f"   {time.perf_counter() - t:.3f}")

# An EGD design is a block-size-2 design; its dual puts each cell of the array
# in a block and each pair from a one-dimensional slice in two blocks.
g = egd_design((2, 2, 3))
print("\nEGD(2,2,3):", g.num_treatments, "treatments,", g.num_blocks, "blocks; first slice", g.blocks[:3])
