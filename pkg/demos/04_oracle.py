"""Check the closed forms against brute force on the full design.

The oracle builds the full design's information matrix, inverts it with a
Jacobi eigensolver and reads off every pairwise variance.

Run:  python demos/04_oracle.py
"""

import numpy as np

from prepblock import FullDesignSpec, a_value, full_design
from prepblock.oracle import oracle_variances, prop1_variances, random_spec, variance_partial_sums
from prepblock.reports import load_fixture

spec = FullDesignSpec(load_fixture("example2b"), 7)
d0 = full_design(spec)
var = oracle_variances(d0, spec.k)
print(f"full design: v={spec.v} treatments in {spec.b} blocks of size {spec.k}")
print("closed form (total, UU, WW, UW):", np.round(a_value(spec), 6))
print("oracle      (total, UU, WW, UW):", np.round(variance_partial_sums(var, spec.u), 6))
print("largest entrywise gap:", np.abs(prop1_variances(spec) - var).max())

rng = np.random.default_rng(0)
worst = 0.0
for _ in range(100):
    s = random_spec(rng)
    v = oracle_variances(full_design(s), s.k)
    worst = max(worst, abs(a_value(s)[0] - variance_partial_sums(v, s.u)[0]) / a_value(s)[0])
print(f"100 random designs, worst relative gap in A: {worst:.1e}")
