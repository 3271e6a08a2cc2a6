"""How far can the mix-up risk estimate drift from the true risk?

On a 16-point domain the true risk of a trained SVM can be computed by
enumeration, and so can the JS divergence between the data distribution and
the validation distribution. Here the validation distribution is the
empirical joint of the training sample, and every trial compares the
observed gap with the JS-plus-VC bound at delta = 0.1.
"""

import numpy as np

from lzoselect.divergence import BoundInputs, theorem1_bound, vc_term
from lzoselect.synthetic import bound_check

trials = [bound_check(seed, n=100, m=200, delta=0.1) for seed in range(50)]
gaps = np.array([t["gap"] for t in trials])
bounds = np.array([t["bound"] for t in trials])
print(f"gap   mean {gaps.mean():.4f}, max {gaps.max():.4f}")
print(f"bound mean {bounds.mean():.4f}, min {bounds.min():.4f}")
print(f"violations: {sum(t['violated'] for t in trials)} of {len(trials)}")

print("\nVC term alone for v=3, delta=0.1:")
for m in (100, 1_000, 10_000, 100_000):
    print(f"  m={m:>7d}: {vc_term(m, 3, 0.1):.4f}")
print("the divergence term does not shrink with m:",
      f"{theorem1_bound(BoundInputs(1.0, 10**9, 3, 0.1, 0.05)):.4f} at JS=0.05, m=1e9")
