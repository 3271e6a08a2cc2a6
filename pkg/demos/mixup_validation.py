"""What a label-invariant mix-up validation set looks like.

Every synthetic point lies on the segment between two training points of
the same class, and the class proportions of the source are kept up to
rounding. Growing m makes the risk estimate on the set less noisy.
"""

from pathlib import Path

import numpy as np

from lzoselect import LearnerSpec, MixupConfig, label_invariant_mixup, label_marginal, load_csv, train
from lzoselect.divergence import js
from lzoselect.models import empirical_risk

data = load_csv(Path(__file__).parents[1] / "data" / "iris.csv", has_header=True)
V = label_invariant_mixup(data, MixupConfig(m=12, alpha=1.0, seed=1))

print("first few draws (j, k, lambda -> label):")
for rec, label in list(zip(V.provenance(), V.data.y))[:5]:
    print(f"  {rec['j']:3d} {rec['k']:3d} {rec['lambda']:.3f} -> {data.classes[label]}")

print("\nclass marginal, source vs m=12:", label_marginal(data).round(3),
      label_marginal(V.data).round(3))

# the spread of the risk estimate across mix-up draws shrinks with m
model = train(LearnerSpec.svm(1.0), data, seed=0)
for ratio in (1, 10):
    m = ratio * data.n
    risks = [empirical_risk(model, label_invariant_mixup(data, MixupConfig(m, 1.0, s)).data)
             for s in range(30)]
    V = label_invariant_mixup(data, MixupConfig(m, 1.0, 0))
    print(f"m={m:5d}: risk {np.mean(risks):.4f} +- {np.std(risks):.4f}, "
          f"label JS {js(label_marginal(V.data), label_marginal(data)):.2e}")
