"""Leave-zero-out next to 10-fold CV on one held-out split of wine.

Both selectors see the same 70% training split and the same 11-value grid
of C. LZO fits each candidate once and scores it on a mix-up set ten times
the size of the training data; 10-fold CV fits every candidate ten times
and then refits the winner.
"""

from pathlib import Path

from lzoselect import (LearnerSpec, MixupConfig, kfold_cv_select, load_csv, lzo_select, minmax_scale,
                       split_holdout, train)
from lzoselect.bench import DEFAULT_GRID, expand_grid
from lzoselect.models import accuracy

data = load_csv(Path(__file__).parents[1] / "data" / "wine.csv", has_header=True)
fit_set, test = split_holdout(data, 0.3, seed=0)
fit_set, (test,), _ = minmax_scale(fit_set, [test])
grid = expand_grid(DEFAULT_GRID)
train(LearnerSpec.svm(1.0, epochs=1), fit_set, 0)  # load the compiled kernel before timing

lzo_model, lzo = lzo_select(fit_set, grid, MixupConfig(10 * fit_set.n, alpha=1.0, seed=0))
cv_model, cv = kfold_cv_select(fit_set, grid, K=10, seed=0)

print(f"{'C':>9} {'LZO risk':>9} {'CV risk':>9}")
for spec, a, b in zip(grid, lzo.per_config_risk, cv.per_config_risk):
    print(f"{spec.get('C'):9.5g} {a:9.4f} {b:9.4f}")

for name, model, report in (("lzo", lzo_model, lzo), ("10-fold", cv_model, cv)):
    print(f"\n{name}: picked C={report.chosen_spec['hyperparams']['C']:g}, "
          f"{report.models_trained} models in {report.wall_time_seconds:.3f}s, "
          f"test accuracy {accuracy(model, test):.4f}")
