"""Leave-zero-out model selection with cross-validation baselines."""

from .augment import (AugmentedSet, MixupConfig, beta_sample, label_invariant_mixup,
                      mixup_pair, pseudo_label)
from .core import (Dataset, kfold_indices, label_marginal, load_csv, load_libsvm,
                   minmax_scale, save_csv, save_libsvm, split_holdout)
from .divergence import (BoundInputs, corollary1_bound, histogram_js_estimate,
                         js, js_conditional_decomposition, kl, linear_vc_dimension,
                         theorem1_bound)
from .models import (ZERO_ONE, LearnerSpec, LossSpec, TrainedModel, empirical_risk,
                     exact_expected_risk, train)
from .selection import (ConfigGrid, SelectionReport, holdout_select, kfold_cv_select,
                        leave_p_out_select, lzo_select, monte_carlo_cv_select)

__version__ = "0.1.0"
