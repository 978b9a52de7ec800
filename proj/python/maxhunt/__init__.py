"""Maxima-hunting variable selection for functional binary classification.

Thin Python layer over the C++ core: dependence curves, local-maxima
selection, reference selectors (t ranking, mRMR), k-NN / LDA classifiers,
and Brownian-family simulation with analytic oracles.  All functions take
and return plain lists and dicts.
"""

from ._maxhunt import (
    __version__,
    accuracy,
    analytic_v2_curve,
    bayes_error,
    bridge_grid,
    default_grid,
    dependence_curve,
    knn_classify,
    lda_classify,
    load_dataset,
    local_maxima,
    mh_select,
    model_names,
    mrmr_select,
    sample_model,
    save_dataset,
    t_select,
)

__all__ = [
    "__version__",
    "accuracy",
    "analytic_v2_curve",
    "bayes_error",
    "bridge_grid",
    "default_grid",
    "dependence_curve",
    "knn_classify",
    "lda_classify",
    "load_dataset",
    "local_maxima",
    "mh_select",
    "model_names",
    "mrmr_select",
    "sample_model",
    "save_dataset",
    "t_select",
]
